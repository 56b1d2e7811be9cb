// experiment.hpp
//
// Runs a configured scenario end to end: sampling, estimation, the matching
// closed-form bounds, one verdict per check, and the flat-file artifacts.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ricker/config.hpp"
#include "ricker/estimators.hpp"
#include "ricker/hitting.hpp"
#include "ricker/io.hpp"
#include "ricker/theory.hpp"

namespace ricker {

enum class Status { pass, fail, inestimable, info };

inline std::string to_string(Status s)
{
    switch (s) {
        case Status::pass: return "PASS";
        case Status::fail: return "FAIL";
        case Status::inestimable: return "INESTIMABLE";
        case Status::info: return "INFO";
    }
    return "?";
}

struct Verdict
{
    std::string theorem;
    std::string check;
    std::string prediction;
    std::string measured;
    Status status = Status::info;
    std::string source;  // sample file the measurement came from
};

/// Results for one starting density of a one-species scenario.
struct X0Run
{
    double x0 = 0.0;
    std::string sample_file;
    std::string survival_file;
    SampleSet samples;
    SurvivalCurve curve;
    PowerTailReport tail;
    TailFit exp_rate;
    MeanEstimate mean;
    std::size_t hits = 0;
    std::size_t censored = 0;
    std::size_t extinct = 0;
    std::size_t hit_at_one = 0;
    Interval hit_at_one_ci;
};

/// Results for one species check of a two-species scenario.
struct SpeciesRun
{
    SpeciesCheck check;
    std::string sample_file;
    std::string tau_file;
    SampleSet tau;
    SampleSet species;
    MeanEstimate all;
    /// Species exit time restricted to trajectories whose tau^M was censored.
    std::optional<MeanEstimate> given_tau_censored;
    std::size_t n_tau_censored = 0;
    std::size_t neither_by_horizon = 0;
};

struct RunSummary
{
    ExperimentConfig config;
    std::string config_hash;
    TheoremId theorem = TheoremId::T2_1a;
    std::vector<std::pair<std::string, AssumptionReport>> assumptions;
    Json theory;

    std::vector<X0Run> runs;

    SampleSet tau_samples;
    std::string tau_file;
    std::vector<SpeciesRun> species;

    std::vector<Verdict> verdicts;
    std::vector<std::string> files;
    std::uint64_t steps = 0;
    double wall_seconds = 0.0;
    std::string started_at;

    const Verdict* find(const std::string& check) const
    {
        for (const auto& v : verdicts) {
            if (v.check == check) {
                return &v;
            }
        }
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Descriptions
// ---------------------------------------------------------------------------

inline std::string describe(const GrowthModel& m)
{
    return std::visit(detail::overloaded{
                          [](const growth::Ricker& g) {
                              return "ricker r=" + io::format_double(g.r) + " a=" + io::format_double(g.a);
                          },
                          [](const growth::PerturbedRicker& g) {
                              return "perturbed_ricker r=" + io::format_double(g.r) + " a=" + io::format_double(g.a) +
                                     " c=" + io::format_double(g.c);
                          },
                      },
                      m);
}

inline std::string describe(const NoiseSpec& n) { return detail::noise_json(n).dump(); }

inline std::string describe(const Region& r) { return detail::region_json(r).dump(); }

// ---------------------------------------------------------------------------
// Closed-form bounds for a config
// ---------------------------------------------------------------------------

namespace detail {

inline Json optimum_json(const RateOptimum& o, const char* rate_name)
{
    Json j;
    j["alpha_star"] = number(o.alpha_star);
    j[rate_name] = number(o.rate_star);
    j["attained"] = o.attained;
    j["vacuous"] = o.vacuous;
    if (!o.note.empty()) {
        j["note"] = o.note;
    }
    return j;
}

inline Json bound_json(const BoundValue& b)
{
    if (b.value) {
        return number(*b.value);
    }
    return Json{{"applies", false}, {"reason", b.reason}};
}

inline double eps0_for(const ExperimentConfig& c, double eps) { return c.eps0.value_or(2.0 * eps); }

}  // namespace detail

/// Every applicable closed-form quantity for the scenario, as JSON.
inline Json theory_bounds(const ExperimentConfig& c)
{
    Json j;
    if (c.kind == ScenarioKind::two_species) {
        const auto cls = classify_two_species(c.two);
        j["case"] = to_string(cls.label);
        j["m1"] = cls.m1;
        j["m2"] = cls.m2;
        j["transient"] = cls.transient();
        j["tau_form"] = cls.tau_form ? Json(detail::tau_form_name(*cls.tau_form)) : Json(nullptr);
        j["eps_max"] = cls.eps_max;
        j["tau_margin"] = tau_margin(c.two, c.tau);
        j["tau_functional_at_x0"] =
            tau_functional(c.two, c.tau, {LogState::from_density(c.x0_1), LogState::from_density(c.x0_2)});
        return j;
    }
    const auto reg = classify_regime(c.model, c.noise);
    j["regime"] = Json{{"lambda", detail::number(reg.lambda)},
                       {"regime", to_string(reg.regime)},
                       {"label", to_string(reg.label)},
                       {"caveats", reg.caveats}};
    j["alpha0"] = detail::number(alpha0_of(c.noise));
    j["predicted_extremes_survival_exponent"] = detail::number(predicted_extremes_tail(c.noise));

    std::visit(detail::overloaded{
                   [&](const region::Commonness& g) {
                       const auto opt = optimize_kappa(c.model, c.noise, g.M);
                       j["kappa"] = detail::optimum_json(opt, "kappa_star");
                       Json per = Json::array();
                       for (double x : c.x0) {
                           const auto mb = mean_bounds(c.model, x, g.M * 0.5, g.M);
                           per.push_back(Json{{"x0", x},
                                              {"prefactor", detail::number(commonness_prefactor(x, g.M, opt.alpha_star))},
                                              {"p_exit_in_one_step",
                                               prob_commonness_exit_one_step(c.model, c.noise, x, g.M)},
                                              {"mean_TM_upper", detail::bound_json(mb.mean_TM_upper)}});
                       }
                       j["per_x0"] = per;
                   },
                   [&](const region::Rarity& g) {
                       const double inf_lf = rarity_inf_log_growth(c.model, g.eps);
                       if (inf_lf > 0) {
                           const auto opt = optimize_rho(c.model, c.noise, g.eps);
                           j["rho"] = detail::optimum_json(opt, "rho_star");
                           j["rho"]["inf_log_growth"] = inf_lf;
                       } else {
                           j["rho"] = Json{{"applies", false},
                                           {"reason", "inf of ln f over [0, eps] is " + io::format_sig(inf_lf) +
                                                          ", must be > 0"}};
                       }
                       const double eps0 = detail::eps0_for(c, g.eps);
                       j["eps0"] = eps0;
                       Json per = Json::array();
                       for (double x : c.x0) {
                           const auto mb = mean_bounds(c.model, x, g.eps, 2.0 * g.eps, eps0);
                           Json row{{"x0", x},
                                    {"mean_Teps_lower", detail::bound_json(mb.mean_Teps_lower)},
                                    {"mean_Teps_upper", detail::bound_json(mb.mean_Teps_upper)}};
                           if (inf_lf > 0) {
                               row["prefactor"] = detail::number(
                                   rarity_prefactor(x, g.eps, optimize_rho(c.model, c.noise, g.eps).alpha_star));
                           }
                           per.push_back(row);
                       }
                       j["per_x0"] = per;
                   },
                   [&](const region::MediumBand& g) {
                       const auto mb = medium_band_kappa(c.model, c.noise, g.eps, g.M);
                       j["medium_band"] = Json{{"K_min", mb.k_min},
                                               {"K_max", mb.k_max},
                                               {"noise_interval", Json::array({mb.noise_lo, mb.noise_hi})},
                                               {"kappa", mb.kappa},
                                               {"in_hypothesis", mb.in_hypothesis}};
                   },
                   [&](const region::Extremes&) {},
               },
               c.region);
    return j;
}

// ---------------------------------------------------------------------------
// Verdict helpers
// ---------------------------------------------------------------------------

namespace detail {

struct BoundCheck
{
    std::size_t points = 0;
    std::size_t violations = 0;
    double worst_log_ratio = -kInf;  // max over n of ln S(n) - ln bound(n)
    std::int64_t worst_n = 0;
};

/// Compares S(n) with exp(log_bound(n)) at every integer n in [0, horizon)
/// where S(n) >= min_S.
template <class LogBound>
BoundCheck check_survival_bound(const SurvivalCurve& curve, double min_S, LogBound log_bound)
{
    BoundCheck out;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        if (p.S < min_S || p.n >= curve.horizon) {
            continue;
        }
        const std::int64_t end = i + 1 < curve.points.size() ? curve.points[i + 1].n : curve.horizon;
        const double ls = std::log(p.S);
        for (std::int64_t n = p.n; n < end; ++n) {
            ++out.points;
            const double d = ls - log_bound(n);
            if (d > out.worst_log_ratio) {
                out.worst_log_ratio = d;
                out.worst_n = n;
            }
            if (d > 1e-12) {
                ++out.violations;
            }
        }
    }
    return out;
}

inline std::string bound_check_text(const BoundCheck& b)
{
    if (b.points == 0) {
        return "no points with enough survivors";
    }
    return std::to_string(b.violations) + " of " + std::to_string(b.points) +
           " points above bound; max S/bound = " + io::format_sig(std::exp(b.worst_log_ratio)) + " at n = " +
           std::to_string(b.worst_n);
}

inline std::string pm(double v, double se) { return io::format_sig(v) + " +/- " + io::format_sig(se, 2); }

inline std::string fit_text(const TailFit& f)
{
    if (!f.estimable) {
        return "inestimable (" + f.note + ")";
    }
    std::string s = pm(f.value, f.std_error);
    if (!f.note.empty()) {
        s += " [" + f.note + "]";
    }
    return s;
}

inline std::string ci_text(const Interval& i) { return "[" + io::format_sig(i.lo) + ", " + io::format_sig(i.hi) + "]"; }

/// Default exponential-fit window: n from 1 to the last n with at least
/// `min_survivors` trajectories left.
inline TailFit default_exp_rate(const ExperimentConfig& c, const SurvivalCurve& curve)
{
    if (c.estimator.fit_window) {
        const auto [lo, hi] = *c.estimator.fit_window;
        if (curve.at(std::min(hi, curve.horizon)) <= 0) {
            return TailFit::inestimable(FitMethod::exp_rate, "survival reaches 0 inside the configured window");
        }
        return fit_exponential_rate(curve, lo, std::min(hi, curve.horizon));
    }
    const auto w = exp_fit_window(curve, c.estimator.min_survivors / static_cast<double>(curve.n_total));
    return exponential_rate_or_bound(curve, w.first, w.second);
}

/// Truncated mean at horizon h over a sample, with the relative growth
/// from h/10 to h.
struct Saturation
{
    double short_mean = 0.0;
    double full_mean = 0.0;
    double relative_growth = 0.0;
};

inline Saturation saturation(const SampleSet& s)
{
    Saturation out;
    out.short_mean = truncated_mean(s, std::max<std::int64_t>(1, s.horizon / 10));
    out.full_mean = truncated_mean(s, s.horizon);
    out.relative_growth = out.short_mean > 0 ? out.full_mean / out.short_mean - 1.0 : 0.0;
    return out;
}

inline constexpr double kSaturationTolerance = 0.01;
inline constexpr double kNeutralSurvivalExponent = 0.5;
inline constexpr double kNeutralExponentTolerance = 0.1;
inline constexpr double kExtremesRelativeTolerance = 0.25;
inline constexpr double kLinearityR2 = 0.99;

}  // namespace detail

// ---------------------------------------------------------------------------
// Verdicts per theorem
// ---------------------------------------------------------------------------

namespace detail {

inline void verdicts_commonness_mean(RunSummary& s, double M)
{
    const std::string th = to_string(s.theorem);
    std::vector<std::pair<double, const X0Run*>> sorted;
    for (const auto& r : s.runs) {
        sorted.push_back({r.x0, &r});
        const auto mb = mean_bounds(s.config.model, r.x0, 0.5 * M, M);
        const double bound = *mb.mean_TM_upper.value;
        s.verdicts.push_back({th, "E T_M upper bound at X0=" + io::format_sig(r.x0),
                              "E T_M <= 2(ln X0 - ln M + 1) = " + io::format_sig(bound),
                              "mean " + io::format_sig(r.mean.mean, 6) + " CI " + ci_text(r.mean.ci95),
                              r.mean.mean <= bound ? Status::pass : Status::fail, r.sample_file});
        const double p = prob_commonness_exit_one_step(s.config.model, s.config.noise, r.x0, M);
        const double frac = static_cast<double>(r.hit_at_one) / static_cast<double>(r.samples.size());
        s.verdicts.push_back({th, "P(T_M = 1) at X0=" + io::format_sig(r.x0), "P(T_M = 1) = " + io::format_sig(p, 6),
                              "Hit{1} fraction " + io::format_sig(frac, 6) + " CI " + ci_text(r.hit_at_one_ci),
                              r.hit_at_one_ci.contains(p) ? Status::pass : Status::fail, r.sample_file});
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    if (sorted.size() > 1) {
        bool monotone = true;
        std::string fr;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const double f = static_cast<double>(sorted[i].second->hit_at_one) /
                             static_cast<double>(sorted[i].second->samples.size());
            if (i > 0) {
                const double prev = static_cast<double>(sorted[i - 1].second->hit_at_one) /
                                    static_cast<double>(sorted[i - 1].second->samples.size());
                monotone = monotone && f >= prev;
                fr += ", ";
            }
            fr += io::format_sig(f, 6);
        }
        s.verdicts.push_back({th, "Hit{1} fraction trend", "non-decreasing in X0 (E T_M -> 1)", fr,
                              monotone ? Status::pass : Status::fail, ""});
    }
}

inline void verdicts_commonness_tail(RunSummary& s, double M)
{
    const std::string th = to_string(s.theorem);
    const auto opt = optimize_kappa(s.config.model, s.config.noise, M);
    for (const auto& r : s.runs) {
        const std::string at = " at X0=" + io::format_sig(r.x0);
        if (opt.vacuous) {
            s.verdicts.push_back({th, "exponential tail of T_M" + at, "no alpha gives kappa < 1", "bound vacuous",
                                  Status::info, r.sample_file});
            continue;
        }
        const double C = commonness_prefactor(r.x0, M, opt.alpha_star);
        const double min_S = s.config.estimator.min_survivors / static_cast<double>(r.samples.size());
        const auto bc = check_survival_bound(r.curve, min_S, [&](std::int64_t n) {
            return std::log(C) + static_cast<double>(n) * std::log(opt.rate_star);
        });
        s.verdicts.push_back({th, "survival bound S(n) <= C kappa*^n" + at,
                              "C = " + io::format_sig(C) + ", kappa* = " + io::format_sig(opt.rate_star) +
                                  ", alpha* = " + io::format_sig(opt.alpha_star) +
                                  (opt.attained ? "" : " (infimum not attained)"),
                              bound_check_text(bc), bc.violations == 0 ? Status::pass : Status::fail, r.sample_file});
        const double rate = -std::log(opt.rate_star);
        if (!r.exp_rate.estimable) {
            s.verdicts.push_back({th, "exponential rate of T_M" + at, "rate >= -ln kappa* = " + io::format_sig(rate),
                                  fit_text(r.exp_rate), Status::inestimable, r.sample_file});
        } else {
            const bool ok = r.exp_rate.value >= rate - 3.0 * r.exp_rate.std_error;
            s.verdicts.push_back({th, "exponential rate of T_M" + at, "rate >= -ln kappa* = " + io::format_sig(rate),
                                  fit_text(r.exp_rate), ok ? Status::pass : Status::fail, r.sample_file});
        }
    }
}

inline void verdicts_medium(RunSummary& s, const region::MediumBand& g)
{
    const std::string th = to_string(s.theorem);
    const auto mb = medium_band_kappa(s.config.model, s.config.noise, g.eps, g.M);
    for (const auto& r : s.runs) {
        const std::string at = " at X0=" + io::format_sig(r.x0);
        const std::string pred = "kappa(eps, M) = " + io::format_sig(mb.kappa, 6) +
                                 (mb.in_hypothesis ? "" : " (noise uniformly bounded: out of hypothesis)");
        if (!(mb.kappa < 1.0)) {
            s.verdicts.push_back({th, "survival bound S(n) <= kappa^(n-2)" + at, pred, "bound vacuous", Status::info,
                                  r.sample_file});
        } else {
            const double min_S = 1.0 / static_cast<double>(r.samples.size());
            const auto bc = check_survival_bound(r.curve, min_S, [&](std::int64_t n) {
                return n <= 2 ? 0.0 : static_cast<double>(n - 2) * std::log(mb.kappa);
            });
            s.verdicts.push_back({th, "survival bound S(n) <= kappa^(n-2)" + at, pred, bound_check_text(bc),
                                  bc.violations == 0 ? Status::pass : Status::fail, r.sample_file});
        }
        // linearity of ln S over S >= 1e-4
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::int64_t n = 1; n < r.curve.horizon; ++n) {
            const double S = r.curve.at(n);
            if (S < 1e-4) {
                break;
            }
            xs.push_back(static_cast<double>(n));
            ys.push_back(std::log(S));
        }
        if (xs.size() < 3) {
            s.verdicts.push_back({th, "ln-survival linear" + at, "R^2 >= 0.99 over S >= 1e-4",
                                  "fewer than 3 points", Status::inestimable, r.sample_file});
        } else {
            const auto lf = linear_regression(xs, ys);
            s.verdicts.push_back({th, "ln-survival linear" + at, "R^2 >= 0.99 over S >= 1e-4",
                                  "R^2 = " + io::format_sig(lf.r_squared, 6) + " over n in [1, " +
                                      std::to_string(xs.size()) + "], rate " + io::format_sig(-lf.slope),
                                  lf.r_squared >= kLinearityR2 ? Status::pass : Status::fail, r.sample_file});
        }
    }
}

inline void verdicts_transience(RunSummary& s)
{
    const std::string th = to_string(s.theorem);
    for (const auto& r : s.runs) {
        const std::string at = " at X0=" + io::format_sig(r.x0);
        const std::size_t stuck = r.censored + r.extinct;
        const auto ci = wilson_interval(stuck, r.samples.size());
        s.verdicts.push_back({th, "never leaves rarity" + at, "P(T_eps = inf) > 0",
                              "censored-or-extinct fraction " +
                                  io::format_sig(static_cast<double>(stuck) / static_cast<double>(r.samples.size())) +
                                  ", CI " + ci_text(ci),
                              ci.lo > 0 ? Status::pass : Status::fail, r.sample_file});
        std::vector<double> finals;
        for (const auto& o : r.samples.outcomes) {
            if (o.kind == OutcomeKind::censored) {
                finals.push_back(o.final_log_x);
            }
        }
        if (finals.empty()) {
            s.verdicts.push_back({th, "censored paths drift to 0" + at, "median final ln X < -100",
                                  "no censored trajectories", Status::inestimable, r.sample_file});
        } else {
            std::nth_element(finals.begin(), finals.begin() + static_cast<std::ptrdiff_t>(finals.size() / 2),
                             finals.end());
            const double med = finals[finals.size() / 2];
            s.verdicts.push_back({th, "censored paths drift to 0" + at, "median final ln X < -100",
                                  "median " + io::format_sig(med) + " over " + std::to_string(finals.size()),
                                  med < -100 ? Status::pass : Status::fail, r.sample_file});
        }
    }
}

inline void verdicts_growing_rarity(RunSummary& s, double eps)
{
    const std::string th = to_string(s.theorem);
    const auto& m = s.config.model;
    const double eps0 = eps0_for(s.config, eps);
    const auto opt = optimize_rho(m, s.config.noise, eps);
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : s.runs) {
        const std::string at = " at X0=" + io::format_sig(r.x0);
        const auto mb = mean_bounds(m, r.x0, eps, 2.0 * eps, eps0);
        if (mb.mean_Teps_lower.value && mb.mean_Teps_upper.value) {
            const double lo = *mb.mean_Teps_lower.value;
            const double hi = *mb.mean_Teps_upper.value;
            s.verdicts.push_back({th, "E T_eps sandwich" + at,
                                  "[" + io::format_sig(lo) + ", " + io::format_sig(hi) + "] (eps0 = " +
                                      io::format_sig(eps0) + ")",
                                  "mean " + io::format_sig(r.mean.mean, 6) + " CI " + ci_text(r.mean.ci95),
                                  r.mean.mean >= lo && r.mean.mean <= hi ? Status::pass : Status::fail,
                                  r.sample_file});
        }
        xs.push_back(std::abs(std::log(r.x0)));
        ys.push_back(r.mean.mean);

        if (opt.vacuous) {
            s.verdicts.push_back({th, "exponential tail of T_eps" + at, "no alpha gives rho < 1", "bound vacuous",
                                  Status::info, r.sample_file});
            continue;
        }
        const double C = rarity_prefactor(r.x0, eps, opt.alpha_star);
        const double min_S = s.config.estimator.min_survivors / static_cast<double>(r.samples.size());
        const auto bc = check_survival_bound(r.curve, min_S, [&](std::int64_t n) {
            return std::log(C) + static_cast<double>(n) * std::log(opt.rate_star);
        });
        s.verdicts.push_back({th, "survival bound S(n) <= C rho*^n" + at,
                              "C = " + io::format_sig(C) + ", rho* = " + io::format_sig(opt.rate_star) +
                                  ", alpha* = " + io::format_sig(opt.alpha_star),
                              bound_check_text(bc), bc.violations == 0 ? Status::pass : Status::fail, r.sample_file});
    }
    if (xs.size() >= 3) {
        const auto lf = linear_regression(xs, ys);
        const double d = log_growth_range(m, 0.0, eps).hi;
        const double slope_lo = 1.0 / d;
        const double slope_hi = 2.0 / log_lambda(m);
        s.verdicts.push_back({th, "E T_eps linear in |ln X0|", "R^2 >= 0.99",
                              "R^2 = " + io::format_sig(lf.r_squared, 6),
                              lf.r_squared >= kLinearityR2 ? Status::pass : Status::fail, ""});
        s.verdicts.push_back({th, "E T_eps slope in |ln X0|",
                              "[1/d, 2/ln lambda] = [" + io::format_sig(slope_lo) + ", " + io::format_sig(slope_hi) + "]",
                              "slope " + pm(lf.slope, lf.slope_stderr),
                              lf.slope >= slope_lo && lf.slope <= slope_hi ? Status::pass : Status::fail, ""});
    }
}

inline void verdicts_extremes(RunSummary& s)
{
    const std::string th = to_string(s.theorem);
    const double a0 = alpha0_of(s.config.noise);
    for (const auto& r : s.runs) {
        const std::string at = " at X0=" + io::format_sig(r.x0);
        const auto& hill = r.tail.hill;
        if (std::isinf(a0)) {
            const auto& cmp = r.tail.comparison;
            const std::string measured = "power fit " + std::string(r.tail.power_fit_poor ? "poor" : "acceptable") +
                                         " (cutoff LR " + io::format_sig(cmp.cutoff_lr) + "), geometric vs power z = " +
                                         io::format_sig(cmp.z, 3) + " over " + std::to_string(cmp.n_used) +
                                         " exceedances, Hill " + fit_text(hill);
            if (!cmp.estimable) {
                s.verdicts.push_back({th, "no power tail" + at, "alpha0 = inf: exponential preferred", measured,
                                      Status::inestimable, r.sample_file});
            } else {
                s.verdicts.push_back({th, "no power tail" + at, "alpha0 = inf: exponential preferred", measured,
                                      r.tail.exponential_preferred ? Status::pass : Status::fail, r.sample_file});
            }
            continue;
        }
        if (!(a0 > 0)) {
            s.verdicts.push_back({th, "survival exponent" + at, "alpha0 = 0: every moment of T infinite",
                                  "Hill " + fit_text(hill), Status::info, r.sample_file});
            continue;
        }
        const double lo = (1.0 - kExtremesRelativeTolerance) * a0;
        const double hi = (1.0 + kExtremesRelativeTolerance) * a0;
        s.verdicts.push_back({th, "survival exponent" + at,
                              "alpha0 = " + io::format_sig(a0) + ", accepted [" + io::format_sig(lo) + ", " +
                                  io::format_sig(hi) + "]",
                              "Hill " + fit_text(hill) + "; regression " + fit_text(r.tail.regression),
                              !hill.estimable ? Status::inestimable
                                              : (hill.value >= lo && hill.value <= hi ? Status::pass : Status::fail),
                              r.sample_file});
    }
}

inline void verdicts_neutral(RunSummary& s)
{
    const std::string th = to_string(s.theorem);
    for (const auto& r : s.runs) {
        const std::string at = " at X0=" + io::format_sig(r.x0);
        const auto& hill = r.tail.hill;
        const double lo = kNeutralSurvivalExponent - kNeutralExponentTolerance;
        const double hi = kNeutralSurvivalExponent + kNeutralExponentTolerance;
        s.verdicts.push_back({th, "survival exponent" + at,
                              "0.5 (mass function n^-3/2), accepted [" + io::format_sig(lo) + ", " +
                                  io::format_sig(hi) + "]",
                              "Hill " + fit_text(hill) + "; regression " + fit_text(r.tail.regression),
                              !hill.estimable ? Status::inestimable
                                              : (hill.value >= lo && hill.value <= hi ? Status::pass : Status::fail),
                              r.sample_file});
        s.verdicts.push_back({th, "mean divergence" + at, "E T_eps = inf (heuristic flag only)",
                              "truncated means " + io::format_sig(r.mean.nested_means[0]) + ", " +
                                  io::format_sig(r.mean.nested_means[1]) + ", " +
                                  io::format_sig(r.mean.nested_means[2]) + "; growth ratio " +
                                  io::format_sig(r.mean.growth_ratio),
                              r.mean.divergence_flag ? Status::pass : Status::fail, r.sample_file});
    }
}

inline void verdicts_two_species(RunSummary& s)
{
    const std::string th = to_string(s.theorem);
    const std::size_t stuck = s.tau_samples.count(OutcomeKind::censored);
    const auto ci = wilson_interval(stuck, s.tau_samples.size());
    s.verdicts.push_back({th, "tau^M can be infinite", "P(tau^M = inf) > 0",
                          "censored fraction " +
                              io::format_sig(static_cast<double>(stuck) / static_cast<double>(s.tau_samples.size())) +
                              ", CI " + ci_text(ci),
                          ci.lo > 0 ? Status::pass : Status::fail, s.tau_file});
    for (const auto& sp : s.species) {
        const std::string who = sp.check.name + " (species " + std::to_string(sp.check.species) + ")";
        if (std::holds_alternative<region::Extremes>(sp.check.region)) {
            s.verdicts.push_back({th, who + " band exit or tau^M", "P(T_[eps,L]^c ^ tau^M < inf) = 1",
                                  std::to_string(sp.neither_by_horizon) + " of " + std::to_string(sp.species.size()) +
                                      " trajectories saw neither by the horizon",
                                  sp.neither_by_horizon == 0 ? Status::pass : Status::fail, sp.sample_file});
            continue;
        }
        const bool conditional = std::holds_alternative<region::Rarity>(sp.check.region);
        std::optional<SampleSet> subset;
        if (conditional) {
            SampleSet sub;
            sub.horizon = sp.species.horizon;
            for (std::size_t i = 0; i < sp.species.size(); ++i) {
                if (sp.tau.outcomes[i].kind == OutcomeKind::censored) {
                    sub.outcomes.push_back(sp.species.outcomes[i]);
                }
            }
            if (sub.outcomes.empty()) {
                s.verdicts.push_back({th, who + " finite mean given tau^M censored (proxy for tau^M = inf)",
                                      "truncated means saturate",
                                      "no trajectory with censored tau^M", Status::inestimable, sp.sample_file});
                continue;
            }
            subset = std::move(sub);
        }
        const SampleSet& base = subset ? *subset : sp.species;
        const auto sat = saturation(base);
        s.verdicts.push_back({th,
                              who + (conditional ? " finite mean given tau^M censored (proxy for tau^M = inf)"
                                                 : " finite mean"),
                              "truncated mean at h/10 and h agree within 1%",
                              "m(" + std::to_string(base.horizon / 10) + ") = " + io::format_sig(sat.short_mean, 6) +
                                  ", m(" + std::to_string(base.horizon) + ") = " + io::format_sig(sat.full_mean, 6) +
                                  " over " + std::to_string(base.size()) + " trajectories",
                              sat.relative_growth <= kSaturationTolerance ? Status::pass : Status::fail,
                              sp.sample_file});
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

namespace detail {

inline X0Run analyse_run(const ExperimentConfig& c, double x0, SampleSet samples)
{
    X0Run r;
    r.x0 = x0;
    r.samples = std::move(samples);
    r.hits = r.samples.count(OutcomeKind::hit);
    r.censored = r.samples.count(OutcomeKind::censored);
    r.extinct = r.samples.count(OutcomeKind::extinct);
    for (const auto& o : r.samples.outcomes) {
        r.hit_at_one += (o.is_hit() && o.n == 1) ? 1 : 0;
    }
    r.hit_at_one_ci = wilson_interval(r.hit_at_one, r.samples.size());
    r.curve = survival_curve(r.samples);
    r.tail = fit_power_tail(r.samples, c.estimator.hill_k);
    r.exp_rate = default_exp_rate(c, r.curve);
    r.mean = mean_with_ci(r.samples);
    return r;
}

inline std::uint64_t steps_of(const SampleSet& s)
{
    std::uint64_t total = 0;
    for (const auto& o : s.outcomes) {
        total += static_cast<std::uint64_t>(o.n);
    }
    return total;
}

inline std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string file_safe(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
    }
    return out;
}

}  // namespace detail

/// Samples, fits and verdicts for a validated config. Nothing is written.
inline RunSummary simulate_experiment(const ExperimentConfig& c)
{
    if (auto errs = validate_config(c); !errs.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errs) {
            msg += "\n  " + e;
        }
        throw std::invalid_argument(msg);
    }
    const auto t0 = std::chrono::steady_clock::now();
    RunSummary s;
    s.started_at = detail::utc_now();
    s.config = c;
    s.config_hash = config_hash(c);
    s.theorem = effective_theorem(c);
    s.theory = theory_bounds(c);
    const SimulationLimits limits{c.horizon, c.log_floor};

    if (c.kind == ScenarioKind::single) {
        s.assumptions.push_back({"noise", check_assumptions(c.noise, s.theorem)});
        if (s.theorem == TheoremId::T4_1) {
            s.assumptions.push_back({"noise (exponential tail)", check_assumptions(c.noise, TheoremId::T4_1_exp)});
        }
        for (std::size_t i = 0; i < c.x0.size(); ++i) {
            auto samples = batch_hitting(c.model, c.noise, c.x0[i], c.region, limits, c.n_traj, c.master_seed, c.workers);
            s.steps += detail::steps_of(samples);
            auto run = detail::analyse_run(c, c.x0[i], std::move(samples));
            const std::string suffix = c.x0.size() == 1 ? "" : "_x0_" + std::to_string(i);
            run.sample_file = "samples" + suffix + ".csv";
            run.survival_file = "survival" + suffix + ".csv";
            s.runs.push_back(std::move(run));
        }
        std::visit(detail::overloaded{
                       [&](const region::Commonness& g) {
                           if (s.theorem == TheoremId::T2_1a) {
                               detail::verdicts_commonness_mean(s, g.M);
                           } else {
                               detail::verdicts_commonness_tail(s, g.M);
                           }
                       },
                       [&](const region::MediumBand& g) { detail::verdicts_medium(s, g); },
                       [&](const region::Rarity& g) {
                           if (s.theorem == TheoremId::T3_1) {
                               detail::verdicts_transience(s);
                           } else if (s.theorem == TheoremId::T5_1) {
                               detail::verdicts_neutral(s);
                           } else {
                               detail::verdicts_growing_rarity(s, g.eps);
                           }
                       },
                       [&](const region::Extremes&) { detail::verdicts_extremes(s); },
                   },
                   c.region);
    } else {
        s.assumptions.push_back({"noise species 1", check_assumptions(c.two.noise1, TheoremId::T6_1)});
        s.assumptions.push_back({"noise species 2", check_assumptions(c.two.noise2, TheoremId::T6_1)});
        // Rarity checks are judged given tau^M = inf, so their trajectories run
        // until both times resolve; the others stop at the species exit.
        std::optional<std::size_t> shared;
        for (const auto& chk : c.species_checks) {
            SpeciesRun sp;
            sp.check = chk;
            const bool conditional = std::holds_alternative<region::Rarity>(chk.region);
            const LogPair st{LogState::from_density(chk.x1), LogState::from_density(chk.x2)};
            auto j = batch_two_species(c.two, st, c.tau, chk.species, &chk.region, limits, c.n_traj, c.master_seed,
                                       c.workers, conditional ? JointStop::both : JointStop::species);
            sp.tau = std::move(j.tau);
            sp.species = std::move(j.species);
            const std::string base = detail::file_safe(chk.name);
            sp.sample_file = "samples_" + base + ".csv";
            sp.all = mean_with_ci(sp.species);
            SampleSet sub;
            sub.horizon = sp.species.horizon;
            for (std::size_t i = 0; i < sp.species.size(); ++i) {
                const auto& t = sp.tau.outcomes[i];
                const auto& o = sp.species.outcomes[i];
                s.steps += static_cast<std::uint64_t>(std::max(t.n, o.n));
                if (conditional && t.kind == OutcomeKind::censored) {
                    sub.outcomes.push_back(o);
                }
                // a censored species exit means the path ran to the horizon, so tau^M is known there
                sp.neither_by_horizon += (!t.is_hit() && !o.is_hit()) ? 1 : 0;
            }
            if (conditional) {
                sp.tau_file = "samples_" + base + "_tau.csv";
                sp.n_tau_censored = sub.size();
                if (!sub.outcomes.empty()) {
                    sp.given_tau_censored = mean_with_ci(sub);
                }
                if (!shared && chk.x1 == c.x0_1 && chk.x2 == c.x0_2) {
                    shared = s.species.size();
                }
            }
            s.species.push_back(std::move(sp));
        }
        // same seed, start and dynamics: a conditional check from X0 has already
        // produced the tau^M sample
        if (shared) {
            s.tau_samples = s.species[*shared].tau;
        } else {
            const LogPair start{LogState::from_density(c.x0_1), LogState::from_density(c.x0_2)};
            auto joint =
                batch_two_species(c.two, start, c.tau, 1, nullptr, limits, c.n_traj, c.master_seed, c.workers);
            s.tau_samples = std::move(joint.tau);
            s.steps += detail::steps_of(s.tau_samples);
        }
        s.tau_file = "samples_tau.csv";
        detail::verdicts_two_species(s);
    }
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
}

// ---------------------------------------------------------------------------
// Serialisation and report
// ---------------------------------------------------------------------------

namespace detail {

inline Json fit_json(const TailFit& f, const std::string& source)
{
    Json j;
    j["method"] = to_string(f.method);
    j["estimable"] = f.estimable;
    if (f.estimable) {
        j["exponent_or_rate"] = number(f.value);
        j["stderr"] = number(f.std_error);
        if (f.method == FitMethod::hill) {
            j["k_order_stats"] = f.k;
        }
        j["fit_window"] = Json::array({f.window_lo, f.window_hi});
        j["n_used"] = f.n_used;
        if (f.method != FitMethod::hill) {
            j["r_squared"] = number(f.r_squared);
        }
    }
    if (!f.note.empty()) {
        j["note"] = f.note;
    }
    j["sample_file"] = source;
    return j;
}

inline Json mean_json(const MeanEstimate& m)
{
    return Json{{"mean", number(m.mean)},
                {"ci95", Json::array({number(m.ci95.lo), number(m.ci95.hi)})},
                {"censored_fraction", number(m.censored_fraction)},
                {"nested_truncated_means", Json::array({number(m.nested_means[0]), number(m.nested_means[1]),
                                                        number(m.nested_means[2])})},
                {"growth_ratio", number(m.growth_ratio)},
                {"divergence_flag", m.divergence_flag}};
}

inline Json counts_json(const SampleSet& s)
{
    return Json{{"n", s.size()},
                {"hit", s.count(OutcomeKind::hit)},
                {"censored", s.count(OutcomeKind::censored)},
                {"extinct", s.count(OutcomeKind::extinct)},
                {"horizon", s.horizon}};
}

}  // namespace detail

inline Json fits_json(const RunSummary& s)
{
    Json list = Json::array();
    for (const auto& r : s.runs) {
        Json j;
        j["x0"] = r.x0;
        j["sample_file"] = r.sample_file;
        j["hill"] = detail::fit_json(r.tail.hill, r.sample_file);
        j["hill_half_k"] = detail::fit_json(r.tail.hill_half, r.sample_file);
        j["hill_double_k"] = detail::fit_json(r.tail.hill_double, r.sample_file);
        j["loglog_regression"] = detail::fit_json(r.tail.regression, r.sample_file);
        j["model_selection"] = Json{{"hill_spread", detail::number(r.tail.hill_spread)},
                                    {"slope_lower_half", detail::number(r.tail.slope_lower)},
                                    {"slope_upper_half", detail::number(r.tail.slope_upper)},
                                    {"slope_drift", detail::number(r.tail.drift)},
                                    {"lr_threshold_exceedances", r.tail.comparison.n_used},
                                    {"power_exponent_mle", detail::number(r.tail.comparison.power_exponent)},
                                    {"geometric_ratio_mle", detail::number(r.tail.comparison.geometric_ratio)},
                                    {"cutoff_exponent_mle", detail::number(r.tail.comparison.cutoff_exponent)},
                                    {"cutoff_rate_mle", detail::number(r.tail.comparison.cutoff_rate)},
                                    {"cutoff_lr", detail::number(r.tail.comparison.cutoff_lr)},
                                    {"vuong_z_power_vs_geometric", detail::number(r.tail.comparison.z)},
                                    {"r2_power", detail::number(r.tail.r2_power)},
                                    {"r2_exponential", detail::number(r.tail.r2_exponential)},
                                    {"power_fit_poor", r.tail.power_fit_poor},
                                    {"exponential_preferred", r.tail.exponential_preferred}};
        j["exp_rate"] = detail::fit_json(r.exp_rate, r.sample_file);
        j["mean"] = detail::mean_json(r.mean);
        list.push_back(j);
    }
    for (const auto& sp : s.species) {
        Json j;
        j["check"] = sp.check.name;
        j["sample_file"] = sp.sample_file;
        j["mean"] = detail::mean_json(sp.all);
        if (sp.given_tau_censored) {
            j["mean_given_tau_censored"] = detail::mean_json(*sp.given_tau_censored);
            j["mean_given_tau_censored"]["tau_file"] = sp.tau_file;
        }
        list.push_back(j);
    }
    return list;
}

inline Json summary_json(const RunSummary& s)
{
    Json j;
    j["metadata"] = Json{{"started_at", s.started_at},
                         {"wall_seconds", s.wall_seconds},
                         {"workers", s.config.workers}};
    j["config_hash"] = s.config_hash;
    j["config"] = config_to_json(s.config);
    j["theorem"] = to_string(s.theorem);
    Json as = Json::array();
    for (const auto& [who, rep] : s.assumptions) {
        Json viol = Json::array();
        for (const auto& h : rep.hypotheses) {
            if (!h.passed) {
                viol.push_back(h.condition + ": " + h.detail);
            }
        }
        as.push_back(Json{{"subject", who}, {"label", rep.label()}, {"violations", viol}});
    }
    j["assumptions"] = as;
    j["theory"] = s.theory;
    if (s.config.kind == ScenarioKind::single) {
        Json per = Json::array();
        for (const auto& r : s.runs) {
            per.push_back(Json{{"x0", r.x0},
                               {"sample_file", r.sample_file},
                               {"survival_file", r.survival_file},
                               {"outcomes", detail::counts_json(r.samples)},
                               {"hit_at_step_one", r.hit_at_one},
                               {"mean", detail::mean_json(r.mean)}});
        }
        j["per_x0"] = per;
    } else {
        j["tau"] = Json{{"sample_file", s.tau_file}, {"outcomes", detail::counts_json(s.tau_samples)}};
        Json per = Json::array();
        for (const auto& sp : s.species) {
            per.push_back(Json{{"check", sp.check.name},
                               {"species", sp.check.species},
                               {"region", detail::region_json(sp.check.region)},
                               {"x0", Json::array({sp.check.x1, sp.check.x2})},
                               {"sample_file", sp.sample_file},
                               {"tau_file", sp.tau_file},
                               {"outcomes", detail::counts_json(sp.species)},
                               {"tau_censored", sp.n_tau_censored},
                               {"neither_by_horizon", sp.neither_by_horizon}});
        }
        j["species_checks"] = per;
    }
    j["fits_file"] = "fits.json";
    Json vs = Json::array();
    for (const auto& v : s.verdicts) {
        vs.push_back(Json{{"theorem", v.theorem},
                          {"check", v.check},
                          {"prediction", v.prediction},
                          {"measured", v.measured},
                          {"verdict", to_string(v.status)},
                          {"sample_file", v.source}});
    }
    j["verdicts"] = vs;
    j["steps_simulated"] = s.steps;
    return j;
}

/// Human-readable theorem-by-theorem table.
inline std::string report_text(const RunSummary& s)
{
    const auto& c = s.config;
    std::string out;
    out += "scenario " + c.scenario_id + "  (config " + s.config_hash + ", seed " + std::to_string(c.master_seed) + ")\n";
    if (c.kind == ScenarioKind::single) {
        out += "model   " + describe(c.model) + "\n";
        out += "noise   " + describe(c.noise) + "\n";
        out += "region  " + describe(c.region) + "\n";
        out += "regime  lambda = " + io::format_sig(lambda(c.model)) + ", " + s.theory["regime"]["label"].get<std::string>() + "\n";
    } else {
        out += "model   two_species r1=" + io::format_double(c.two.r1) + " r2=" + io::format_double(c.two.r2) +
               " a11=" + io::format_double(c.two.a11) + " a12=" + io::format_double(c.two.a12) +
               " a21=" + io::format_double(c.two.a21) + " a22=" + io::format_double(c.two.a22) + "\n";
        out += "noise   " + describe(c.two.noise1) + " / " + describe(c.two.noise2) + "\n";
        out += "case    " + s.theory["case"].get<std::string>() + " (m1 = " + io::format_sig(s.theory["m1"].get<double>()) +
               ", m2 = " + io::format_sig(s.theory["m2"].get<double>()) + ")\n";
    }
    out += "horizon " + std::to_string(c.horizon) + ", trajectories " + std::to_string(c.n_traj) + "\n";
    for (const auto& [who, rep] : s.assumptions) {
        out += "assumptions (" + who + "): " + rep.label();
        if (!rep.passed()) {
            out += "; " + rep.violations();
        }
        out += "\n";
    }
    for (const auto& r : s.runs) {
        out += "X0 = " + io::format_sig(r.x0) + ": hit " + std::to_string(r.hits) + ", censored " +
               std::to_string(r.censored) + ", extinct " + std::to_string(r.extinct) + "\n";
    }
    if (c.kind == ScenarioKind::two_species) {
        out += "tau^M: hit " + std::to_string(s.tau_samples.count(OutcomeKind::hit)) + ", censored " +
               std::to_string(s.tau_samples.count(OutcomeKind::censored)) + ", extinct " +
               std::to_string(s.tau_samples.count(OutcomeKind::extinct)) + "\n";
    }
    out += "\n";
    for (const auto& v : s.verdicts) {
        out += v.theorem + ": " + v.check + ": predicted " + v.prediction + "; measured " + v.measured + "; " +
               to_string(v.status) + "\n";
    }
    if (s.verdicts.empty()) {
        out += "no checks apply\n";
    }
    return out;
}

namespace detail {

inline std::string loglog_csv(const RunSummary& s)
{
    std::string out = "x0,n,ln_n,S,ln_S\n";
    for (const auto& r : s.runs) {
        for (const auto& p : r.curve.points) {
            if (p.n >= 1 && p.S > 0) {
                out += io::format_double(r.x0) + ',' + std::to_string(p.n) + ',' +
                       io::format_double(std::log(static_cast<double>(p.n))) + ',' + io::format_double(p.S) + ',' +
                       io::format_double(std::log(p.S)) + '\n';
            }
        }
    }
    return out;
}

inline std::string ln_survival_csv(const RunSummary& s)
{
    std::string out = "x0,n,S,ln_S\n";
    for (const auto& r : s.runs) {
        for (const auto& p : r.curve.points) {
            if (p.S > 0) {
                out += io::format_double(r.x0) + ',' + std::to_string(p.n) + ',' + io::format_double(p.S) + ',' +
                       io::format_double(std::log(p.S)) + '\n';
            }
        }
    }
    return out;
}

inline std::string mean_vs_lnx0_csv(const RunSummary& s)
{
    std::string out = "x0,abs_ln_x0,mean,ci_lo,ci_hi,bound_lo,bound_hi\n";
    const auto* rar = std::get_if<region::Rarity>(&s.config.region);
    for (const auto& r : s.runs) {
        std::string lo;
        std::string hi;
        if (rar != nullptr) {
            const auto mb = mean_bounds(s.config.model, r.x0, rar->eps, 2.0 * rar->eps, eps0_for(s.config, rar->eps));
            lo = mb.mean_Teps_lower.value ? io::format_double(*mb.mean_Teps_lower.value) : "";
            hi = mb.mean_Teps_upper.value ? io::format_double(*mb.mean_Teps_upper.value) : "";
        }
        out += io::format_double(r.x0) + ',' + io::format_double(std::abs(std::log(r.x0))) + ',' +
               io::format_double(r.mean.mean) + ',' + io::format_double(r.mean.ci95.lo) + ',' +
               io::format_double(r.mean.ci95.hi) + ',' + lo + ',' + hi + '\n';
    }
    return out;
}

}  // namespace detail

/// Writes every artifact of `s` into `dir`. On failure, files written so far
/// are removed before the error propagates.
inline std::vector<std::string> write_artifacts(const RunSummary& s, const std::filesystem::path& dir)
{
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& r : s.runs) {
        files.push_back({r.sample_file, io::samples_csv(r.samples)});
        files.push_back({r.survival_file, io::survival_csv(r.curve)});
    }
    if (s.config.kind == ScenarioKind::two_species) {
        files.push_back({s.tau_file, io::samples_csv(s.tau_samples)});
        for (const auto& sp : s.species) {
            files.push_back({sp.sample_file, io::samples_csv(sp.species)});
            if (!sp.tau_file.empty()) {
                files.push_back({sp.tau_file, io::samples_csv(sp.tau)});
            }
            files.push_back({"survival_" + detail::file_safe(sp.check.name) + ".csv",
                             io::survival_csv(survival_curve(sp.species))});
        }
    } else {
        files.push_back({"loglog_survival.csv", detail::loglog_csv(s)});
        files.push_back({"ln_survival.csv", detail::ln_survival_csv(s)});
        files.push_back({"mean_vs_lnx0.csv", detail::mean_vs_lnx0_csv(s)});
    }
    files.push_back({"fits.json", fits_json(s).dump(2) + "\n"});
    files.push_back({"summary.json", summary_json(s).dump(2) + "\n"});
    files.push_back({"report.txt", report_text(s)});

    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    try {
        for (const auto& [name, content] : files) {
            io::write_file(dir / name, content);
            written.push_back(name);
        }
    } catch (...) {
        for (const auto& name : written) {
            std::error_code ec;
            std::filesystem::remove(dir / name, ec);
        }
        throw;
    }
    return written;
}

/// simulate_experiment followed by write_artifacts into config.output_dir
/// (skipped when the output directory is empty).
inline RunSummary run_experiment(const ExperimentConfig& c)
{
    RunSummary s = simulate_experiment(c);
    if (!c.output_dir.empty()) {
        s.files = write_artifacts(s, c.output_dir);
    }
    return s;
}

}  // namespace ricker
