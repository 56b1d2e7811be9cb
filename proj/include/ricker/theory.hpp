// theory.hpp
//
// Analytic constants for the noisy Ricker chain: exponential-tail rates for
// the commonness and rarity times and their optimal exponents, the
// medium-abundance rate, mean-time bounds, regime and two-species case
// classification. These serve as oracles for the Monte Carlo results.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ricker/dynamics.hpp"
#include "ricker/hitting.hpp"
#include "ricker/noise.hpp"
#include "ricker/numeric.hpp"

namespace ricker {

// ---------------------------------------------------------------------------
// Extrema of ln f and of ln(x f(x)) over intervals
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr int kExtremumGrid = 10000;
// Points in [lo, hi]: endpoints plus a log-spaced grid (anchored at hi * 1e-9
// when lo == 0).
inline std::vector<double> extremum_grid(double lo, double hi)
{
    std::vector<double> xs{lo, hi};
    const double start = lo > 0 ? lo : hi * 1e-9;
    const double lstart = std::log(start);
    const double lend = std::log(hi);
    for (int i = 0; i < kExtremumGrid; ++i) {
        xs.push_back(std::exp(lstart + (lend - lstart) * i / (kExtremumGrid - 1)));
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

// max of fn on [lo, hi] by dense grid then golden refinement of the best cell.
template <class Fn>
double grid_max(Fn&& fn, double lo, double hi)
{
    const auto xs = extremum_grid(lo, hi);
    std::size_t best = 0;
    double best_v = -kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = fn(xs[i]);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    const double a = xs[best == 0 ? 0 : best - 1];
    const double b = xs[std::min(best + 1, xs.size() - 1)];
    if (b > a) {
        const double x = golden_minimize([&](double t) { return -fn(t); }, a, b, 1e-12);
        best_v = std::max(best_v, fn(x));
    }
    return best_v;
}

}  // namespace detail

struct Range
{
    double lo = 0.0;
    double hi = 0.0;
};

/// inf and sup of ln f over [lo, hi] (hi may be +inf).
inline Range log_growth_range(const GrowthModel& model, double lo, double hi)
{
    if (const auto* g = std::get_if<growth::Ricker>(&model)) {
        return {std::isinf(hi) ? -kInf : g->r - g->a * hi, g->r - g->a * lo};
    }
    if (std::isinf(hi)) {
        return {-kInf, log_growth_range(model, lo, lo + 1.0).hi};
    }
    auto f = [&](double x) { return log_growth(model, x); };
    return {-detail::grid_max([&](double x) { return -f(x); }, lo, hi), detail::grid_max(f, lo, hi)};
}

/// sup_{x >= lo} ln f(x).
inline double sup_log_growth_above(const GrowthModel& model, double lo)
{
    if (const auto* g = std::get_if<growth::Ricker>(&model)) {
        return g->r - g->a * lo;
    }
    const auto& g = std::get<growth::PerturbedRicker>(model);
    // beyond `hi`, r - a x + |c| < r - a lo - |c| <= ln f(lo)
    const double hi = lo + (2.0 * std::abs(g.c) + 1.0) / g.a + 1.0;
    return log_growth_range(model, lo, hi).hi;
}

/// inf and sup of ln(x f(x)) over [eps, M].
inline Range log_xf_range(const GrowthModel& model, double eps, double M)
{
    auto g = [&](double x) { return std::log(x) + log_growth(model, x); };
    if (const auto* rk = std::get_if<growth::Ricker>(&model)) {
        // concave with maximum at x = 1/a
        const double peak = std::clamp(1.0 / rk->a, eps, M);
        return {std::min(g(eps), g(M)), g(peak)};
    }
    return {-detail::grid_max([&](double x) { return -g(x); }, eps, M), detail::grid_max(g, eps, M)};
}

// ---------------------------------------------------------------------------
// 1-D minimisation of a log-convex rate over alpha
// ---------------------------------------------------------------------------

struct RateOptimum
{
    double alpha_star = 0.0;
    double rate_star = 1.0;  // kappa* or rho*
    bool attained = true;    // false: infimum approached at the scan limit
    bool vacuous = false;    // no alpha gives a value below 1
    std::string note;
};

struct OptimizerOptions
{
    double alpha_scan_max = 100.0;
    int grid_points = 400;
    double rel_tol = 1e-8;
};

/// Minimises log_rate(alpha) over (0, min(domain_sup, scan max)) by a
/// log-spaced bracket followed by golden-section search.
inline RateOptimum minimize_log_rate(const std::function<double(double)>& log_rate, double domain_sup,
                                     const OptimizerOptions& opt = {})
{
    RateOptimum out;
    const bool capped = !(domain_sup <= opt.alpha_scan_max);
    const double upper = capped ? opt.alpha_scan_max : domain_sup * (1.0 - 1e-12);
    if (!(upper > 0)) {
        out.vacuous = true;
        out.alpha_star = 0.0;
        out.rate_star = 1.0;
        out.note = "no alpha > 0 with finite exponential moment";
        return out;
    }
    const double lower = upper * 1e-9;
    std::vector<double> grid(static_cast<std::size_t>(opt.grid_points));
    for (int i = 0; i < opt.grid_points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            std::exp(std::log(lower) + (std::log(upper) - std::log(lower)) * i / (opt.grid_points - 1));
    }
    std::size_t best = 0;
    double best_v = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = log_rate(grid[i]);
        if (v < best_v) {
            best_v = v;
            best = i;
        }
    }
    if (best == grid.size() - 1 && capped) {
        out.alpha_star = grid.back();
        out.rate_star = std::exp(best_v);
        out.attained = false;
        out.note = "infimum not attained; reported over the scanned range";
        out.vacuous = !(best_v < 0);
        return out;
    }
    const double a = best == 0 ? 0.0 : grid[best - 1];
    const double b = best + 1 < grid.size() ? grid[best + 1] : upper;
    const double x = detail::golden_minimize(log_rate, a, b, opt.rel_tol);
    const double vx = log_rate(x);
    out.alpha_star = vx <= best_v ? x : grid[best];
    out.rate_star = std::exp(std::min(vx, best_v));
    if (!(std::min(vx, best_v) < 0)) {
        out.vacuous = true;
        out.note = "bound vacuous: no alpha > 0 gives a rate below 1";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Commonness: kappa(alpha) = sup_{x >= M} f(x)^alpha E[e^{alpha Y}]
// ---------------------------------------------------------------------------

inline double log_kappa_of_alpha(const GrowthModel& model, const NoiseSpec& spec, double M, double alpha)
{
    if (alpha == 0.0) {
        return 0.0;
    }
    return alpha * sup_log_growth_above(model, M) + noise_log_mgf(spec, alpha);
}

inline double kappa_of_alpha(const GrowthModel& model, const NoiseSpec& spec, double M, double alpha)
{
    return std::exp(log_kappa_of_alpha(model, spec, M, alpha));
}

inline RateOptimum optimize_kappa(const GrowthModel& model, const NoiseSpec& spec, double M,
                                  const OptimizerOptions& opt = {})
{
    // sup_{x >= M} ln f does not depend on alpha
    const double s = sup_log_growth_above(model, M);
    return minimize_log_rate(
        [&](double a) { return a * s + noise_log_mgf(spec, a); }, alpha0_pos(spec), opt);
}

/// C(X0) = (X0 / M)^{alpha*}.
inline double commonness_prefactor(double x0, double M, double alpha_star)
{
    return std::pow(x0 / M, alpha_star);
}

/// P(T_M = 1) = P(X_1 <= M) = P(Y <= ln M - ln X0 - ln f(X0)).
inline double prob_commonness_exit_one_step(const GrowthModel& model, const NoiseSpec& spec, double x0,
                                            double M)
{
    return noise_cdf(spec, std::log(M) - std::log(x0) - log_growth(model, x0));
}

// ---------------------------------------------------------------------------
// Rarity: rho(alpha) = e^{-alpha inf_{[0,eps]} ln f} E[e^{-alpha Y}]
// ---------------------------------------------------------------------------

/// inf over [0, eps] of ln f; must be > 0 for the rarity bounds.
inline double rarity_inf_log_growth(const GrowthModel& model, double eps)
{
    return log_growth_range(model, 0.0, eps).lo;
}

inline void require_rarity_hypothesis(const GrowthModel& model, double eps)
{
    const double inf_lf = rarity_inf_log_growth(model, eps);
    if (!(inf_lf > 0)) {
        throw std::invalid_argument("rarity bound: inf of ln f over [0, eps] is " + std::to_string(inf_lf) +
                                    ", must be > 0");
    }
}

inline double log_rho_of_alpha(const GrowthModel& model, const NoiseSpec& spec, double eps, double alpha)
{
    if (alpha == 0.0) {
        return 0.0;
    }
    return -alpha * rarity_inf_log_growth(model, eps) + noise_log_mgf(spec, -alpha);
}

inline double rho_of_alpha(const GrowthModel& model, const NoiseSpec& spec, double eps, double alpha)
{
    return std::exp(log_rho_of_alpha(model, spec, eps, alpha));
}

inline RateOptimum optimize_rho(const GrowthModel& model, const NoiseSpec& spec, double eps,
                                const OptimizerOptions& opt = {})
{
    require_rarity_hypothesis(model, eps);
    const double inf_lf = rarity_inf_log_growth(model, eps);
    return minimize_log_rate(
        [&](double a) { return -a * inf_lf + noise_log_mgf(spec, -a); }, alpha0_neg(spec), opt);
}

/// C(X0) = (eps / X0)^{alpha*}.
inline double rarity_prefactor(double x0, double eps, double alpha_star)
{
    return std::pow(eps / x0, alpha_star);
}

// ---------------------------------------------------------------------------
// Medium abundance
// ---------------------------------------------------------------------------

struct MediumBandKappa
{
    double k_min = 0.0;  // -ln max_{[eps,M]} x f(x)
    double k_max = 0.0;  // -ln min_{[eps,M]} x f(x)
    double noise_lo = 0.0;
    double noise_hi = 0.0;
    double kappa = 1.0;
    bool in_hypothesis = true;
};

/// One-step probability bound for staying in [eps, M]:
/// kappa = P(ln eps + K_min <= Y <= ln M + K_max). The chain stays in the
/// band only if ln eps - ln(x f(x)) <= Y <= ln M - ln(x f(x)) for its
/// current x, an interval contained in the one above.
inline MediumBandKappa medium_band_kappa(const GrowthModel& model, const NoiseSpec& spec, double eps, double M)
{
    if (!(eps > 0) || !(eps < M)) {
        throw std::invalid_argument("medium_band_kappa: need 0 < eps < M");
    }
    const Range r = log_xf_range(model, eps, M);
    MediumBandKappa out;
    out.k_min = -r.hi;
    out.k_max = -r.lo;
    out.noise_lo = std::log(eps) + out.k_min;
    out.noise_hi = std::log(M) + out.k_max;
    out.kappa = noise_interval_probability(spec, out.noise_lo, out.noise_hi);
    out.in_hypothesis = !is_uniformly_bounded(spec);
    return out;
}

// ---------------------------------------------------------------------------
// Mean-time bounds
// ---------------------------------------------------------------------------

struct BoundValue
{
    std::optional<double> value;
    std::string reason;  // why the bound does not apply, when value is empty
};

struct MeanBounds
{
    BoundValue mean_TM_upper;    // 2 (ln X0 - ln M + 1)
    BoundValue mean_Teps_lower;  // (ln eps - ln X0) / sup_{[0,eps]} ln f
    BoundValue mean_Teps_upper;  // 2 (ln eps0 - ln X0) / ln lambda
    double eps0 = 0.0;
};

/// eps0 defaults to 2 eps.
inline MeanBounds mean_bounds(const GrowthModel& model, double x0, double eps, double M,
                              std::optional<double> eps0_opt = std::nullopt)
{
    MeanBounds b;
    b.eps0 = eps0_opt.value_or(2.0 * eps);
    if (x0 > M) {
        b.mean_TM_upper.value = 2.0 * (std::log(x0) - std::log(M) + 1.0);
    } else {
        b.mean_TM_upper.reason = "requires X0 > M";
    }
    const double ln_lambda = log_lambda(model);
    if (!(ln_lambda > 0)) {
        b.mean_Teps_lower.reason = b.mean_Teps_upper.reason = "requires lambda > 1";
        return b;
    }
    if (!(x0 < eps)) {
        b.mean_Teps_lower.reason = b.mean_Teps_upper.reason = "requires X0 < eps";
        return b;
    }
    const double d = log_growth_range(model, 0.0, eps).hi;
    if (d > 0) {
        b.mean_Teps_lower.value = (std::log(eps) - std::log(x0)) / d;
    } else {
        b.mean_Teps_lower.reason = "requires sup_{[0,eps]} ln f > 0";
    }
    if (b.eps0 > eps) {
        b.mean_Teps_upper.value = 2.0 * (std::log(b.eps0) - std::log(x0)) / ln_lambda;
    } else {
        b.mean_Teps_upper.reason = "requires eps0 > eps";
    }
    return b;
}

// ---------------------------------------------------------------------------
// Regime classification
// ---------------------------------------------------------------------------

enum class RegimeLabel { transient, positive_recurrent, null_recurrent };

inline std::string to_string(RegimeLabel r)
{
    switch (r) {
        case RegimeLabel::transient: return "transient";
        case RegimeLabel::positive_recurrent: return "positive recurrent";
        case RegimeLabel::null_recurrent: return "null recurrent";
    }
    return "?";
}

struct RegimeReport
{
    double lambda = 1.0;
    Regime regime = Regime::neutral;
    RegimeLabel label = RegimeLabel::null_recurrent;
    std::vector<std::string> caveats;
};

inline RegimeReport classify_regime(const GrowthModel& model, const NoiseSpec& spec)
{
    RegimeReport rep;
    rep.lambda = lambda(model);
    rep.regime = regime(model);
    switch (rep.regime) {
        case Regime::declining:
            rep.label = RegimeLabel::transient;
            if (!(max_finite_moment(spec) > 1.0)) {
                rep.caveats.emplace_back("E|Y| infinite: transience hypothesis fails");
            }
            break;
        case Regime::growing:
            rep.label = std::isfinite(noise_log_mgf(spec, 1.0)) ? RegimeLabel::positive_recurrent
                                                                 : RegimeLabel::null_recurrent;
            break;
        case Regime::neutral:
            rep.label = RegimeLabel::null_recurrent;
            // both growth families have ln f(x) = O(x) near 0 when ln f(0) = 0,
            // so f(x) = 1 + o(|ln x|^{-1-delta2}) holds
            if (!(max_finite_moment(spec) > 2.0)) {
                rep.caveats.emplace_back("E|Y|^{2+delta1} infinite: null-recurrence hypothesis fails");
            }
            break;
    }
    if (is_degenerate(spec)) {
        rep.caveats.emplace_back("degenerate noise: stochastic classification does not apply");
    }
    return rep;
}

/// sup{alpha >= 0 : E[e^{alpha Y}] < inf}.
inline double alpha0_of(const NoiseSpec& spec) { return alpha0_pos(spec); }

/// Survival-function exponent of the escape-from-extremes time, alpha0.
/// The mass function decays one power faster.
inline double predicted_extremes_tail(const NoiseSpec& spec) { return alpha0_of(spec); }

// ---------------------------------------------------------------------------
// Two species
// ---------------------------------------------------------------------------

enum class TwoSpeciesLabel { case1, case2, case3, conjectured_recurrent, degenerate };

inline std::string to_string(TwoSpeciesLabel l)
{
    switch (l) {
        case TwoSpeciesLabel::case1: return "case1";
        case TwoSpeciesLabel::case2: return "case2";
        case TwoSpeciesLabel::case3: return "case3";
        case TwoSpeciesLabel::conjectured_recurrent: return "conjectured_recurrent";
        case TwoSpeciesLabel::degenerate: return "degenerate";
    }
    return "?";
}

struct TwoSpeciesCase
{
    TwoSpeciesLabel label = TwoSpeciesLabel::degenerate;
    double m1 = 0.0;  // r1 a21 - r2 a11
    double m2 = 0.0;  // r1 a22 - r2 a12
    /// Escape functional that applies (cases 1-3 only).
    std::optional<TauForm> tau_form;
    /// Supremum of admissible eps for that functional; 0 when none applies.
    double eps_max = 0.0;
    bool transient() const
    {
        return label == TwoSpeciesLabel::case1 || label == TwoSpeciesLabel::case2 ||
               label == TwoSpeciesLabel::case3;
    }
};

inline TwoSpeciesCase classify_two_species(const TwoSpeciesModel& m)
{
    if (!(m.r1 > 0) || !(m.r2 > 0)) {
        throw std::invalid_argument("classify_two_species: r1 and r2 must be > 0");
    }
    TwoSpeciesCase out;
    out.m1 = m.r1 * m.a21 - m.r2 * m.a11;
    out.m2 = m.r1 * m.a22 - m.r2 * m.a12;
    if (m.r1 == m.r2 || out.m1 == 0 || out.m2 == 0) {
        out.label = TwoSpeciesLabel::degenerate;
        return out;
    }
    if (out.m1 > 0 && out.m2 > 0) {
        out.label = TwoSpeciesLabel::case1;
    } else if (out.m1 > 0 && out.m2 < 0) {
        out.label = TwoSpeciesLabel::case2;
    } else if (out.m1 < 0 && out.m2 < 0) {
        out.label = TwoSpeciesLabel::case3;
    } else {
        out.label = TwoSpeciesLabel::conjectured_recurrent;
        return out;
    }
    const bool first = out.label == TwoSpeciesLabel::case1 ||
                       (out.label == TwoSpeciesLabel::case2 && m.r2 < m.r1);
    out.tau_form = first ? TauForm::first : TauForm::second;
    // (r1 - eps) a21 - r2 a11 > 0  <=>  eps < m1 / a21
    // (r1 + eps) a22 - r2 a12 < 0  <=>  eps < -m2 / a22
    out.eps_max = first ? out.m1 / m.a21 : -out.m2 / m.a22;
    return out;
}

}  // namespace ricker
