// config.hpp
//
// Experiment configuration: JSON surface syntax, validation that reports every
// problem at once, a canonical form for hashing, and the shipped presets.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ricker/dynamics.hpp"
#include "ricker/hitting.hpp"
#include "ricker/io.hpp"
#include "ricker/noise.hpp"
#include "ricker/theory.hpp"

namespace ricker {

using Json = nlohmann::ordered_json;

struct EstimatorOptions
{
    std::optional<std::size_t> hill_k;  // floor(sqrt(n_uncensored)) when empty
    std::optional<std::pair<std::int64_t, std::int64_t>> fit_window;  // exponential-rate window
    /// Survival bound checks and fit windows only use n with at least this
    /// many surviving trajectories.
    double min_survivors = 10.0;
};

/// A one-species exit time observed inside a two-species run.
struct SpeciesCheck
{
    std::string name;
    int species = 1;
    Region region = region::Rarity{0.1};
    double x1 = 1.0;
    double x2 = 1.0;
};

enum class ScenarioKind { single, two_species };

struct ExperimentConfig
{
    std::string scenario_id = "scenario";
    ScenarioKind kind = ScenarioKind::single;

    // one species
    GrowthModel model = growth::Ricker{1.0, 1.0};
    NoiseSpec noise = noise::Gaussian{1.0};
    Region region = region::Rarity{0.1};
    std::vector<double> x0{0.01};

    // two species
    TwoSpeciesModel two;
    double x0_1 = 1.0;
    double x0_2 = 0.1;
    TauSpec tau;
    std::vector<SpeciesCheck> species_checks;

    std::int64_t horizon = 100000;
    std::size_t n_traj = 10000;
    std::uint64_t master_seed = 1;
    double log_floor = kDefaultLogFloor;
    EstimatorOptions estimator;
    std::optional<double> eps0;
    std::optional<TheoremId> theorem;

    // not part of the experiment identity
    std::string output_dir;
    unsigned workers = 1;
};

// ---------------------------------------------------------------------------
// JSON <-> types
// ---------------------------------------------------------------------------

namespace detail {

inline Json number(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return io::format_double(v);
}

struct ParseContext
{
    std::vector<std::string> errors;

    void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }
};

inline void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& path,
                       ParseContext& ctx)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) {
            ok = ok || it.key() == a;
        }
        if (!ok) {
            ctx.error(path, "unknown key \"" + it.key() + "\"");
        }
    }
}

inline std::optional<double> read_number(const Json& obj, const char* key, const std::string& path,
                                         ParseContext& ctx, std::optional<double> fallback = std::nullopt)
{
    if (!obj.contains(key)) {
        if (!fallback) {
            ctx.error(path, std::string("missing \"") + key + "\"");
        }
        return fallback;
    }
    const Json& v = obj.at(key);
    if (!v.is_number()) {
        ctx.error(path + "." + key, "must be a number");
        return std::nullopt;
    }
    return v.get<double>();
}

inline std::optional<std::int64_t> read_integer(const Json& obj, const char* key, const std::string& path,
                                                ParseContext& ctx, std::int64_t fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    const Json& v = obj.at(key);
    if (v.is_number_integer()) {
        return v.get<std::int64_t>();
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d) && std::abs(d) < 9.0e15) {
            return static_cast<std::int64_t>(d);
        }
    }
    ctx.error(path + "." + key, "must be an integer");
    return std::nullopt;
}

inline std::string read_type(const Json& obj, const std::string& path, ParseContext& ctx)
{
    if (!obj.is_object()) {
        ctx.error(path, "must be an object");
        return {};
    }
    if (!obj.contains("type") || !obj.at("type").is_string()) {
        ctx.error(path, "missing string \"type\"");
        return {};
    }
    return obj.at("type").get<std::string>();
}

inline std::optional<NoiseSpec> parse_noise(const Json& j, const std::string& path, ParseContext& ctx)
{
    const std::string type = read_type(j, path, ctx);
    if (type.empty()) {
        return std::nullopt;
    }
    std::optional<NoiseSpec> out;
    if (type == "gaussian") {
        check_keys(j, {"type", "sigma"}, path, ctx);
        if (auto s = read_number(j, "sigma", path, ctx)) {
            out = noise::Gaussian{*s};
        }
    } else if (type == "shifted_exponential") {
        check_keys(j, {"type", "rate"}, path, ctx);
        if (auto r = read_number(j, "rate", path, ctx)) {
            out = noise::ShiftedExponential{*r};
        }
    } else if (type == "centered_lognormal") {
        check_keys(j, {"type", "mu", "sigma"}, path, ctx);
        auto mu = read_number(j, "mu", path, ctx, 0.0);
        auto s = read_number(j, "sigma", path, ctx);
        if (mu && s) {
            out = noise::CenteredLogNormal{*mu, *s};
        }
    } else if (type == "symmetric_pareto") {
        check_keys(j, {"type", "tail_index", "scale"}, path, ctx);
        auto t = read_number(j, "tail_index", path, ctx);
        auto s = read_number(j, "scale", path, ctx, 1.0);
        if (t && s) {
            out = noise::SymmetricPareto{*t, *s};
        }
    } else if (type == "uniform") {
        check_keys(j, {"type", "half_width"}, path, ctx);
        if (auto h = read_number(j, "half_width", path, ctx)) {
            out = noise::UniformCentered{*h};
        }
    } else if (type == "dirac0") {
        check_keys(j, {"type"}, path, ctx);
        out = noise::Dirac0{};
    } else {
        ctx.error(path, "unknown noise type \"" + type + "\"");
        return std::nullopt;
    }
    if (out) {
        try {
            validate(*out);
        } catch (const std::invalid_argument& e) {
            ctx.error(path, e.what());
        }
    }
    return out;
}

inline Json noise_json(const NoiseSpec& spec)
{
    return std::visit(overloaded{
                          [](const noise::Gaussian& n) { return Json{{"type", "gaussian"}, {"sigma", n.sigma}}; },
                          [](const noise::ShiftedExponential& n) {
                              return Json{{"type", "shifted_exponential"}, {"rate", n.rate}};
                          },
                          [](const noise::CenteredLogNormal& n) {
                              return Json{{"type", "centered_lognormal"}, {"mu", n.mu}, {"sigma", n.sigma}};
                          },
                          [](const noise::SymmetricPareto& n) {
                              return Json{{"type", "symmetric_pareto"},
                                          {"tail_index", n.tail_index},
                                          {"scale", n.scale}};
                          },
                          [](const noise::UniformCentered& n) {
                              return Json{{"type", "uniform"}, {"half_width", n.half_width}};
                          },
                          [](const noise::Dirac0&) { return Json{{"type", "dirac0"}}; },
                      },
                      spec);
}

inline std::optional<Region> parse_region(const Json& j, const std::string& path, ParseContext& ctx)
{
    const std::string type = read_type(j, path, ctx);
    if (type.empty()) {
        return std::nullopt;
    }
    std::optional<Region> out;
    if (type == "rarity") {
        check_keys(j, {"type", "eps"}, path, ctx);
        if (auto e = read_number(j, "eps", path, ctx)) {
            out = region::Rarity{*e};
        }
    } else if (type == "commonness") {
        check_keys(j, {"type", "M"}, path, ctx);
        if (auto m = read_number(j, "M", path, ctx)) {
            out = region::Commonness{*m};
        }
    } else if (type == "medium_band" || type == "extremes") {
        check_keys(j, {"type", "eps", "M"}, path, ctx);
        auto e = read_number(j, "eps", path, ctx);
        auto m = read_number(j, "M", path, ctx);
        if (e && m) {
            out = type == "medium_band" ? Region{region::MediumBand{*e, *m}} : Region{region::Extremes{*e, *m}};
        }
    } else {
        ctx.error(path, "unknown region type \"" + type + "\"");
        return std::nullopt;
    }
    if (out) {
        try {
            validate(*out);
        } catch (const std::invalid_argument& e) {
            ctx.error(path, e.what());
        }
    }
    return out;
}

inline Json region_json(const Region& r)
{
    return std::visit(overloaded{
                          [](const region::Rarity& g) { return Json{{"type", "rarity"}, {"eps", g.eps}}; },
                          [](const region::Commonness& g) { return Json{{"type", "commonness"}, {"M", g.M}}; },
                          [](const region::MediumBand& g) {
                              return Json{{"type", "medium_band"}, {"eps", g.eps}, {"M", g.M}};
                          },
                          [](const region::Extremes& g) {
                              return Json{{"type", "extremes"}, {"eps", g.eps}, {"M", g.M}};
                          },
                      },
                      r);
}

inline Json model_json(const GrowthModel& m)
{
    return std::visit(overloaded{
                          [](const growth::Ricker& g) { return Json{{"type", "ricker"}, {"r", g.r}, {"a", g.a}}; },
                          [](const growth::PerturbedRicker& g) {
                              return Json{{"type", "perturbed_ricker"}, {"r", g.r}, {"a", g.a}, {"c", g.c}};
                          },
                      },
                      m);
}

inline std::string tau_form_name(TauForm f) { return f == TauForm::first ? "first" : "second"; }

}  // namespace detail

/// Infers the theorem a one-species scenario exercises from its region and
/// growth regime.
inline TheoremId default_theorem(const ExperimentConfig& c)
{
    if (c.kind == ScenarioKind::two_species) {
        return TheoremId::T6_1;
    }
    return std::visit(detail::overloaded{
                          [&](const region::Commonness&) {
                              return c.x0.size() > 1 ? TheoremId::T2_1a : TheoremId::T2_1b;
                          },
                          [](const region::MediumBand&) { return TheoremId::T2_2; },
                          [](const region::Extremes&) { return TheoremId::T4_2; },
                          [&](const region::Rarity&) {
                              switch (regime(c.model)) {
                                  case Regime::declining: return TheoremId::T3_1;
                                  case Regime::neutral: return TheoremId::T5_1;
                                  case Regime::growing: break;
                              }
                              return TheoremId::T4_1;
                          },
                      },
                      c.region);
}

inline TheoremId effective_theorem(const ExperimentConfig& c) { return c.theorem.value_or(default_theorem(c)); }

/// Canonical JSON of everything that determines the results. Output
/// directory and worker count are excluded.
inline Json config_to_json(const ExperimentConfig& c)
{
    Json j;
    j["scenario_id"] = c.scenario_id;
    j["kind"] = c.kind == ScenarioKind::single ? "single" : "two_species";
    if (c.kind == ScenarioKind::single) {
        j["model"] = detail::model_json(c.model);
        j["noise"] = detail::noise_json(c.noise);
        j["region"] = detail::region_json(c.region);
        j["x0"] = c.x0;
    } else {
        j["model"] = Json{{"type", "two_species"}, {"r1", c.two.r1}, {"r2", c.two.r2}, {"a11", c.two.a11},
                          {"a12", c.two.a12},      {"a21", c.two.a21}, {"a22", c.two.a22}};
        j["noise"] = Json::array({detail::noise_json(c.two.noise1), detail::noise_json(c.two.noise2)});
        j["x0"] = Json::array({c.x0_1, c.x0_2});
        j["tau"] = Json{{"form", detail::tau_form_name(c.tau.form)},
                        {"eps", c.tau.eps_margin},
                        {"threshold_M", c.tau.threshold_M}};
        Json checks = Json::array();
        for (const auto& s : c.species_checks) {
            checks.push_back(Json{{"name", s.name},
                                  {"species", s.species},
                                  {"region", detail::region_json(s.region)},
                                  {"x0", Json::array({s.x1, s.x2})}});
        }
        j["species_checks"] = checks;
    }
    j["horizon"] = c.horizon;
    j["n_traj"] = c.n_traj;
    j["master_seed"] = c.master_seed;
    j["log_floor"] = c.log_floor;
    Json est;
    est["hill_k"] = c.estimator.hill_k ? Json(*c.estimator.hill_k) : Json("auto");
    est["fit_window"] = c.estimator.fit_window
                            ? Json::array({c.estimator.fit_window->first, c.estimator.fit_window->second})
                            : Json("auto");
    est["min_survivors"] = c.estimator.min_survivors;
    j["estimator"] = est;
    j["theory"] = Json{{"eps0", c.eps0 ? Json(*c.eps0) : Json("auto")}};
    j["theorem"] = to_string(effective_theorem(c));
    return j;
}

inline std::string config_hash(const ExperimentConfig& c) { return io::hex64(io::fnv1a(config_to_json(c).dump())); }

/// Precondition checks that need the whole config. Returns every problem.
inline std::vector<std::string> validate_config(const ExperimentConfig& c)
{
    std::vector<std::string> errors;
    if (c.horizon < 1) {
        errors.emplace_back("horizon: must be >= 1");
    }
    if (c.n_traj < 1) {
        errors.emplace_back("n_traj: must be >= 1");
    }
    if (!(c.estimator.min_survivors >= 1.0)) {
        errors.emplace_back("estimator.min_survivors: must be >= 1");
    }
    if (c.estimator.fit_window && !(c.estimator.fit_window->first >= 0 &&
                                    c.estimator.fit_window->second > c.estimator.fit_window->first)) {
        errors.emplace_back("estimator.fit_window: need 0 <= lo < hi");
    }
    if (c.estimator.hill_k && *c.estimator.hill_k < 1) {
        errors.emplace_back("estimator.hill_k: must be >= 1");
    }
    const TheoremId th = effective_theorem(c);

    if (c.kind == ScenarioKind::single) {
        try {
            validate(c.model);
        } catch (const std::invalid_argument& e) {
            errors.emplace_back(std::string("model: ") + e.what());
        }
        if (c.x0.empty()) {
            errors.emplace_back("x0: at least one starting density required");
        }
        for (double x : c.x0) {
            try {
                check_start_inside(c.region, x);
            } catch (const std::invalid_argument& e) {
                errors.emplace_back("x0 = " + io::format_double(x) + ": " + e.what());
            }
        }
        const bool commonness = std::holds_alternative<region::Commonness>(c.region);
        const bool rarity = std::holds_alternative<region::Rarity>(c.region);
        const Regime reg = regime(c.model);
        auto need = [&](bool ok, const std::string& what) {
            if (!ok) {
                errors.push_back("theorem " + to_string(th) + ": " + what);
            }
        };
        switch (th) {
            case TheoremId::T2_1a:
            case TheoremId::T2_1b: need(commonness, "requires a commonness region"); break;
            case TheoremId::T2_2: need(std::holds_alternative<region::MediumBand>(c.region), "requires a medium_band region"); break;
            case TheoremId::T3_1:
                need(rarity, "requires a rarity region");
                need(reg == Regime::declining, "requires lambda < 1");
                break;
            case TheoremId::T4_1:
            case TheoremId::T4_1_exp:
                need(rarity, "requires a rarity region");
                need(reg == Regime::growing, "requires lambda > 1");
                if (rarity && reg == Regime::growing) {
                    const double eps = std::get<region::Rarity>(c.region).eps;
                    const double inf_lf = rarity_inf_log_growth(c.model, eps);
                    need(inf_lf > 0, "inf of ln f over [0, eps] is " + io::format_sig(inf_lf) + ", must be > 0");
                }
                break;
            case TheoremId::T4_2:
                need(std::holds_alternative<region::Extremes>(c.region), "requires an extremes region");
                need(reg == Regime::growing, "requires lambda > 1");
                break;
            case TheoremId::T5_1:
                need(rarity, "requires a rarity region");
                need(reg == Regime::neutral, "requires lambda = 1");
                break;
            case TheoremId::T6_1: need(false, "requires a two_species scenario"); break;
        }
        if (c.eps0 && rarity && !(*c.eps0 > std::get<region::Rarity>(c.region).eps)) {
            errors.emplace_back("theory.eps0: must exceed eps");
        }
        return errors;
    }

    try {
        validate(c.two);
    } catch (const std::invalid_argument& e) {
        errors.emplace_back(std::string("model: ") + e.what());
    }
    if (th != TheoremId::T6_1) {
        errors.push_back("theorem " + to_string(th) + ": not applicable to a two_species scenario");
    }
    if (!(c.x0_1 > 0) || !(c.x0_2 > 0)) {
        errors.emplace_back("x0: both densities must be > 0");
        return errors;
    }
    const LogPair start{LogState::from_density(c.x0_1), LogState::from_density(c.x0_2)};
    for (auto& e : tau_config_errors(c.two, c.tau, start)) {
        errors.push_back(std::move(e));
    }
    if (c.two.r1 > 0 && c.two.r2 > 0) {
        const auto cls = classify_two_species(c.two);
        if (!cls.transient()) {
            errors.push_back("two_species: case " + to_string(cls.label) + " has no escape functional");
        } else if (cls.tau_form != c.tau.form) {
            errors.push_back("tau: form " + detail::tau_form_name(c.tau.form) + " does not match " +
                             to_string(cls.label) + ", which uses form " + detail::tau_form_name(*cls.tau_form));
        }
    } else {
        errors.emplace_back("two_species: r1 and r2 must be > 0");
    }
    for (const auto& s : c.species_checks) {
        const std::string path = "species_checks." + s.name;
        if (s.species != 1 && s.species != 2) {
            errors.push_back(path + ": species must be 1 or 2");
            continue;
        }
        if (!(s.x1 > 0) || !(s.x2 > 0)) {
            errors.push_back(path + ": both densities must be > 0");
            continue;
        }
        const double x = s.species == 1 ? s.x1 : s.x2;
        if (!RegionTest(s.region).inside(std::log(x))) {
            errors.push_back(path + ": X0 must be inside the region");
        }
        for (auto& e : tau_config_errors(c.two, c.tau, {LogState::from_density(s.x1), LogState::from_density(s.x2)})) {
            errors.push_back(path + ": " + e);
        }
    }
    return errors;
}

struct ParseResult
{
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return config.has_value(); }
};

/// Parses and validates a JSON config. Missing optional fields take their
/// defaults (horizon 1e5, n_traj 1e4, Hill k auto).
inline ParseResult parse_config(const std::string& text)
{
    ParseResult result;
    detail::ParseContext ctx;
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        result.errors.push_back(std::string("parse error: ") + e.what());
        return result;
    }
    if (!j.is_object()) {
        result.errors.emplace_back("config must be a JSON object");
        return result;
    }
    detail::check_keys(j,
                       {"scenario_id", "kind", "model", "noise", "region", "x0", "tau", "species_checks", "horizon",
                        "n_traj", "master_seed", "log_floor", "estimator", "theory", "theorem", "output_dir",
                        "workers"},
                       "config", ctx);

    ExperimentConfig c;
    if (j.contains("scenario_id")) {
        if (j["scenario_id"].is_string()) {
            c.scenario_id = j["scenario_id"].get<std::string>();
        } else {
            ctx.error("scenario_id", "must be a string");
        }
    }
    const std::string kind = j.value("kind", std::string("single"));
    if (kind == "two_species") {
        c.kind = ScenarioKind::two_species;
    } else if (kind != "single") {
        ctx.error("kind", "must be \"single\" or \"two_species\"");
    }

    if (!j.contains("model")) {
        ctx.error("config", "missing \"model\"");
    } else if (c.kind == ScenarioKind::single) {
        const Json& m = j["model"];
        const std::string type = detail::read_type(m, "model", ctx);
        if (type == "ricker") {
            detail::check_keys(m, {"type", "r", "a"}, "model", ctx);
            auto r = detail::read_number(m, "r", "model", ctx);
            auto a = detail::read_number(m, "a", "model", ctx, 1.0);
            if (r && a) {
                c.model = growth::Ricker{*r, *a};
            }
        } else if (type == "perturbed_ricker") {
            detail::check_keys(m, {"type", "r", "a", "c"}, "model", ctx);
            auto r = detail::read_number(m, "r", "model", ctx);
            auto a = detail::read_number(m, "a", "model", ctx, 1.0);
            auto cc = detail::read_number(m, "c", "model", ctx, 0.0);
            if (r && a && cc) {
                c.model = growth::PerturbedRicker{*r, *a, *cc};
            }
        } else if (!type.empty()) {
            ctx.error("model", "unknown model type \"" + type + "\" for a single-species scenario");
        }
    } else {
        const Json& m = j["model"];
        const std::string type = detail::read_type(m, "model", ctx);
        if (type == "two_species") {
            detail::check_keys(m, {"type", "r1", "r2", "a11", "a12", "a21", "a22"}, "model", ctx);
            auto r1 = detail::read_number(m, "r1", "model", ctx);
            auto r2 = detail::read_number(m, "r2", "model", ctx);
            auto a11 = detail::read_number(m, "a11", "model", ctx, 1.0);
            auto a12 = detail::read_number(m, "a12", "model", ctx, 1.0);
            auto a21 = detail::read_number(m, "a21", "model", ctx, 1.0);
            auto a22 = detail::read_number(m, "a22", "model", ctx, 1.0);
            if (r1 && r2 && a11 && a12 && a21 && a22) {
                c.two.r1 = *r1;
                c.two.r2 = *r2;
                c.two.a11 = *a11;
                c.two.a12 = *a12;
                c.two.a21 = *a21;
                c.two.a22 = *a22;
            }
        } else if (!type.empty()) {
            ctx.error("model", "a two_species scenario needs model type \"two_species\"");
        }
    }

    if (!j.contains("noise")) {
        ctx.error("config", "missing \"noise\"");
    } else if (c.kind == ScenarioKind::single) {
        if (auto n = detail::parse_noise(j["noise"], "noise", ctx)) {
            c.noise = *n;
        }
    } else {
        const Json& n = j["noise"];
        if (n.is_array()) {
            if (n.size() != 2) {
                ctx.error("noise", "two_species needs one noise object or a list of two");
            } else {
                auto n1 = detail::parse_noise(n[0], "noise[0]", ctx);
                auto n2 = detail::parse_noise(n[1], "noise[1]", ctx);
                if (n1 && n2) {
                    c.two.noise1 = *n1;
                    c.two.noise2 = *n2;
                }
            }
        } else if (auto one = detail::parse_noise(n, "noise", ctx)) {
            c.two.noise1 = *one;
            c.two.noise2 = *one;
        }
    }

    if (c.kind == ScenarioKind::single) {
        if (!j.contains("region")) {
            ctx.error("config", "missing \"region\"");
        } else if (auto r = detail::parse_region(j["region"], "region", ctx)) {
            c.region = *r;
        }
        if (!j.contains("x0")) {
            ctx.error("config", "missing \"x0\"");
        } else if (j["x0"].is_number()) {
            c.x0 = {j["x0"].get<double>()};
        } else if (j["x0"].is_array() && !j["x0"].empty() &&
                   std::all_of(j["x0"].begin(), j["x0"].end(), [](const Json& v) { return v.is_number(); })) {
            c.x0 = j["x0"].get<std::vector<double>>();
        } else {
            ctx.error("x0", "must be a number or a non-empty list of numbers");
        }
        for (const char* key : {"tau", "species_checks"}) {
            if (j.contains(key)) {
                ctx.error(key, "only valid for two_species scenarios");
            }
        }
    } else {
        if (j.contains("region")) {
            ctx.error("region", "two_species scenarios use tau and species_checks instead");
        }
        const Json x = j.value("x0", Json());
        if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number()) {
            c.x0_1 = x[0].get<double>();
            c.x0_2 = x[1].get<double>();
        } else {
            ctx.error("x0", "two_species needs [X0_1, X0_2]");
        }
        if (!j.contains("tau")) {
            ctx.error("config", "missing \"tau\"");
        } else {
            const Json& t = j["tau"];
            if (!t.is_object()) {
                ctx.error("tau", "must be an object");
            } else {
                detail::check_keys(t, {"form", "eps", "threshold_M"}, "tau", ctx);
                const std::string form = t.value("form", std::string("first"));
                if (form == "first") {
                    c.tau.form = TauForm::first;
                } else if (form == "second") {
                    c.tau.form = TauForm::second;
                } else {
                    ctx.error("tau.form", "must be \"first\" or \"second\"");
                }
                if (auto e = detail::read_number(t, "eps", "tau", ctx)) {
                    c.tau.eps_margin = *e;
                }
                if (auto m = detail::read_number(t, "threshold_M", "tau", ctx, 0.0)) {
                    c.tau.threshold_M = *m;
                }
            }
        }
        if (j.contains("species_checks")) {
            const Json& list = j["species_checks"];
            if (!list.is_array()) {
                ctx.error("species_checks", "must be a list");
            } else {
                for (std::size_t i = 0; i < list.size(); ++i) {
                    const std::string path = "species_checks[" + std::to_string(i) + "]";
                    const Json& s = list[i];
                    if (!s.is_object()) {
                        ctx.error(path, "must be an object");
                        continue;
                    }
                    detail::check_keys(s, {"name", "species", "region", "x0"}, path, ctx);
                    SpeciesCheck chk;
                    chk.name = s.value("name", "check" + std::to_string(i));
                    chk.species = s.value("species", 1);
                    auto r = s.contains("region") ? detail::parse_region(s["region"], path + ".region", ctx)
                                                  : std::nullopt;
                    if (!s.contains("region")) {
                        ctx.error(path, "missing \"region\"");
                    }
                    const Json x = s.value("x0", Json());
                    if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number()) {
                        chk.x1 = x[0].get<double>();
                        chk.x2 = x[1].get<double>();
                    } else {
                        ctx.error(path + ".x0", "needs [X0_1, X0_2]");
                    }
                    if (r) {
                        chk.region = *r;
                        c.species_checks.push_back(chk);
                    }
                }
            }
        }
    }

    if (auto h = detail::read_integer(j, "horizon", "config", ctx, c.horizon)) {
        c.horizon = *h;
    }
    if (auto n = detail::read_integer(j, "n_traj", "config", ctx, static_cast<std::int64_t>(c.n_traj))) {
        if (*n < 1) {
            ctx.error("n_traj", "must be >= 1");
        } else {
            c.n_traj = static_cast<std::size_t>(*n);
        }
    }
    if (j.contains("master_seed")) {
        if (j["master_seed"].is_number_unsigned()) {
            c.master_seed = j["master_seed"].get<std::uint64_t>();
        } else {
            ctx.error("master_seed", "must be a non-negative integer");
        }
    }
    if (auto f = detail::read_number(j, "log_floor", "config", ctx, c.log_floor)) {
        c.log_floor = *f;
    }
    if (j.contains("estimator")) {
        const Json& e = j["estimator"];
        if (!e.is_object()) {
            ctx.error("estimator", "must be an object");
        } else {
            detail::check_keys(e, {"hill_k", "fit_window", "min_survivors"}, "estimator", ctx);
            if (e.contains("hill_k") && !(e["hill_k"].is_string() && e["hill_k"] == "auto")) {
                if (e["hill_k"].is_number_unsigned()) {
                    c.estimator.hill_k = e["hill_k"].get<std::size_t>();
                } else {
                    ctx.error("estimator.hill_k", "must be \"auto\" or a positive integer");
                }
            }
            if (e.contains("fit_window") && !(e["fit_window"].is_string() && e["fit_window"] == "auto")) {
                const Json& w = e["fit_window"];
                if (w.is_array() && w.size() == 2 && w[0].is_number_integer() && w[1].is_number_integer()) {
                    c.estimator.fit_window = std::pair{w[0].get<std::int64_t>(), w[1].get<std::int64_t>()};
                } else {
                    ctx.error("estimator.fit_window", "must be \"auto\" or [lo, hi]");
                }
            }
            if (auto m = detail::read_number(e, "min_survivors", "estimator", ctx, c.estimator.min_survivors)) {
                c.estimator.min_survivors = *m;
            }
        }
    }
    if (j.contains("theory")) {
        const Json& t = j["theory"];
        if (!t.is_object()) {
            ctx.error("theory", "must be an object");
        } else {
            detail::check_keys(t, {"eps0"}, "theory", ctx);
            if (t.contains("eps0") && !(t["eps0"].is_string() && t["eps0"] == "auto")) {
                if (t["eps0"].is_number()) {
                    c.eps0 = t["eps0"].get<double>();
                } else {
                    ctx.error("theory.eps0", "must be \"auto\" or a number");
                }
            }
        }
    }
    if (j.contains("theorem")) {
        try {
            c.theorem = theorem_from_string(j["theorem"].get<std::string>());
        } catch (const std::exception& e) {
            ctx.error("theorem", e.what());
        }
    }
    if (j.contains("output_dir")) {
        if (j["output_dir"].is_string()) {
            c.output_dir = j["output_dir"].get<std::string>();
        } else {
            ctx.error("output_dir", "must be a string");
        }
    }
    if (auto w = detail::read_integer(j, "workers", "config", ctx, 1)) {
        if (*w < 1 || *w > 1024) {
            ctx.error("workers", "must be in [1, 1024]");
        } else {
            c.workers = static_cast<unsigned>(*w);
        }
    }

    // cross-field checks only make sense once the pieces parsed
    if (ctx.errors.empty()) {
        for (auto& e : validate_config(c)) {
            ctx.errors.push_back(std::move(e));
        }
    }
    result.errors = std::move(ctx.errors);
    if (result.errors.empty()) {
        result.config = std::move(c);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

inline std::vector<std::string> preset_names()
{
    return {"T2.1a",       "T2.1b",       "T2.2",       "T3.1",        "T4.1",
            "T4.2",        "T4.2-gaussian", "T5.1",     "T5.1-pareto", "T6.1-case1",
            "T6.1-case2",  "T6.1-case3"};
}

inline ExperimentConfig preset(const std::string& name)
{
    ExperimentConfig c;
    c.scenario_id = name;
    c.master_seed = 20240611;
    c.model = growth::Ricker{1.0, 1.0};
    c.noise = noise::Gaussian{1.0};
    if (name == "T2.1a") {
        c.region = region::Commonness{10.0};
        c.x0 = {1e3, 1e6};
        c.n_traj = 100000;
        c.theorem = TheoremId::T2_1a;
    } else if (name == "T2.1b") {
        c.region = region::Commonness{3.0};
        c.x0 = {10.0};
        c.n_traj = 1000000;
        c.horizon = 200;
        c.theorem = TheoremId::T2_1b;
    } else if (name == "T2.2") {
        c.region = region::MediumBand{0.5, 2.0};
        c.x0 = {1.0};
        c.n_traj = 1000000;
        c.horizon = 10000;
        c.theorem = TheoremId::T2_2;
    } else if (name == "T3.1") {
        c.model = growth::Ricker{-0.5, 1.0};
        c.region = region::Rarity{0.1};
        c.x0 = {0.05};
        c.n_traj = 10000;
        c.horizon = 10000;
        c.theorem = TheoremId::T3_1;
    } else if (name == "T4.1") {
        c.region = region::Rarity{0.1};
        c.x0 = {1e-3, 1e-6, 1e-9};
        c.n_traj = 100000;
        c.eps0 = 0.2;
        c.theorem = TheoremId::T4_1;
    } else if (name == "T4.2" || name == "T4.2-gaussian") {
        c.region = region::Extremes{0.1, 10.0};
        c.x0 = {20.0};
        c.n_traj = 1000000;
        c.horizon = 1000000;
        c.noise = name == "T4.2" ? NoiseSpec{noise::ShiftedExponential{2.0}} : NoiseSpec{noise::Gaussian{1.0}};
        c.theorem = TheoremId::T4_2;
    } else if (name == "T5.1" || name == "T5.1-pareto") {
        c.model = growth::Ricker{0.0, 1.0};
        c.region = region::Rarity{0.01};
        c.x0 = {0.005};
        c.n_traj = 100000;
        c.horizon = 100000;
        c.noise = name == "T5.1" ? NoiseSpec{noise::Gaussian{1.0}} : NoiseSpec{noise::SymmetricPareto{2.5, 1.0}};
        c.theorem = TheoremId::T5_1;
    } else if (name == "T6.1-case1" || name == "T6.1-case2" || name == "T6.1-case3") {
        c.kind = ScenarioKind::two_species;
        c.theorem = TheoremId::T6_1;
        c.n_traj = 10000;
        c.horizon = 10000;
        c.two = TwoSpeciesModel{};
        c.two.noise1 = noise::Gaussian{0.5};
        c.two.noise2 = noise::Gaussian{0.5};
        c.tau = TauSpec{TauForm::first, 0.5, 0.0};
        int sp = 1;
        if (name == "T6.1-case2") {
            c.two.a12 = 3.0;
        } else if (name == "T6.1-case3") {
            c.two.r1 = 1.0;
            c.two.r2 = 2.0;
            c.tau.form = TauForm::second;
            sp = 2;
        }
        // starts for the surviving species: high, low, and outside the band;
        // the other species is put where the escape functional is well past
        // its threshold
        auto pair = [&](double mine, double other) {
            return sp == 1 ? std::pair{mine, other} : std::pair{other, mine};
        };
        const double other_hi = 0.1;
        const double other_lo = 0.001;
        auto add = [&](const char* label, Region r, std::pair<double, double> x) {
            c.species_checks.push_back(SpeciesCheck{label, sp, r, x.first, x.second});
        };
        add("T_L", region::Commonness{3.0}, pair(6.0, other_hi));
        add("T_eps", region::Rarity{0.05}, pair(0.01, other_lo));
        add("T_band_exit", region::Extremes{0.05, 3.0}, pair(6.0, other_hi));
        // X0 is the rare start, so the tau^M sample comes with the T_eps check
        std::tie(c.x0_1, c.x0_2) = pair(0.01, other_lo);
    } else {
        throw std::invalid_argument("unknown preset \"" + name + "\"");
    }
    return c;
}

}  // namespace ricker
