// hitting.hpp
//
// Exit times of the chain from rarity, commonness, medium abundance and the
// extremes, plus the two-species escape time tau^M. All observations are
// censored at a mandatory horizon.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "ricker/dynamics.hpp"
#include "ricker/noise.hpp"
#include "ricker/rng.hpp"

namespace ricker {

namespace region {

/// ]0, eps[ : exit when X >= eps.
struct Rarity
{
    double eps = 0.1;
};

/// ]M, inf[ : exit when X <= M.
struct Commonness
{
    double M = 10.0;
};

/// [eps, M] : exit when X < eps or X > M.
struct MediumBand
{
    double eps = 0.1;
    double M = 10.0;
};

/// ]0, eps[ U ]M, inf[ : exit when eps <= X <= M.
struct Extremes
{
    double eps = 0.1;
    double M = 10.0;
};

}  // namespace region

using Region = std::variant<region::Rarity, region::Commonness, region::MediumBand, region::Extremes>;

inline std::string region_name(const Region& r)
{
    return std::visit(detail::overloaded{
                          [](const region::Rarity&) { return std::string{"rarity"}; },
                          [](const region::Commonness&) { return std::string{"commonness"}; },
                          [](const region::MediumBand&) { return std::string{"medium_band"}; },
                          [](const region::Extremes&) { return std::string{"extremes"}; },
                      },
                      r);
}

inline void validate(const Region& r)
{
    auto positive = [](double v) { return v > 0 && std::isfinite(v); };
    std::visit(detail::overloaded{
                   [&](const region::Rarity& g) {
                       if (!positive(g.eps)) {
                           throw std::invalid_argument("rarity: eps must be > 0");
                       }
                   },
                   [&](const region::Commonness& g) {
                       if (!positive(g.M)) {
                           throw std::invalid_argument("commonness: M must be > 0");
                       }
                   },
                   [&](const auto& g) {
                       if (!positive(g.eps) || !positive(g.M) || !(g.eps < g.M)) {
                           throw std::invalid_argument("band: need 0 < eps < M");
                       }
                   },
               },
               r);
}

/// Membership of a log state, compared against log thresholds.
class RegionTest
{
  public:
    explicit RegionTest(const Region& r)
    {
        std::visit(detail::overloaded{
                       [&](const region::Rarity& g) {
                           kind_ = Kind::rarity;
                           log_eps_ = std::log(g.eps);
                       },
                       [&](const region::Commonness& g) {
                           kind_ = Kind::commonness;
                           log_m_ = std::log(g.M);
                       },
                       [&](const region::MediumBand& g) {
                           kind_ = Kind::band;
                           log_eps_ = std::log(g.eps);
                           log_m_ = std::log(g.M);
                       },
                       [&](const region::Extremes& g) {
                           kind_ = Kind::extremes;
                           log_eps_ = std::log(g.eps);
                           log_m_ = std::log(g.M);
                       },
                   },
                   r);
    }

    bool inside(double log_x) const noexcept
    {
        switch (kind_) {
            case Kind::rarity: return log_x < log_eps_;
            case Kind::commonness: return log_x > log_m_;
            case Kind::band: return log_x >= log_eps_ && log_x <= log_m_;
            case Kind::extremes: return log_x < log_eps_ || log_x > log_m_;
        }
        return false;
    }

  private:
    enum class Kind { rarity, commonness, band, extremes };
    Kind kind_ = Kind::rarity;
    double log_eps_ = 0.0;
    double log_m_ = 0.0;
};

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

enum class OutcomeKind { hit, censored, extinct };

inline std::string to_string(OutcomeKind k)
{
    switch (k) {
        case OutcomeKind::hit: return "hit";
        case OutcomeKind::censored: return "censored";
        case OutcomeKind::extinct: return "extinct";
    }
    return "?";
}

inline OutcomeKind outcome_kind_from_string(const std::string& s)
{
    if (s == "hit") {
        return OutcomeKind::hit;
    }
    if (s == "censored") {
        return OutcomeKind::censored;
    }
    if (s == "extinct") {
        return OutcomeKind::extinct;
    }
    throw std::invalid_argument("unknown outcome: " + s);
}

/// Hit{n >= 1}, Censored{horizon} or NumericallyExtinct{n}. `final_log_x` is
/// the last simulated log state (the exit state for hits).
struct HittingOutcome
{
    OutcomeKind kind = OutcomeKind::censored;
    std::int64_t n = 0;
    double final_log_x = 0.0;

    static HittingOutcome hit(std::int64_t n, double log_x = 0.0) { return {OutcomeKind::hit, n, log_x}; }
    static HittingOutcome censored(std::int64_t horizon, double log_x = 0.0)
    {
        return {OutcomeKind::censored, horizon, log_x};
    }
    static HittingOutcome extinct(std::int64_t n, double log_x = -kInf)
    {
        return {OutcomeKind::extinct, n, log_x};
    }

    bool is_hit() const { return kind == OutcomeKind::hit; }

    friend bool operator==(const HittingOutcome& a, const HittingOutcome& b)
    {
        return a.kind == b.kind && a.n == b.n;
    }
};

/// A batch of outcomes sharing one censoring horizon.
struct SampleSet
{
    std::vector<HittingOutcome> outcomes;
    std::int64_t horizon = 0;

    std::size_t size() const { return outcomes.size(); }
    std::size_t count(OutcomeKind k) const
    {
        return static_cast<std::size_t>(std::count_if(
            outcomes.begin(), outcomes.end(), [k](const HittingOutcome& o) { return o.kind == k; }));
    }
};

struct SimulationLimits
{
    std::int64_t horizon = 100000;
    double log_floor = kDefaultLogFloor;
};

// ---------------------------------------------------------------------------
// One-species sampler
// ---------------------------------------------------------------------------

inline void check_start_inside(const Region& region, double x0)
{
    if (!(x0 > 0) || !std::isfinite(x0)) {
        throw std::invalid_argument("X0 must be a positive finite density");
    }
    if (!RegionTest(region).inside(std::log(x0))) {
        throw std::invalid_argument("X0 must be inside the region");
    }
}

/// First n >= 1 with X_n outside `region`, or Censored at the horizon.
inline HittingOutcome sample_hitting_time(const GrowthModel& model, const NoiseSpec& spec, double x0,
                                          const Region& region, SimulationLimits limits,
                                          std::uint64_t seed, std::uint64_t stream)
{
    if (limits.horizon < 1) {
        throw std::invalid_argument("horizon must be >= 1");
    }
    check_start_inside(region, x0);
    const RegionTest test(region);
    RngStream rng(seed, stream);
    LogState state = LogState::from_density(x0);
    for (std::int64_t n = 1; n <= limits.horizon; ++n) {
        state = step_log(model, state, sample_noise(spec, rng));
        if (state.extinct(limits.log_floor)) {
            return HittingOutcome::extinct(n, state.value);
        }
        if (!test.inside(state.value)) {
            return HittingOutcome::hit(n, state.value);
        }
    }
    return HittingOutcome::censored(limits.horizon, state.value);
}

/// Runs body(i) for i in [0, n) on `workers` threads. Each index is visited
/// exactly once; results must be written to slot i by the caller.
template <class Body>
void parallel_for_index(std::size_t n, unsigned workers, Body&& body)
{
    workers = std::max(1u, workers);
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    constexpr std::size_t kChunk = 256;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= n) {
                return;
            }
            const std::size_t end = std::min(n, begin + kChunk);
            for (std::size_t i = begin; i < end; ++i) {
                body(i);
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
}

/// n_traj independent outcomes; trajectory i always uses stream i.
inline SampleSet batch_hitting(const GrowthModel& model, const NoiseSpec& spec, double x0,
                               const Region& region, SimulationLimits limits, std::size_t n_traj,
                               std::uint64_t master_seed, unsigned workers = 1)
{
    if (n_traj < 1) {
        throw std::invalid_argument("n_traj must be >= 1");
    }
    if (limits.horizon < 1) {
        throw std::invalid_argument("horizon must be >= 1");
    }
    check_start_inside(region, x0);
    SampleSet out;
    out.horizon = limits.horizon;
    out.outcomes.resize(n_traj);
    parallel_for_index(n_traj, workers, [&](std::size_t i) {
        out.outcomes[i] = sample_hitting_time(model, spec, x0, region, limits, master_seed, i);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Two-species escape time
// ---------------------------------------------------------------------------

/// Which escape functional applies. Form 1 tracks
/// r2 ln X^1 - (r1 - eps) ln X^2 falling below M; form 2 tracks
/// r2 ln X^1 - (r1 + eps) ln X^2 rising above M.
enum class TauForm { first, second };

struct TauSpec
{
    TauForm form = TauForm::first;
    double eps_margin = 0.5;
    double threshold_M = 0.0;
};

inline double tau_functional(const TwoSpeciesModel& m, const TauSpec& tau, LogPair s)
{
    const double coef = tau.form == TauForm::first ? m.r1 - tau.eps_margin : m.r1 + tau.eps_margin;
    return m.r2 * s.first.value - coef * s.second.value;
}

/// The margin that must be > 0 (form 1) or < 0 (form 2) for tau^M to be
/// defined with this eps.
inline double tau_margin(const TwoSpeciesModel& m, const TauSpec& tau)
{
    return tau.form == TauForm::first ? (m.r1 - tau.eps_margin) * m.a21 - m.r2 * m.a11
                                      : (m.r1 + tau.eps_margin) * m.a22 - m.r2 * m.a12;
}

/// Collects every violated precondition; empty means valid.
inline std::vector<std::string> tau_config_errors(const TwoSpeciesModel& m, const TauSpec& tau,
                                                  LogPair start)
{
    std::vector<std::string> errors;
    if (!(tau.eps_margin > 0) || !std::isfinite(tau.eps_margin)) {
        errors.emplace_back("tau: eps_margin must be > 0");
    }
    const double margin = tau_margin(m, tau);
    if (tau.form == TauForm::first && !(margin > 0)) {
        errors.push_back("tau: margin (r1 - eps)*a21 - r2*a11 = " + std::to_string(margin) +
                         " must be > 0");
    }
    if (tau.form == TauForm::second && !(margin < 0)) {
        errors.push_back("tau: margin (r1 + eps)*a22 - r2*a12 = " + std::to_string(margin) +
                         " must be < 0");
    }
    const double f0 = tau_functional(m, tau, start);
    if (tau.form == TauForm::first && !(f0 > tau.threshold_M)) {
        errors.push_back("tau: functional at X0 = " + std::to_string(f0) +
                         " must start above threshold_M");
    }
    if (tau.form == TauForm::second && !(f0 < tau.threshold_M)) {
        errors.push_back("tau: functional at X0 = " + std::to_string(f0) +
                         " must start below threshold_M");
    }
    return errors;
}

inline bool tau_crossed(const TwoSpeciesModel& m, const TauSpec& tau, LogPair s)
{
    const double f = tau_functional(m, tau, s);
    return tau.form == TauForm::first ? f < tau.threshold_M : f > tau.threshold_M;
}

/// tau^M alongside the exit time of one species from `region`, both observed
/// on the same path.
struct JointOutcome
{
    HittingOutcome tau;
    HittingOutcome species;
};

namespace detail {

inline double pick(const LogPair& s, int species)
{
    return species == 1 ? s.first.value : s.second.value;
}

}  // namespace detail

/// When to stop a joint trajectory. With `species`, tau^M is only observed
/// up to the species exit; an unresolved tau^M is then censored at that step.
enum class JointStop { both, species };

/// Simulates until tau^M and (when a region is given) the species exit time
/// are both resolved or the horizon is reached.
inline JointOutcome sample_two_species_joint(const TwoSpeciesModel& model, LogPair start,
                                             const TauSpec& tau, int species,
                                             const Region* region, SimulationLimits limits,
                                             std::uint64_t seed, std::uint64_t stream,
                                             JointStop stop = JointStop::both)
{
    if (limits.horizon < 1) {
        throw std::invalid_argument("horizon must be >= 1");
    }
    if (auto errs = tau_config_errors(model, tau, start); !errs.empty()) {
        throw std::invalid_argument(errs.front());
    }
    if (species != 1 && species != 2) {
        throw std::invalid_argument("species must be 1 or 2");
    }
    std::optional<RegionTest> test;
    if (region != nullptr) {
        test.emplace(*region);
        if (!test->inside(detail::pick(start, species))) {
            throw std::invalid_argument("X0 must be inside the region");
        }
    }
    RngStream rng(seed, stream);
    JointOutcome out;
    bool tau_done = false;
    bool species_done = region == nullptr;
    LogPair state = start;
    for (std::int64_t n = 1; n <= limits.horizon; ++n) {
        state = step2_random(model, state, rng);
        const bool dead = state.first.extinct(limits.log_floor) || state.second.extinct(limits.log_floor);
        if (!tau_done) {
            if (tau_crossed(model, tau, state)) {
                out.tau = HittingOutcome::hit(n, tau_functional(model, tau, state));
                tau_done = true;
            } else if (dead) {
                out.tau = HittingOutcome::extinct(n);
                tau_done = true;
            }
        }
        if (!species_done) {
            const double l = detail::pick(state, species);
            if (!test->inside(l)) {
                out.species = HittingOutcome::hit(n, l);
                species_done = true;
            } else if (dead) {
                out.species = HittingOutcome::extinct(n, l);
                species_done = true;
            }
        }
        if (stop == JointStop::species && species_done && !tau_done) {
            out.tau = HittingOutcome::censored(n, tau_functional(model, tau, state));
            return out;
        }
        if ((tau_done && species_done) || dead) {
            return out;
        }
    }
    if (!tau_done) {
        out.tau = HittingOutcome::censored(limits.horizon, tau_functional(model, tau, state));
    }
    if (!species_done) {
        out.species = HittingOutcome::censored(limits.horizon, detail::pick(state, species));
    }
    return out;
}

inline HittingOutcome sample_tau_M(const TwoSpeciesModel& model, LogPair start, const TauSpec& tau,
                                   SimulationLimits limits, std::uint64_t seed, std::uint64_t stream)
{
    return sample_two_species_joint(model, start, tau, 1, nullptr, limits, seed, stream).tau;
}

struct JointSampleSet
{
    SampleSet tau;
    SampleSet species;
};

inline JointSampleSet batch_two_species(const TwoSpeciesModel& model, LogPair start,
                                        const TauSpec& tau, int species, const Region* region,
                                        SimulationLimits limits, std::size_t n_traj,
                                        std::uint64_t master_seed, unsigned workers = 1,
                                        JointStop stop = JointStop::both)
{
    if (n_traj < 1) {
        throw std::invalid_argument("n_traj must be >= 1");
    }
    JointSampleSet out;
    out.tau.horizon = limits.horizon;
    out.species.horizon = limits.horizon;
    out.tau.outcomes.resize(n_traj);
    out.species.outcomes.resize(region != nullptr ? n_traj : 0);
    // surface configuration errors before spawning workers
    (void)sample_two_species_joint(model, start, tau, species, region, SimulationLimits{1, limits.log_floor},
                                   master_seed, 0);
    parallel_for_index(n_traj, workers, [&](std::size_t i) {
        auto joint = sample_two_species_joint(model, start, tau, species, region, limits, master_seed, i, stop);
        out.tau.outcomes[i] = joint.tau;
        if (region != nullptr) {
            out.species.outcomes[i] = joint.species;
        }
    });
    return out;
}

}  // namespace ricker
