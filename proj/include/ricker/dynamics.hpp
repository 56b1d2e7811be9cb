// dynamics.hpp
//
// The noisy Ricker chain X_{n+1} = X_n f(X_n) e^{Y_n} and its two-species
// competition extension, stepped in log space (L = ln X) so heavy-tailed
// noise never overflows the state.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ricker/noise.hpp"
#include "ricker/rng.hpp"

namespace ricker {

namespace growth {

/// ln f(x) = r - a x.
struct Ricker
{
    double r = 1.0;
    double a = 1.0;
};

/// ln f(x) = r - a x + c / (1 + x). Same large-x behaviour as Ricker.
struct PerturbedRicker
{
    double r = 1.0;
    double a = 1.0;
    double c = 0.0;
};

}  // namespace growth

using GrowthModel = std::variant<growth::Ricker, growth::PerturbedRicker>;

enum class Regime { declining, neutral, growing };

inline std::string to_string(Regime r)
{
    switch (r) {
        case Regime::declining: return "declining";
        case Regime::neutral: return "neutral";
        case Regime::growing: return "growing";
    }
    return "?";
}

inline double large_x_rate(const GrowthModel& m)
{
    return std::visit([](const auto& g) { return g.a; }, m);
}

inline double large_x_intercept(const GrowthModel& m)
{
    return std::visit([](const auto& g) { return g.r; }, m);
}

inline void validate(const GrowthModel& model)
{
    std::visit(detail::overloaded{
                   [](const growth::Ricker& g) {
                       if (!std::isfinite(g.r)) {
                           throw std::invalid_argument("ricker: r must be finite");
                       }
                       if (!(g.a > 0) || !std::isfinite(g.a)) {
                           throw std::invalid_argument("ricker: a must be > 0");
                       }
                   },
                   [](const growth::PerturbedRicker& g) {
                       if (!std::isfinite(g.r) || !std::isfinite(g.c)) {
                           throw std::invalid_argument("perturbed_ricker: r and c must be finite");
                       }
                       if (!(g.a > 0) || !std::isfinite(g.a)) {
                           throw std::invalid_argument("perturbed_ricker: a must be > 0");
                       }
                   },
               },
               model);
}

/// ln f(x) for x >= 0.
inline double log_growth(const GrowthModel& model, double x)
{
    return std::visit(detail::overloaded{
                          [x](const growth::Ricker& g) { return g.r - g.a * x; },
                          [x](const growth::PerturbedRicker& g) {
                              return g.r - g.a * x + g.c / (1.0 + x);
                          },
                      },
                      model);
}

/// ln lambda = ln f(0).
inline double log_lambda(const GrowthModel& model) { return log_growth(model, 0.0); }

inline double lambda(const GrowthModel& model) { return std::exp(log_lambda(model)); }

inline Regime regime(const GrowthModel& model)
{
    const double l = log_lambda(model);
    return l < 0 ? Regime::declining : (l > 0 ? Regime::growing : Regime::neutral);
}

// ---------------------------------------------------------------------------
// Log-space state
// ---------------------------------------------------------------------------

inline constexpr double kDefaultLogFloor = -1.0e6;

/// Natural log of a population density.
struct LogState
{
    double value = 0.0;

    static LogState from_density(double x) { return LogState{std::log(x)}; }
    double density() const { return std::exp(value); }

    /// Below `floor` (including -inf) the trajectory is numerically extinct.
    bool extinct(double floor = kDefaultLogFloor) const { return !(value >= floor); }

    friend bool operator==(const LogState&, const LogState&) = default;
};

/// L' = L + ln f(e^L) + y.
inline LogState step_log(const GrowthModel& model, LogState state, double y)
{
    const double x = std::exp(state.value);
    return LogState{state.value + log_growth(model, x) + y};
}

/// Path of length n_steps + 1 starting at `start`, using stream
/// (seed, stream). A path stops early only if it becomes numerically extinct;
/// the remaining entries then repeat the extinct state.
inline std::vector<LogState> simulate_trajectory(const GrowthModel& model, const NoiseSpec& spec,
                                                 LogState start, std::int64_t n_steps,
                                                 std::uint64_t seed, std::uint64_t stream,
                                                 double log_floor = kDefaultLogFloor)
{
    if (n_steps < 0) {
        throw std::invalid_argument("simulate_trajectory: n_steps must be >= 0");
    }
    RngStream rng(seed, stream);
    std::vector<LogState> path;
    path.reserve(static_cast<std::size_t>(n_steps) + 1);
    path.push_back(start);
    LogState state = start;
    for (std::int64_t n = 0; n < n_steps; ++n) {
        if (!state.extinct(log_floor)) {
            state = step_log(model, state, sample_noise(spec, rng));
        }
        path.push_back(state);
    }
    return path;
}

// ---------------------------------------------------------------------------
// Two species
// ---------------------------------------------------------------------------

struct TwoSpeciesModel
{
    double r1 = 2.0;
    double r2 = 1.0;
    double a11 = 1.0;
    double a12 = 1.0;
    double a21 = 1.0;
    double a22 = 1.0;
    NoiseSpec noise1 = noise::Gaussian{0.5};
    NoiseSpec noise2 = noise::Gaussian{0.5};
};

inline void validate(const TwoSpeciesModel& m)
{
    if (!std::isfinite(m.r1) || !std::isfinite(m.r2)) {
        throw std::invalid_argument("two_species: r1, r2 must be finite");
    }
    for (double a : {m.a11, m.a12, m.a21, m.a22}) {
        if (!(a > 0) || !std::isfinite(a)) {
            throw std::invalid_argument("two_species: interaction coefficients must be > 0");
        }
    }
    validate(m.noise1);
    validate(m.noise2);
}

struct LogPair
{
    LogState first;
    LogState second;

    friend bool operator==(const LogPair&, const LogPair&) = default;
};

inline LogPair step2_log(const TwoSpeciesModel& m, LogPair state, double y1, double y2)
{
    const double x1 = std::exp(state.first.value);
    const double x2 = std::exp(state.second.value);
    return {LogState{state.first.value - m.a11 * x1 - m.a12 * x2 + m.r1 + y1},
            LogState{state.second.value - m.a21 * x1 - m.a22 * x2 + m.r2 + y2}};
}

/// Draws y1 then y2 from the same per-trajectory stream.
inline LogPair step2_random(const TwoSpeciesModel& m, LogPair state, RngStream& rng)
{
    const double y1 = sample_noise(m.noise1, rng);
    const double y2 = sample_noise(m.noise2, rng);
    return step2_log(m, state, y1, y2);
}

inline std::vector<LogPair> simulate_two_species(const TwoSpeciesModel& model, LogPair start,
                                                 std::int64_t n_steps, std::uint64_t seed,
                                                 std::uint64_t stream)
{
    if (n_steps < 0) {
        throw std::invalid_argument("simulate_two_species: n_steps must be >= 0");
    }
    RngStream rng(seed, stream);
    std::vector<LogPair> path;
    path.reserve(static_cast<std::size_t>(n_steps) + 1);
    path.push_back(start);
    for (std::int64_t n = 0; n < n_steps; ++n) {
        start = step2_random(model, start, rng);
        path.push_back(start);
    }
    return path;
}

}  // namespace ricker
