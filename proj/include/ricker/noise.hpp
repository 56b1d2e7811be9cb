// noise.hpp
//
// Zero-mean environmental noise laws Y and their analytic metadata.
//
// Every variant is shifted so that E[Y] = 0 holds exactly. Besides sampling,
// each law exposes the quantities the analytic bounds are built from: the
// moment generating function E[e^{aY}] (with +inf marking divergence), the
// CDF, the right/left exponential-moment domains and the highest finite
// absolute moment.
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "ricker/rng.hpp"

namespace ricker {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace noise {

struct Gaussian
{
    double sigma = 1.0;
};

/// Y = E - 1/rate, E ~ Exponential(rate).
struct ShiftedExponential
{
    double rate = 1.0;
};

/// Y = LN(mu, sigma) - exp(mu + sigma^2 / 2).
struct CenteredLogNormal
{
    double mu = 0.0;
    double sigma = 1.0;
};

/// |Y| ~ Pareto(tail_index, scale), sign uniform on {-1, +1}.
struct SymmetricPareto
{
    double tail_index = 2.5;
    double scale = 1.0;
};

struct UniformCentered
{
    double half_width = 1.0;
};

/// Y == 0. Deterministic oracle mode.
struct Dirac0
{
};

}  // namespace noise

using NoiseSpec = std::variant<noise::Gaussian, noise::ShiftedExponential,
                               noise::CenteredLogNormal, noise::SymmetricPareto,
                               noise::UniformCentered, noise::Dirac0>;

namespace detail {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Box-Muller; the sine variate is kept for the next call on the same stream.
inline double standard_normal(RngStream& rng)
{
    double z = 0.0;
    if (rng.take_spare(z)) {
        return z;
    }
    const double u1 = rng.uniform_open();
    const double u2 = rng.uniform_open();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    rng.put_spare(rad * std::sin(ang));
    return rad * std::cos(ang);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double lognormal_shift(const noise::CenteredLogNormal& n)
{
    return std::exp(n.mu + 0.5 * n.sigma * n.sigma);
}

// E[exp(alpha * LN)] for alpha < 0 has no closed form; composite Simpson over
// the standard-normal variable. The integrand is bounded by phi(z).
inline double lognormal_raw_mgf_negative(double mu, double sigma, double alpha)
{
    constexpr int kIntervals = 20000;
    constexpr double kLo = -12.0;
    constexpr double kHi = 12.0;
    const double h = (kHi - kLo) / kIntervals;
    auto integrand = [&](double z) {
        const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
        return std::exp(alpha * std::exp(mu + sigma * z)) * phi;
    };
    double sum = integrand(kLo) + integrand(kHi);
    for (int i = 1; i < kIntervals; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(kLo + i * h);
    }
    return sum * h / 3.0;
}

}  // namespace detail

/// Throws std::invalid_argument when a parameter is outside its domain.
inline void validate(const NoiseSpec& spec)
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw std::invalid_argument(what);
        }
    };
    std::visit(detail::overloaded{
                   [&](const noise::Gaussian& n) {
                       require(n.sigma > 0 && std::isfinite(n.sigma), "gaussian: sigma must be > 0");
                   },
                   [&](const noise::ShiftedExponential& n) {
                       require(n.rate > 0 && std::isfinite(n.rate),
                               "shifted_exponential: rate must be > 0");
                   },
                   [&](const noise::CenteredLogNormal& n) {
                       require(std::isfinite(n.mu), "centered_lognormal: mu must be finite");
                       require(n.sigma > 0 && std::isfinite(n.sigma),
                               "centered_lognormal: sigma must be > 0");
                   },
                   [&](const noise::SymmetricPareto& n) {
                       require(n.tail_index > 1 && std::isfinite(n.tail_index),
                               "symmetric_pareto: tail_index must be > 1");
                       require(n.scale > 0 && std::isfinite(n.scale),
                               "symmetric_pareto: scale must be > 0");
                   },
                   [&](const noise::UniformCentered& n) {
                       require(n.half_width > 0 && std::isfinite(n.half_width),
                               "uniform: half_width must be > 0");
                   },
                   [](const noise::Dirac0&) {},
               },
               spec);
}

inline std::string noise_name(const NoiseSpec& spec)
{
    return std::visit(detail::overloaded{
                          [](const noise::Gaussian&) { return std::string{"gaussian"}; },
                          [](const noise::ShiftedExponential&) {
                              return std::string{"shifted_exponential"};
                          },
                          [](const noise::CenteredLogNormal&) {
                              return std::string{"centered_lognormal"};
                          },
                          [](const noise::SymmetricPareto&) {
                              return std::string{"symmetric_pareto"};
                          },
                          [](const noise::UniformCentered&) { return std::string{"uniform"}; },
                          [](const noise::Dirac0&) { return std::string{"dirac0"}; },
                      },
                      spec);
}

/// One draw of Y. Advancing `rng` is the only side effect.
inline double sample_noise(const NoiseSpec& spec, RngStream& rng)
{
    return std::visit(
        detail::overloaded{
            [&](const noise::Gaussian& n) { return n.sigma * detail::standard_normal(rng); },
            [&](const noise::ShiftedExponential& n) {
                return -std::log(rng.uniform_open()) / n.rate - 1.0 / n.rate;
            },
            [&](const noise::CenteredLogNormal& n) {
                return std::exp(n.mu + n.sigma * detail::standard_normal(rng)) -
                       detail::lognormal_shift(n);
            },
            [&](const noise::SymmetricPareto& n) {
                // inverse CDF of |Y|: scale * U^{-1/tail_index}
                const double magnitude = n.scale * std::pow(rng.uniform_open(), -1.0 / n.tail_index);
                return (rng() >> 63) != 0 ? magnitude : -magnitude;
            },
            [&](const noise::UniformCentered& n) {
                return (2.0 * rng.uniform_open() - 1.0) * n.half_width;
            },
            [](const noise::Dirac0&) { return 0.0; },
        },
        spec);
}

/// E[e^{alpha Y}], exact where a closed form exists, +inf on divergence.
inline double noise_mgf(const NoiseSpec& spec, double alpha)
{
    if (alpha == 0.0) {
        return 1.0;
    }
    return std::visit(
        detail::overloaded{
            [&](const noise::Gaussian& n) { return std::exp(0.5 * alpha * alpha * n.sigma * n.sigma); },
            [&](const noise::ShiftedExponential& n) {
                if (alpha >= n.rate) {
                    return kInf;
                }
                return std::exp(-alpha / n.rate) * n.rate / (n.rate - alpha);
            },
            [&](const noise::CenteredLogNormal& n) {
                if (alpha > 0) {
                    return kInf;
                }
                return std::exp(-alpha * detail::lognormal_shift(n)) *
                       detail::lognormal_raw_mgf_negative(n.mu, n.sigma, alpha);
            },
            [](const noise::SymmetricPareto&) { return kInf; },
            [&](const noise::UniformCentered& n) {
                const double t = alpha * n.half_width;
                return std::sinh(t) / t;
            },
            [](const noise::Dirac0&) { return 1.0; },
        },
        spec);
}

/// ln E[e^{alpha Y}] without overflow for large |alpha|.
inline double noise_log_mgf(const NoiseSpec& spec, double alpha)
{
    if (alpha == 0.0) {
        return 0.0;
    }
    return std::visit(
        detail::overloaded{
            [&](const noise::Gaussian& n) { return 0.5 * alpha * alpha * n.sigma * n.sigma; },
            [&](const noise::ShiftedExponential& n) {
                if (alpha >= n.rate) {
                    return kInf;
                }
                return -alpha / n.rate + std::log(n.rate / (n.rate - alpha));
            },
            [&](const noise::CenteredLogNormal& n) {
                if (alpha > 0) {
                    return kInf;
                }
                return -alpha * detail::lognormal_shift(n) +
                       std::log(detail::lognormal_raw_mgf_negative(n.mu, n.sigma, alpha));
            },
            [](const noise::SymmetricPareto&) { return kInf; },
            [&](const noise::UniformCentered& n) {
                const double t = std::abs(alpha * n.half_width);
                if (t < 20.0) {
                    return std::log(std::sinh(t) / t);
                }
                // sinh(t) = e^t (1 - e^{-2t}) / 2
                return t + std::log1p(-std::exp(-2.0 * t)) - std::log(2.0 * t);
            },
            [](const noise::Dirac0&) { return 0.0; },
        },
        spec);
}

/// P(Y <= y).
inline double noise_cdf(const NoiseSpec& spec, double y)
{
    return std::visit(
        detail::overloaded{
            [&](const noise::Gaussian& n) { return detail::normal_cdf(y / n.sigma); },
            [&](const noise::ShiftedExponential& n) {
                const double e = y + 1.0 / n.rate;
                return e <= 0 ? 0.0 : -std::expm1(-n.rate * e);
            },
            [&](const noise::CenteredLogNormal& n) {
                const double v = y + detail::lognormal_shift(n);
                return v <= 0 ? 0.0 : detail::normal_cdf((std::log(v) - n.mu) / n.sigma);
            },
            [&](const noise::SymmetricPareto& n) {
                if (y <= -n.scale) {
                    return 0.5 * std::pow(n.scale / -y, n.tail_index);
                }
                if (y < n.scale) {
                    return 0.5;
                }
                return 1.0 - 0.5 * std::pow(n.scale / y, n.tail_index);
            },
            [&](const noise::UniformCentered& n) {
                if (y <= -n.half_width) {
                    return 0.0;
                }
                if (y >= n.half_width) {
                    return 1.0;
                }
                return (y + n.half_width) / (2.0 * n.half_width);
            },
            [&](const noise::Dirac0&) { return y >= 0 ? 1.0 : 0.0; },
        },
        spec);
}

/// P(lo <= Y <= hi). Every non-degenerate variant is atomless.
inline double noise_interval_probability(const NoiseSpec& spec, double lo, double hi)
{
    if (hi < lo) {
        return 0.0;
    }
    if (std::holds_alternative<noise::Dirac0>(spec)) {
        return (lo <= 0.0 && 0.0 <= hi) ? 1.0 : 0.0;
    }
    return noise_cdf(spec, hi) - noise_cdf(spec, lo);
}

inline double noise_variance(const NoiseSpec& spec)
{
    return std::visit(
        detail::overloaded{
            [](const noise::Gaussian& n) { return n.sigma * n.sigma; },
            [](const noise::ShiftedExponential& n) { return 1.0 / (n.rate * n.rate); },
            [](const noise::CenteredLogNormal& n) {
                return std::expm1(n.sigma * n.sigma) * std::exp(2.0 * n.mu + n.sigma * n.sigma);
            },
            [](const noise::SymmetricPareto& n) {
                if (n.tail_index <= 2.0) {
                    return kInf;
                }
                return n.tail_index * n.scale * n.scale / (n.tail_index - 2.0);
            },
            [](const noise::UniformCentered& n) { return n.half_width * n.half_width / 3.0; },
            [](const noise::Dirac0&) { return 0.0; },
        },
        spec);
}

/// sup{alpha >= 0 : E[e^{alpha Y}] < inf}.
inline double alpha0_pos(const NoiseSpec& spec)
{
    return std::visit(detail::overloaded{
                          [](const noise::ShiftedExponential& n) { return n.rate; },
                          [](const noise::CenteredLogNormal&) { return 0.0; },
                          [](const noise::SymmetricPareto&) { return 0.0; },
                          [](const auto&) { return kInf; },
                      },
                      spec);
}

/// sup{alpha >= 0 : E[e^{-alpha Y}] < inf}.
inline double alpha0_neg(const NoiseSpec& spec)
{
    return std::holds_alternative<noise::SymmetricPareto>(spec) ? 0.0 : kInf;
}

/// sup{p : E|Y|^p < inf}.
inline double max_finite_moment(const NoiseSpec& spec)
{
    if (const auto* p = std::get_if<noise::SymmetricPareto>(&spec)) {
        return p->tail_index;
    }
    return kInf;
}

inline bool is_degenerate(const NoiseSpec& spec) { return std::holds_alternative<noise::Dirac0>(spec); }

/// True when P(-M' <= Y <= M) = 1 for some finite M', M.
inline bool is_uniformly_bounded(const NoiseSpec& spec)
{
    return std::holds_alternative<noise::UniformCentered>(spec) ||
           std::holds_alternative<noise::Dirac0>(spec);
}

// ---------------------------------------------------------------------------
// Hypothesis checks
// ---------------------------------------------------------------------------

enum class TheoremId { T2_1a, T2_1b, T2_2, T3_1, T4_1, T4_1_exp, T4_2, T5_1, T6_1 };

inline std::string to_string(TheoremId id)
{
    switch (id) {
        case TheoremId::T2_1a: return "T2.1a";
        case TheoremId::T2_1b: return "T2.1b";
        case TheoremId::T2_2: return "T2.2";
        case TheoremId::T3_1: return "T3.1";
        case TheoremId::T4_1: return "T4.1";
        case TheoremId::T4_1_exp: return "T4.1-exp";
        case TheoremId::T4_2: return "T4.2";
        case TheoremId::T5_1: return "T5.1";
        case TheoremId::T6_1: return "T6.1";
    }
    return "?";
}

inline TheoremId theorem_from_string(const std::string& s)
{
    for (auto id : {TheoremId::T2_1a, TheoremId::T2_1b, TheoremId::T2_2, TheoremId::T3_1,
                    TheoremId::T4_1, TheoremId::T4_1_exp, TheoremId::T4_2, TheoremId::T5_1,
                    TheoremId::T6_1}) {
        if (to_string(id) == s) {
            return id;
        }
    }
    throw std::invalid_argument("unknown theorem id: " + s);
}

struct Hypothesis
{
    std::string condition;
    bool passed = false;
    std::string detail;
};

struct AssumptionReport
{
    TheoremId theorem = TheoremId::T2_1a;
    std::vector<Hypothesis> hypotheses;

    bool passed() const
    {
        for (const auto& h : hypotheses) {
            if (!h.passed) {
                return false;
            }
        }
        return true;
    }

    std::string label() const { return passed() ? "in-hypothesis" : "out-of-hypothesis"; }

    /// Conditions that failed, joined with "; ".
    std::string violations() const
    {
        std::string out;
        for (const auto& h : hypotheses) {
            if (!h.passed) {
                if (!out.empty()) {
                    out += "; ";
                }
                out += h.condition + " (" + h.detail + ")";
            }
        }
        return out;
    }
};

/// Noise-side hypotheses of each theorem. Regime conditions on lambda are
/// reported separately by classify_regime.
inline AssumptionReport check_assumptions(const NoiseSpec& spec, TheoremId theorem)
{
    AssumptionReport report{theorem, {}};
    auto add = [&](std::string condition, bool ok, std::string detail) {
        report.hypotheses.push_back({std::move(condition), ok, std::move(detail)});
    };
    const double moment = max_finite_moment(spec);
    auto moment_text = [&] {
        return std::isinf(moment) ? std::string{"all moments finite"}
                                  : "moments finite below order " + std::to_string(moment);
    };

    add("noise is non-degenerate", !is_degenerate(spec),
        is_degenerate(spec) ? "Y is identically zero" : "Y has a non-trivial law");

    switch (theorem) {
        case TheoremId::T3_1:
            add("E|Y| < inf", moment > 1.0, moment_text());
            break;
        case TheoremId::T5_1:
        case TheoremId::T6_1:
            add("E|Y|^{1+delta} < inf", moment > 1.0, moment_text());
            add(theorem == TheoremId::T5_1 ? "E|Y|^{2+delta1} < inf" : "E[Y^2] < inf",
                moment > 2.0, moment_text());
            break;
        default:
            add("E|Y|^{1+delta} < inf", moment > 1.0, moment_text());
            break;
    }

    if (theorem == TheoremId::T2_1b) {
        const double a0 = alpha0_pos(spec);
        add("E[e^{alpha Y}] < inf for some alpha > 0", a0 > 0.0,
            a0 > 0.0 ? "right MGF finite below alpha0 = " + std::to_string(a0)
                     : "right MGF infinite for every alpha > 0");
    }
    if (theorem == TheoremId::T4_1_exp) {
        const double a0 = alpha0_neg(spec);
        add("E[e^{-alpha Y}] < inf for some alpha > 0", a0 > 0.0,
            a0 > 0.0 ? "left MGF finite" : "left MGF infinite for every alpha > 0");
    }
    if (theorem == TheoremId::T2_2) {
        add("Y is not uniformly bounded", !is_uniformly_bounded(spec),
            is_uniformly_bounded(spec) ? "noise uniformly bounded" : "unbounded support");
    }
    return report;
}

}  // namespace ricker
