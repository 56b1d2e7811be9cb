// estimators.hpp
//
// Survival curves, tail-exponent fits and truncated means for censored
// hitting-time samples. All censoring in this project happens at a single
// horizon, so the empirical survival function is exact below it.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ricker/hitting.hpp"
#include "ricker/numeric.hpp"

namespace ricker {

// ---------------------------------------------------------------------------
// Small statistics helpers
// ---------------------------------------------------------------------------

struct LinearFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit linear_regression(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("linear_regression: need >= 2 paired points");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0;
    double my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0;
    double sxy = 0;
    double syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) {
        throw std::invalid_argument("linear_regression: x has no spread");
    }
    LinearFit fit;
    fit.n = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ssr += r * r;
    }
    fit.r_squared = syy > 0 ? 1.0 - ssr / syy : 1.0;
    fit.slope_stderr = x.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
    return fit;
}

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return lo <= v && v <= hi; }
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054)
{
    if (n == 0) {
        return {0.0, 1.0};
    }
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// ---------------------------------------------------------------------------
// Survival curve
// ---------------------------------------------------------------------------

struct SurvivalPoint
{
    std::int64_t n = 0;
    double S = 1.0;
};

/// Right-continuous step function n -> P(T > n).
struct SurvivalCurve
{
    std::vector<SurvivalPoint> points;
    std::size_t n_total = 0;
    std::size_t n_censored = 0;  // censored + numerically extinct
    std::int64_t horizon = 0;

    /// S(n) for any n >= 0.
    double at(std::int64_t n) const
    {
        auto it = std::upper_bound(points.begin(), points.end(), n,
                                   [](std::int64_t v, const SurvivalPoint& p) { return v < p.n; });
        if (it == points.begin()) {
            return 1.0;
        }
        return std::prev(it)->S;
    }
};

/// S(n) = #{outcomes not hit by step n} / n_total, at every n where S changes
/// plus the horizon. Censored and extinct outcomes never count as hit.
inline SurvivalCurve survival_curve(const SampleSet& samples)
{
    if (samples.outcomes.empty()) {
        throw std::invalid_argument("survival_curve: empty sample");
    }
    std::vector<std::int64_t> hits;
    hits.reserve(samples.outcomes.size());
    for (const auto& o : samples.outcomes) {
        switch (o.kind) {
            case OutcomeKind::hit:
                if (o.n < 1 || o.n > samples.horizon) {
                    throw std::invalid_argument("survival_curve: hit time outside [1, horizon]");
                }
                hits.push_back(o.n);
                break;
            case OutcomeKind::censored:
                if (o.n != samples.horizon) {
                    throw std::invalid_argument("survival_curve: mixed censoring horizons");
                }
                break;
            case OutcomeKind::extinct:
                if (o.n > samples.horizon) {
                    throw std::invalid_argument("survival_curve: extinction after horizon");
                }
                break;
        }
    }
    std::sort(hits.begin(), hits.end());
    SurvivalCurve curve;
    curve.n_total = samples.outcomes.size();
    curve.n_censored = curve.n_total - hits.size();
    curve.horizon = samples.horizon;
    const double total = static_cast<double>(curve.n_total);
    curve.points.push_back({0, 1.0});
    std::size_t i = 0;
    while (i < hits.size()) {
        const std::int64_t t = hits[i];
        while (i < hits.size() && hits[i] == t) {
            ++i;
        }
        curve.points.push_back({t, static_cast<double>(curve.n_total - i) / total});
    }
    if (curve.points.back().n != samples.horizon) {
        curve.points.push_back({samples.horizon, static_cast<double>(curve.n_censored) / total});
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Tail fits
// ---------------------------------------------------------------------------

enum class FitMethod { hill, loglog_regression, exp_rate };

inline std::string to_string(FitMethod m)
{
    switch (m) {
        case FitMethod::hill: return "hill";
        case FitMethod::loglog_regression: return "loglog_regression";
        case FitMethod::exp_rate: return "exp_rate";
    }
    return "?";
}

/// A fitted survival-tail exponent (hill, loglog_regression) or exponential
/// rate (exp_rate). When `estimable` is false the numeric fields are
/// meaningless and `note` says why.
struct TailFit
{
    FitMethod method = FitMethod::hill;
    bool estimable = false;
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t window_lo = 0;
    std::int64_t window_hi = 0;
    std::size_t k = 0;
    std::size_t n_used = 0;
    double r_squared = 0.0;
    std::string note;

    static TailFit inestimable(FitMethod m, std::string why)
    {
        TailFit f;
        f.method = m;
        f.note = std::move(why);
        return f;
    }
};

inline constexpr std::size_t kMinTailExceedances = 100;

/// Hill estimator of the survival exponent with right-censoring: over the
/// values strictly above a threshold, exponent = (uncensored count) /
/// sum ln(value / threshold). Censored values enter at their censoring time.
/// k counts uncensored values: the threshold is the next value below the k-th
/// largest uncensored one, moved down past ties.
inline TailFit hill_estimate(std::span<const double> values, std::span<const std::uint8_t> censored, std::size_t k,
                             std::size_t min_uncensored = kMinTailExceedances)
{
    if (values.size() != censored.size()) {
        throw std::invalid_argument("hill_estimate: size mismatch");
    }
    if (k < 1 || k >= values.size()) {
        return TailFit::inestimable(FitMethod::hill, "k out of range");
    }
    std::vector<std::size_t> idx(values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::size_t j = 0;
    for (std::size_t seen = 0; j < idx.size() && seen < k; ++j) {
        seen += censored[idx[j]] ? 0 : 1;
    }
    while (j < idx.size() && values[idx[j]] == values[idx[j - 1]]) {
        ++j;
    }
    if (j == idx.size()) {
        return TailFit::inestimable(FitMethod::hill, "no threshold below the top k values");
    }
    const double threshold = values[idx[j]];
    if (!(threshold > 0)) {
        return TailFit::inestimable(FitMethod::hill, "non-positive threshold");
    }
    double log_sum = 0;
    std::size_t uncensored = 0;
    double top = threshold;
    for (std::size_t i = 0; i < j; ++i) {
        const std::size_t t = idx[i];
        log_sum += std::log(values[t] / threshold);
        if (!censored[t]) {
            ++uncensored;
            top = std::max(top, values[t]);
        }
    }
    if (uncensored < min_uncensored || log_sum <= 0) {
        return TailFit::inestimable(FitMethod::hill, "insufficient tail data: " + std::to_string(uncensored) +
                                                         " uncensored exceedances");
    }
    TailFit fit;
    fit.method = FitMethod::hill;
    fit.estimable = true;
    fit.value = static_cast<double>(uncensored) / log_sum;
    fit.std_error = fit.value / std::sqrt(static_cast<double>(uncensored));
    fit.k = j;
    fit.n_used = uncensored;
    fit.window_lo = static_cast<std::int64_t>(std::floor(threshold));
    fit.window_hi = static_cast<std::int64_t>(std::ceil(top));
    return fit;
}

/// Tail models for the integer values above an integer threshold u, each
/// fitted by maximum likelihood on the same exceedances:
///   power      S(x | > u) = (u / x)^alpha
///   geometric  S(x | > u) = q^(x - u)
///   cutoff     S(x | > u) = (u / x)^alpha exp(-lambda (x - u)), lambda >= 0
/// Censored values contribute their survival probability.
/// `z` is the Vuong statistic of power against geometric (z > 0 favours the
/// power tail). `cutoff_lr` = 2 (l_cutoff - l_power) tests lambda = 0; under
/// a pure power tail it is a 50:50 mixture of 0 and chi-square(1).
struct TailComparison
{
    bool estimable = false;
    double power_exponent = 0.0;
    double geometric_ratio = 0.0;
    double cutoff_exponent = 0.0;
    double cutoff_rate = 0.0;
    double log_lr = 0.0;  // power minus geometric, summed
    double z = 0.0;
    double cutoff_lr = 0.0;
    std::size_t n_used = 0;
};

/// 1% and 0.1% points of the 50:50 mixture of 0 and chi-square(1).
inline constexpr double kCutoffLr1pct = 5.412;
inline constexpr double kCutoffLr01pct = 9.550;

inline TailComparison compare_tail_models(std::span<const double> values, std::span<const std::uint8_t> censored,
                                          double u)
{
    TailComparison out;
    std::vector<double> x;
    std::vector<std::uint8_t> cens;
    double excess = 0.0;
    std::size_t d = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > u) {
            x.push_back(values[i]);
            cens.push_back(censored[i]);
            excess += values[i] - u;
            d += censored[i] ? 0 : 1;
        }
    }
    out.n_used = x.size();
    if (!(u >= 1.0) || d < 2 || x.size() < 3) {
        return out;
    }
    // per-point log-likelihoods
    auto power_ll = [&](std::size_t i, double alpha) {
        if (cens[i]) {
            return -alpha * std::log(x[i] / u);
        }
        const double hi = -alpha * std::log((x[i] - 1.0) / u);
        const double lo = -alpha * std::log(x[i] / u);
        return hi + std::log1p(-std::exp(lo - hi));
    };
    const double q = (excess - static_cast<double>(d)) / excess;
    auto geom_ll = [&](std::size_t i) {
        const double k = x[i] - u;
        if (cens[i]) {
            return q > 0 ? k * std::log(q) : -kInf;
        }
        return (k > 1.0 ? (k - 1.0) * std::log(q) : 0.0) + std::log1p(-q);
    };
    const double log_alpha = detail::golden_minimize(
        [&](double la) {
            double ll = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                ll += power_ll(i, std::exp(la));
            }
            return -ll;
        },
        std::log(1e-3), std::log(1e3), 1e-10);
    out.power_exponent = std::exp(log_alpha);
    out.geometric_ratio = q;

    auto cutoff_nll = [&](double alpha, double lambda) {
        double ll = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double lo = -alpha * std::log(x[i] / u) - lambda * (x[i] - u);
            if (cens[i]) {
                ll += lo;
            } else {
                const double hi = -alpha * std::log((x[i] - 1.0) / u) - lambda * (x[i] - 1.0 - u);
                ll += hi + std::log1p(-std::exp(lo - hi));
            }
        }
        return -ll;
    };
    double power_nll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        power_nll -= power_ll(i, out.power_exponent);
    }
    const double lambda_hi = (q > 0 ? -std::log(q) : 50.0) * 2.0 + 1e-6;
    const double alpha_hi = out.power_exponent * 1.5 + 1e-6;
    auto profile = [&](double lambda, double* alpha_out) {
        const double a = detail::golden_minimize([&](double al) { return cutoff_nll(al, lambda); }, 0.0, alpha_hi,
                                                 1e-8);
        if (alpha_out != nullptr) {
            *alpha_out = a;
        }
        return cutoff_nll(a, lambda);
    };
    const double lambda = detail::golden_minimize([&](double l) { return profile(l, nullptr); }, 0.0, lambda_hi, 1e-8);
    double alpha_c = 0.0;
    const double cut_nll = profile(lambda, &alpha_c);
    // lambda = 0 is inside the family, so the fit can never be worse than the pure power one
    out.cutoff_rate = cut_nll < power_nll ? lambda : 0.0;
    out.cutoff_exponent = cut_nll < power_nll ? alpha_c : out.power_exponent;
    out.cutoff_lr = std::max(0.0, 2.0 * (power_nll - cut_nll));

    std::vector<double> diff(x.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        diff[i] = power_ll(i, out.power_exponent) - geom_ll(i);
        mean += diff[i];
    }
    out.log_lr = mean;
    if (!std::isfinite(out.log_lr)) {
        // a censored value with q = 0 is impossible under the geometric fit
        out.estimable = true;
        out.z = out.log_lr > 0 ? kInf : -kInf;
        return out;
    }
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : diff) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(x.size() - 1);
    out.estimable = true;
    out.z = var > 0 ? out.log_lr / std::sqrt(var * static_cast<double>(x.size())) : 0.0;
    return out;
}

/// Full power-tail diagnostic on a hitting-time sample.
struct PowerTailReport
{
    TailFit hill;
    TailFit hill_half;    // sensitivity at k/2
    TailFit hill_double;  // sensitivity at 2k
    TailFit regression;   // slope of ln S against ln n over the Hill window
    double r2_power = 0.0;
    double r2_exponential = 0.0;
    double hill_spread = 0.0;  // |hill(k/2) - hill(2k)| / hill(k)
    double slope_lower = 0.0;  // log-log slope on the lower half of the tail window
    double slope_upper = 0.0;  // and on the upper half
    double drift = 0.0;        // |slope_lower - slope_upper| / |overall slope|
    TailComparison comparison;  // tail models above the 2k threshold
    bool power_fit_poor = false;
    bool exponential_preferred = false;
    bool censored_in_tail = false;
};

/// Tail points with fewer survivors than this are too noisy for the
/// log-log regression.
inline constexpr double kMinTailSurvivors = 10.0;

inline std::size_t default_hill_k(std::size_t n_uncensored)
{
    return static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_uncensored))));
}

/// Hill estimate at k (default floor(sqrt(n_uncensored))) with k/2 and 2k
/// sensitivity fits, a log-log regression cross-check, and likelihood-ratio
/// tests of the power tail against an exponential cutoff and a geometric tail
/// above the 2k threshold.
inline PowerTailReport fit_power_tail(const SampleSet& samples, std::optional<std::size_t> k_opt = std::nullopt)
{
    PowerTailReport report;
    std::vector<double> values;
    std::vector<std::uint8_t> cens;
    values.reserve(samples.size());
    cens.reserve(samples.size());
    std::size_t uncensored = 0;
    for (const auto& o : samples.outcomes) {
        values.push_back(static_cast<double>(o.is_hit() ? o.n : samples.horizon));
        cens.push_back(o.is_hit() ? 0 : 1);
        uncensored += o.is_hit() ? 1 : 0;
    }
    const std::span<const std::uint8_t> cspan(cens);

    const std::size_t k = k_opt.value_or(default_hill_k(uncensored));
    auto clamp_k = [&](std::size_t kk) { return std::min<std::size_t>(std::max<std::size_t>(kk, 1), values.size() - 1); };
    if (values.size() < 2) {
        report.hill = TailFit::inestimable(FitMethod::hill, "fewer than two samples");
        report.hill_half = report.hill_double = report.regression = report.hill;
        report.regression.method = FitMethod::loglog_regression;
        return report;
    }
    report.hill = hill_estimate(values, cspan, clamp_k(k));
    report.hill_half = hill_estimate(values, cspan, clamp_k(k / 2), kMinTailExceedances / 2);
    report.hill_double = hill_estimate(values, cspan, clamp_k(2 * k));
    if (!report.hill.estimable) {
        report.regression = TailFit::inestimable(FitMethod::loglog_regression, report.hill.note);
        return report;
    }
    report.censored_in_tail = report.hill.k > report.hill.n_used;

    // regression cross-check on the exact survival curve, from the 2k-th
    // order statistic up to the last point with enough survivors
    const std::int64_t lo = report.hill_double.estimable ? std::min(report.hill_double.window_lo, report.hill.window_lo)
                                                         : report.hill.window_lo;
    const SurvivalCurve curve = survival_curve(samples);
    std::vector<double> ln_n;
    std::vector<double> n_lin;
    std::vector<double> ln_s;
    for (const auto& p : curve.points) {
        if (p.n >= std::max<std::int64_t>(lo, 1) && p.n < samples.horizon &&
            p.S * static_cast<double>(curve.n_total) >= kMinTailSurvivors) {
            ln_n.push_back(std::log(static_cast<double>(p.n)));
            n_lin.push_back(static_cast<double>(p.n));
            ln_s.push_back(std::log(p.S));
        }
    }
    if (ln_n.size() >= 6) {
        const LinearFit pw = linear_regression(ln_n, ln_s);
        const LinearFit ex = linear_regression(n_lin, ln_s);
        report.regression.method = FitMethod::loglog_regression;
        report.regression.estimable = true;
        report.regression.value = -pw.slope;
        report.regression.std_error = pw.slope_stderr;
        report.regression.window_lo = static_cast<std::int64_t>(n_lin.front());
        report.regression.window_hi = static_cast<std::int64_t>(n_lin.back());
        report.regression.n_used = ln_n.size();
        report.regression.r_squared = pw.r_squared;
        report.r2_power = pw.r_squared;
        report.r2_exponential = ex.r_squared;

        // split at the midpoint in ln n; a power tail keeps one slope
        const double mid = 0.5 * (ln_n.front() + ln_n.back());
        const auto cut = static_cast<std::size_t>(std::lower_bound(ln_n.begin(), ln_n.end(), mid) - ln_n.begin());
        if (cut >= 3 && ln_n.size() - cut >= 3) {
            const std::span<const double> x(ln_n);
            const std::span<const double> y(ln_s);
            report.slope_lower = -linear_regression(x.first(cut), y.first(cut)).slope;
            report.slope_upper = -linear_regression(x.subspan(cut), y.subspan(cut)).slope;
            if (report.regression.value > 0) {
                report.drift = std::abs(report.slope_upper - report.slope_lower) / report.regression.value;
            }
        }
    } else {
        report.regression = TailFit::inestimable(FitMethod::loglog_regression, "fewer than 6 distinct tail times");
    }

    if (report.hill_half.estimable && report.hill_double.estimable) {
        report.hill_spread = std::abs(report.hill_half.value - report.hill_double.value) / report.hill.value;
    }
    report.comparison = compare_tail_models(
        values, cspan, static_cast<double>(report.hill_double.estimable ? report.hill_double.window_lo : report.hill.window_lo));
    // poor: an exponential cutoff improves the power fit significantly;
    // exponential preferred: in addition the plain geometric tail beats the power tail
    report.power_fit_poor = report.comparison.estimable && report.comparison.cutoff_lr > kCutoffLr1pct;
    report.exponential_preferred = report.power_fit_poor && report.comparison.z < 0;
    return report;
}

/// Default exponential-fit window: n from 1 up to the last n with
/// S(n) >= min_survival.
inline std::pair<std::int64_t, std::int64_t> exp_fit_window(const SurvivalCurve& curve, double min_survival)
{
    std::int64_t hi = 0;
    for (const auto& p : curve.points) {
        if (p.S >= min_survival && p.n < curve.horizon) {
            hi = p.n;
        }
    }
    // S is constant on [p.n, next.n); extend to the last integer before the drop
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        if (curve.points[i].n == hi) {
            hi = curve.points[i + 1].n - 1;
            break;
        }
    }
    return {1, std::max<std::int64_t>(hi, 1)};
}

/// Least-squares slope of ln S(n) over integer n in [lo, hi]; rate = -slope.
inline TailFit fit_exponential_rate(const SurvivalCurve& curve, std::int64_t lo, std::int64_t hi)
{
    if (lo < 0 || hi <= lo) {
        throw std::invalid_argument("fit_exponential_rate: need 0 <= lo < hi");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::int64_t n = lo; n <= hi; ++n) {
        const double s = curve.at(n);
        if (!(s > 0)) {
            throw std::invalid_argument("fit_exponential_rate: S = 0 inside window at n = " + std::to_string(n));
        }
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(s));
    }
    const LinearFit lf = linear_regression(xs, ys);
    TailFit fit;
    fit.method = FitMethod::exp_rate;
    fit.estimable = true;
    fit.value = -lf.slope;
    fit.std_error = lf.slope_stderr;
    fit.window_lo = lo;
    fit.window_hi = hi;
    fit.n_used = xs.size();
    fit.r_squared = lf.r_squared;
    return fit;
}

/// When the curve reaches zero too early to fit, the rate can still be
/// bounded below: no survivors at n0 out of N puts S(n0) <= 3/N with 95%
/// confidence, so rate >= ln(N/3) / n0.
inline TailFit exponential_rate_lower_bound(const SurvivalCurve& curve)
{
    std::int64_t n0 = 0;
    for (const auto& p : curve.points) {
        if (p.S == 0.0) {
            n0 = p.n;
            break;
        }
    }
    const double n_total = static_cast<double>(curve.n_total);
    if (n0 < 1 || n_total <= 3.0) {
        return TailFit::inestimable(FitMethod::exp_rate, "survival never reaches zero and is too short to fit");
    }
    TailFit fit;
    fit.method = FitMethod::exp_rate;
    fit.estimable = true;
    fit.value = std::log(n_total / 3.0) / static_cast<double>(n0);
    fit.window_lo = 0;
    fit.window_hi = n0;
    fit.n_used = 1;
    fit.note = "lower bound: no survivors at n = " + std::to_string(n0) + " (rule of three)";
    return fit;
}

/// Exponential rate over [lo, hi], falling back to the lower bound when the
/// window holds fewer than three points.
inline TailFit exponential_rate_or_bound(const SurvivalCurve& curve, std::int64_t lo, std::int64_t hi)
{
    if (hi - lo >= 2) {
        return fit_exponential_rate(curve, lo, hi);
    }
    return exponential_rate_lower_bound(curve);
}

// ---------------------------------------------------------------------------
// Means
// ---------------------------------------------------------------------------

/// E[min(T, h)], with every non-hit outcome counted as h.
inline double truncated_mean(const SampleSet& samples, std::int64_t h)
{
    if (samples.outcomes.empty()) {
        throw std::invalid_argument("truncated_mean: empty sample");
    }
    if (h > samples.horizon) {
        throw std::invalid_argument("truncated_mean: h beyond the sample horizon");
    }
    double sum = 0;
    for (const auto& o : samples.outcomes) {
        sum += static_cast<double>(o.is_hit() ? std::min(o.n, h) : h);
    }
    return sum / static_cast<double>(samples.outcomes.size());
}

struct MeanEstimate
{
    double mean = 0.0;
    Interval ci95;
    double censored_fraction = 0.0;
    /// Truncated means at horizon/4, horizon/2, horizon.
    std::array<double, 3> nested_means{};
    /// (m(H) - m(H/2)) / (m(H/2) - m(H/4)); >= 1 when the tail is no lighter
    /// than n^{-1}.
    double growth_ratio = 0.0;
    /// Heuristic only: finite simulation cannot certify an infinite mean.
    bool divergence_flag = false;
};

inline constexpr double kDivergenceRatio = 1.0;

inline MeanEstimate mean_with_ci(const SampleSet& samples)
{
    if (samples.outcomes.empty()) {
        throw std::invalid_argument("mean_with_ci: empty sample");
    }
    MeanEstimate est;
    const double n = static_cast<double>(samples.outcomes.size());
    double sum = 0;
    double sum2 = 0;
    std::size_t not_hit = 0;
    for (const auto& o : samples.outcomes) {
        const double t = static_cast<double>(o.is_hit() ? o.n : samples.horizon);
        sum += t;
        sum2 += t * t;
        not_hit += o.is_hit() ? 0 : 1;
    }
    est.mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum2 - n * est.mean * est.mean) / (n - 1)) : 0.0;
    const double half = 1.959963984540054 * std::sqrt(var / n);
    est.ci95 = {est.mean - half, est.mean + half};
    est.censored_fraction = static_cast<double>(not_hit) / n;

    const std::int64_t h = samples.horizon;
    if (h >= 4) {
        est.nested_means = {truncated_mean(samples, h / 4), truncated_mean(samples, h / 2), est.mean};
        const double d1 = est.nested_means[1] - est.nested_means[0];
        const double d2 = est.nested_means[2] - est.nested_means[1];
        est.growth_ratio = d1 > 0 ? d2 / d1 : 0.0;
        est.divergence_flag = d1 > 0 && d2 > 0 && est.growth_ratio >= kDivergenceRatio;
    } else {
        est.nested_means = {est.mean, est.mean, est.mean};
    }
    return est;
}

}  // namespace ricker
