#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ricker/noise.hpp"

using namespace ricker;

namespace {

std::vector<NoiseSpec> all_variants()
{
    return {noise::Gaussian{1.0},         noise::ShiftedExponential{2.0},
            noise::CenteredLogNormal{0.0, 0.5}, noise::SymmetricPareto{2.5, 1.0},
            noise::UniformCentered{1.0},  noise::Dirac0{}};
}

std::vector<double> draws(const NoiseSpec& spec, std::size_t n, std::uint64_t seed = 11)
{
    RngStream rng(seed, 0);
    std::vector<double> out(n);
    for (auto& y : out) {
        y = sample_noise(spec, rng);
    }
    return out;
}

}  // namespace

TEST(Noise, DiracIsZero)
{
    RngStream rng(1, 0);
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(sample_noise(noise::Dirac0{}, rng), 0.0);
    }
}

TEST(Noise, EmpiricalMeanIsZeroWithinClt)
{
    constexpr std::size_t n = 1000000;
    for (const auto& spec : all_variants()) {
        if (is_degenerate(spec)) {
            continue;
        }
        const auto ys = draws(spec, n);
        double sum = 0;
        for (double y : ys) {
            sum += y;
        }
        const double sd = std::sqrt(noise_variance(spec));
        EXPECT_NEAR(sum / n, 0.0, 4.0 * sd / std::sqrt(double(n))) << noise_name(spec);
    }
}

TEST(Noise, HeavyParetoIsSignSymmetric)
{
    // tail_index <= 2 has no variance; check P(Y > 0) = 1/2 instead
    constexpr std::size_t n = 1000000;
    const auto ys = draws(noise::SymmetricPareto{1.5, 1.0}, n);
    std::size_t positive = 0;
    for (double y : ys) {
        positive += y > 0 ? 1 : 0;
        ASSERT_GE(std::abs(y), 1.0);
    }
    EXPECT_NEAR(double(positive) / n, 0.5, 4.0 * 0.5 / std::sqrt(double(n)));
}

TEST(Noise, MgfExamples)
{
    EXPECT_NEAR(noise_mgf(noise::Gaussian{1.0}, 2.0), 7.389056098930650, 1e-12);
    EXPECT_TRUE(std::isinf(noise_mgf(noise::ShiftedExponential{2.0}, 2.0)));
    EXPECT_EQ(noise_mgf(noise::Dirac0{}, 3.7), 1.0);
    EXPECT_EQ(noise_mgf(noise::Dirac0{}, -3.7), 1.0);
    // e^{-1/2} * 2 / (2 - 1)
    EXPECT_NEAR(noise_mgf(noise::ShiftedExponential{2.0}, 1.0), 1.2130613194252668, 1e-14);
    EXPECT_NEAR(noise_mgf(noise::UniformCentered{1.0}, 1.0), 1.1752011936438014, 1e-14);
    EXPECT_TRUE(std::isinf(noise_mgf(noise::CenteredLogNormal{0.0, 0.5}, 0.1)));
    EXPECT_TRUE(std::isinf(noise_mgf(noise::SymmetricPareto{2.5, 1.0}, 0.1)));
    EXPECT_TRUE(std::isinf(noise_mgf(noise::SymmetricPareto{2.5, 1.0}, -0.1)));
}

TEST(Noise, MgfAtZeroIsOne)
{
    for (const auto& spec : all_variants()) {
        EXPECT_EQ(noise_mgf(spec, 0.0), 1.0) << noise_name(spec);
        EXPECT_EQ(noise_log_mgf(spec, 0.0), 0.0) << noise_name(spec);
    }
}

TEST(Noise, LogMgfMatchesMgf)
{
    for (const auto& spec : all_variants()) {
        for (double a : {-1.5, -0.5, 0.5, 0.9}) {
            const double m = noise_mgf(spec, a);
            const double lm = noise_log_mgf(spec, a);
            if (std::isinf(m)) {
                EXPECT_TRUE(std::isinf(lm)) << noise_name(spec) << " " << a;
            } else {
                EXPECT_NEAR(lm, std::log(m), 1e-10) << noise_name(spec) << " " << a;
            }
        }
    }
    // no overflow far out
    EXPECT_NEAR(noise_log_mgf(noise::Gaussian{1.0}, 100.0), 5000.0, 1e-9);
    EXPECT_NEAR(noise_log_mgf(noise::UniformCentered{1.0}, 100.0), 100.0 - std::log(200.0), 1e-9);
}

TEST(Noise, MonteCarloMgfWithinThreeStandardErrors)
{
    struct Case
    {
        NoiseSpec spec;
        double alpha;
    };
    // alpha at most half of the finite-MGF boundary on its side
    const std::vector<Case> cases{
        {noise::Gaussian{1.0}, 0.5},          {noise::Gaussian{1.0}, -1.0},
        {noise::ShiftedExponential{2.0}, 1.0}, {noise::ShiftedExponential{2.0}, -1.0},
        {noise::CenteredLogNormal{0.0, 0.5}, -1.0}, {noise::CenteredLogNormal{0.0, 0.5}, -0.3},
        {noise::UniformCentered{1.0}, 1.0},   {noise::UniformCentered{1.0}, -2.0},
        {noise::Dirac0{}, 1.0},
    };
    constexpr std::size_t n = 1000000;
    for (const auto& c : cases) {
        const auto ys = draws(c.spec, n, 29);
        double s = 0;
        double s2 = 0;
        for (double y : ys) {
            const double v = std::exp(c.alpha * y);
            s += v;
            s2 += v * v;
        }
        const double mean = s / n;
        const double se = std::sqrt(std::max(0.0, s2 / n - mean * mean) / n);
        EXPECT_NEAR(mean, noise_mgf(c.spec, c.alpha), 3.0 * se + 1e-15)
            << noise_name(c.spec) << " alpha=" << c.alpha;
    }
}

TEST(Noise, CdfMatchesEmpiricalFrequency)
{
    constexpr std::size_t n = 400000;
    for (const auto& spec : all_variants()) {
        if (is_degenerate(spec)) {
            continue;
        }
        const auto ys = draws(spec, n, 5);
        for (double q : {-1.5, -0.3, 0.0, 0.4, 2.0}) {
            std::size_t below = 0;
            for (double y : ys) {
                below += y <= q ? 1 : 0;
            }
            const double p = noise_cdf(spec, q);
            const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
            EXPECT_NEAR(double(below) / n, p, 4.5 * se + 1e-12) << noise_name(spec) << " q=" << q;
        }
    }
}

TEST(Noise, ReproducibleDraws)
{
    for (const auto& spec : all_variants()) {
        EXPECT_EQ(draws(spec, 1000, 77), draws(spec, 1000, 77)) << noise_name(spec);
    }
}

TEST(Noise, DomainMetadata)
{
    EXPECT_TRUE(std::isinf(alpha0_pos(noise::Gaussian{1.0})));
    EXPECT_TRUE(std::isinf(alpha0_pos(noise::UniformCentered{1.0})));
    EXPECT_TRUE(std::isinf(alpha0_pos(noise::Dirac0{})));
    EXPECT_EQ(alpha0_pos(noise::ShiftedExponential{2.0}), 2.0);
    EXPECT_EQ(alpha0_pos(noise::CenteredLogNormal{0.0, 1.0}), 0.0);
    EXPECT_EQ(alpha0_pos(noise::SymmetricPareto{2.5, 1.0}), 0.0);
    EXPECT_EQ(max_finite_moment(noise::SymmetricPareto{2.5, 1.0}), 2.5);
    EXPECT_TRUE(std::isinf(max_finite_moment(noise::CenteredLogNormal{0.0, 1.0})));
}

TEST(Noise, InvalidParametersRejected)
{
    EXPECT_THROW(validate(NoiseSpec{noise::Gaussian{0.0}}), std::invalid_argument);
    EXPECT_THROW(validate(NoiseSpec{noise::ShiftedExponential{-1.0}}), std::invalid_argument);
    EXPECT_THROW(validate(NoiseSpec{noise::SymmetricPareto{1.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(validate(NoiseSpec{noise::UniformCentered{0.0}}), std::invalid_argument);
    EXPECT_NO_THROW(validate(NoiseSpec{noise::Dirac0{}}));
}

TEST(Assumptions, BoundedNoiseFailsMediumBandTheorem)
{
    const auto rep = check_assumptions(noise::UniformCentered{1.0}, TheoremId::T2_2);
    EXPECT_FALSE(rep.passed());
    EXPECT_NE(rep.violations().find("noise uniformly bounded"), std::string::npos);
    EXPECT_EQ(rep.label(), "out-of-hypothesis");
}

TEST(Assumptions, GaussianPassesNullRecurrence)
{
    EXPECT_TRUE(check_assumptions(noise::Gaussian{1.0}, TheoremId::T5_1).passed());
}

TEST(Assumptions, ParetoMomentRule)
{
    EXPECT_TRUE(check_assumptions(noise::SymmetricPareto{2.5, 1.0}, TheoremId::T5_1).passed());
    EXPECT_FALSE(check_assumptions(noise::SymmetricPareto{1.8, 1.0}, TheoremId::T5_1).passed());
    EXPECT_TRUE(check_assumptions(noise::SymmetricPareto{1.8, 1.0}, TheoremId::T4_1).passed());
    EXPECT_FALSE(check_assumptions(noise::SymmetricPareto{2.5, 1.0}, TheoremId::T2_1b).passed());
    EXPECT_FALSE(check_assumptions(noise::SymmetricPareto{2.5, 1.0}, TheoremId::T4_1_exp).passed());
}

TEST(Assumptions, DiracFailsEveryTheorem)
{
    for (auto id : {TheoremId::T2_1a, TheoremId::T2_1b, TheoremId::T2_2, TheoremId::T3_1, TheoremId::T4_1,
                    TheoremId::T4_1_exp, TheoremId::T4_2, TheoremId::T5_1, TheoremId::T6_1}) {
        EXPECT_FALSE(check_assumptions(noise::Dirac0{}, id).passed()) << to_string(id);
    }
}

TEST(Assumptions, TheoremIdsRoundTrip)
{
    EXPECT_EQ(theorem_from_string("T4.1-exp"), TheoremId::T4_1_exp);
    EXPECT_THROW(theorem_from_string("T9.9"), std::invalid_argument);
}
