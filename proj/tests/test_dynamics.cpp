#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ricker/dynamics.hpp"

using namespace ricker;

TEST(Growth, LogGrowthExamples)
{
    EXPECT_DOUBLE_EQ(log_growth(growth::Ricker{1, 1}, 10.0), -9.0);
    EXPECT_DOUBLE_EQ(log_growth(growth::Ricker{0, 1}, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(log_growth(growth::PerturbedRicker{1, 1, 0.5}, 0.0), 1.5);
}

TEST(Growth, LambdaAndRegime)
{
    EXPECT_DOUBLE_EQ(lambda(growth::Ricker{1, 1}), std::exp(1.0));
    EXPECT_DOUBLE_EQ(lambda(growth::PerturbedRicker{1, 1, 0.5}), std::exp(1.5));
    EXPECT_EQ(regime(growth::Ricker{-0.5, 1}), Regime::declining);
    EXPECT_EQ(regime(growth::Ricker{0, 1}), Regime::neutral);
    EXPECT_EQ(regime(growth::PerturbedRicker{0.5, 1, -0.5}), Regime::neutral);
    EXPECT_EQ(regime(growth::Ricker{1, 1}), Regime::growing);
}

TEST(Growth, ZeroRegulationRejected)
{
    EXPECT_THROW(validate(GrowthModel{growth::Ricker{1, 0}}), std::invalid_argument);
    EXPECT_THROW(validate(GrowthModel{growth::PerturbedRicker{1, -1, 0}}), std::invalid_argument);
}

TEST(Growth, PerturbationVanishesAtLargeDensity)
{
    // ln f(x) - (r - a x) -> 0 as x -> inf
    const GrowthModel m = growth::PerturbedRicker{1, 1, 0.5};
    double prev = 1.0;
    for (double x : {10.0, 100.0, 1e4, 1e8}) {
        const double gap = std::abs(log_growth(m, x) - (1.0 - x));
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 1e-7);
}

TEST(StepLog, Examples)
{
    const GrowthModel ricker11 = growth::Ricker{1, 1};
    const auto s1 = step_log(ricker11, LogState::from_density(10.0), 0.0);
    EXPECT_NEAR(s1.value, std::log(10.0) - 9.0, 1e-14);
    EXPECT_NEAR(s1.density(), 10.0 * std::exp(-9.0), 1e-17);
    EXPECT_NEAR(s1.value, -6.697414907005954, 1e-12);

    EXPECT_DOUBLE_EQ(step_log(growth::Ricker{0.5, 2}, LogState{0.0}, 0.25).value, -1.25);

    // near zero density with r = 0 the chain is a pure random walk in log space
    const auto s2 = step_log(growth::Ricker{0, 1}, LogState{-500.0}, 0.3);
    EXPECT_DOUBLE_EQ(s2.value, -499.7);
}

TEST(StepLog, MatchesDensityMapOnGrid)
{
    const GrowthModel m = growth::Ricker{1, 1};
    for (double lx = std::log(1e-6); lx <= std::log(500.0); lx += 0.37) {
        const double x = std::exp(lx);
        for (double y = -10.0; y <= 10.0; y += 0.83) {
            const double expected = x * std::exp(1.0 - x) * std::exp(y);
            const double got = step_log(m, LogState{lx}, y).density();
            ASSERT_NEAR(got / expected, 1.0, 1e-11) << "x=" << x << " y=" << y;
        }
    }
}

TEST(StepLog, HugeStateDoesNotProduceNan)
{
    const auto s = step_log(growth::Ricker{1, 1}, LogState{800.0}, 3.0);
    EXPECT_FALSE(std::isnan(s.value));
    EXPECT_TRUE(s.extinct());
    EXPECT_TRUE(LogState{-2.0e6}.extinct());
    EXPECT_FALSE(LogState{-2.0e6}.extinct(-3.0e6));
}

TEST(Trajectory, DeterministicOracle)
{
    // x_{n+1} = x_n e^{1 - x_n} from 0.01, iterated independently
    const auto path =
        simulate_trajectory(growth::Ricker{1, 1}, noise::Dirac0{}, LogState::from_density(0.01), 3, 1, 0);
    ASSERT_EQ(path.size(), 4u);
    const std::vector<double> oracle{0.01, 0.02691234472349262, 0.07121281215811705, 0.18027075877578164};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(path[i].density() / oracle[i], 1.0, 1e-13);
    }
}

TEST(Trajectory, ZeroStepsReturnsStart)
{
    const auto path = simulate_trajectory(growth::Ricker{1, 1}, noise::Gaussian{1}, LogState{0.3}, 0, 1, 0);
    ASSERT_EQ(path.size(), 1u);
    EXPECT_EQ(path[0].value, 0.3);
    EXPECT_THROW(simulate_trajectory(growth::Ricker{1, 1}, noise::Gaussian{1}, LogState{0.3}, -1, 1, 0),
                 std::invalid_argument);
}

TEST(Trajectory, WeakRegulationIsCumulativeNoise)
{
    const GrowthModel m = growth::Ricker{0, 1e-12};
    const NoiseSpec spec = noise::Gaussian{1};
    const auto path = simulate_trajectory(m, spec, LogState{0.0}, 10, 123, 4);
    RngStream rng(123, 4);
    double cumulative = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        cumulative += sample_noise(spec, rng);
        EXPECT_NEAR(path[i].value, cumulative, 1e-9);
    }
}

TEST(Trajectory, DiracChainMatchesPlainIteration)
{
    for (double x0 : {0.01, 1.0, 10.0}) {
        const auto path =
            simulate_trajectory(growth::Ricker{1, 1}, noise::Dirac0{}, LogState::from_density(x0), 10000, 0, 0);
        double x = x0;
        for (std::size_t n = 1; n < path.size(); ++n) {
            x = x * std::exp(1.0 - x);
            ASSERT_NEAR(path[n].density() / x, 1.0, 1e-12) << "x0=" << x0 << " n=" << n;
        }
    }
}

TEST(Trajectory, StatesStayFiniteUnderHeavyNoise)
{
    const auto path = simulate_trajectory(growth::Ricker{1, 1}, noise::SymmetricPareto{1.5, 1.0},
                                          LogState{0.0}, 100000, 9, 0);
    for (const auto& s : path) {
        ASSERT_TRUE(std::isfinite(s.value) || s.extinct());
    }
}

TEST(Trajectory, Reproducible)
{
    auto run = [] {
        return simulate_trajectory(growth::Ricker{1, 1}, noise::Gaussian{1}, LogState{0.0}, 500, 2024, 17);
    };
    EXPECT_EQ(run(), run());
}

TEST(Trajectory, PerturbedAgreesWithRickerAtHighDensity)
{
    const double a = 1.0;
    const double c = 0.5;
    const GrowthModel plain = growth::Ricker{1, a};
    const GrowthModel matched = growth::Ricker{1 + c, a};
    const GrowthModel perturbed = growth::PerturbedRicker{1, a, c};
    for (double x = 100.0 / a; x < 1e5; x *= 1.7) {
        const LogState s = LogState::from_density(x);
        const double inc_p = step_log(perturbed, s, 0.2).value - s.value;
        EXPECT_LE(std::abs(inc_p - (step_log(plain, s, 0.2).value - s.value)), std::abs(c));
        EXPECT_LE(std::abs(inc_p - (step_log(matched, s, 0.2).value - s.value)), std::abs(c));
    }
}

TEST(TwoSpecies, StepExamples)
{
    TwoSpeciesModel m;
    m.r1 = 2;
    m.r2 = 1;
    const auto s = step2_log(m, {LogState{0.0}, LogState{0.0}}, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(s.first.value, 0.0);
    EXPECT_DOUBLE_EQ(s.second.value, -1.0);

    // L1' = 1 - e - 1/e + 2, L2' = -1 - e - 1/e + 1
    const auto t = step2_log(m, {LogState{1.0}, LogState{-1.0}}, 0.0, 0.0);
    EXPECT_NEAR(t.first.value, -0.08616126963048742, 1e-14);
    EXPECT_NEAR(t.second.value, -3.0861612696304874, 1e-14);

    // interaction terms vanish near the origin
    const auto u = step2_log(m, {LogState{-400.0}, LogState{-400.0}}, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(u.first.value, -398.0);
    EXPECT_DOUBLE_EQ(u.second.value, -399.0);
}

TEST(TwoSpecies, NonPositiveInteractionRejected)
{
    TwoSpeciesModel m;
    m.a12 = 0.0;
    EXPECT_THROW(validate(m), std::invalid_argument);
}
