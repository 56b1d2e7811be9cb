#include <gtest/gtest.h>

#include <cmath>

#include <set>
#include <vector>

#include "ricker/rng.hpp"

using ricker::Philox4x32;
using ricker::RngStream;

// Known-answer vectors published with Random123.
TEST(Philox, KnownAnswerZero)
{
    const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes)
{
    const auto out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi)
{
    const auto out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out[0], 0xd16cfe09u);
    EXPECT_EQ(out[1], 0x94fdccebu);
    EXPECT_EQ(out[2], 0x5001e420u);
    EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RngStream, SameSeedAndStreamReplays)
{
    RngStream a(42, 7);
    RngStream b(42, 7);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a(), b());
    }
}

TEST(RngStream, StreamsAndSeedsDiffer)
{
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed : {0ull, 1ull, 0x123456789abcdefull}) {
        for (std::uint64_t s = 0; s < 100; ++s) {
            RngStream r(seed, s);
            firsts.insert(r());
        }
    }
    EXPECT_EQ(firsts.size(), 300u);
}

TEST(RngStream, UniformOpenStaysInsideUnitInterval)
{
    RngStream r(3, 0);
    double sum = 0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform_open();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // mean of U(0,1): sd of the sample mean is 1/sqrt(12 n)
    EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
}
