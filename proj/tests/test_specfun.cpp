#include <cmath>
#include <limits>
#include <stdexcept>

#include <gtest/gtest.h>

#include "lambdajc/specfun.hpp"
#include "oracles.hpp"

using lambdajc::bessel_j;
using lambdajc::bessel_j_range;
using lambdajc::sideband_cutoff;

TEST(Bessel, ValueAtOrigin)
{
    EXPECT_EQ(bessel_j(0, 0.0), 1.0);
    for (int n = -10; n <= 10; ++n)
        if (n != 0) {
            EXPECT_EQ(bessel_j(n, 0.0), 0.0);
        }
}

TEST(Bessel, ReflectionIdentity)
{
    EXPECT_NEAR(bessel_j(-3, 1.7), -bessel_j(3, 1.7), 1e-14);
    for (int n = 0; n <= 64; ++n)
        for (double x : {-37.5, -3.3, -0.4, 0.2, 1.7, 9.0, 25.0, 49.0}) {
            const double sign = n % 2 ? -1.0 : 1.0;
            EXPECT_NEAR(bessel_j(-n, x), sign * bessel_j(n, x), 1e-14) << n << " " << x;
        }
}

TEST(Bessel, FirstRootOfJ0)
{
    const double root = oracle::bessel_j0_root(2.0, 3.0);
    EXPECT_NEAR(root, 2.404826, 1e-6);
    EXPECT_NEAR(bessel_j(0, 2.404826), 0.0, 1e-6);
    EXPECT_NEAR(bessel_j(0, root), 0.0, 1e-13);
}

TEST(Bessel, HighNegativeOrderIsTiny)
{
    const double v = bessel_j(-14, 1.0);
    EXPECT_LT(std::abs(v), 1e-13);
    EXPECT_NEAR(v, oracle::bessel_series(-14, 1.0), 1e-25);
}

TEST(Bessel, MatchesSeriesOracle)
{
    for (int n = -64; n <= 64; ++n)
        for (double x = -12.0; x <= 12.0; x += 0.37)
            ASSERT_NEAR(bessel_j(n, x), oracle::bessel_series(n, x), 1e-12) << n << " " << x;
}

TEST(Bessel, MatchesLibraryOracleAtLargeArgument)
{
    for (int n = 0; n <= 64; ++n)
        for (double x = 12.0; x <= 50.0; x += 0.83)
            ASSERT_NEAR(bessel_j(n, x), std::cyl_bessel_j(static_cast<double>(n), x), 1e-12)
                << n << " " << x;
}

TEST(Bessel, RangeAgreesWithSingleEvaluation)
{
    const auto r = bessel_j_range(40, 7.25);
    for (int n = 0; n <= 40; ++n)
        EXPECT_EQ(r[static_cast<std::size_t>(n)], bessel_j(n, 7.25));
}

TEST(Bessel, Normalization)
{
    for (double x = -20.0; x <= 20.0; x += 0.25) {
        const auto r = bessel_j_range(64, x);
        double s = r[0] * r[0];
        for (int n = 1; n <= 64; ++n)
            s += 2.0 * r[static_cast<std::size_t>(n)] * r[static_cast<std::size_t>(n)];
        EXPECT_NEAR(s, 1.0, 1e-10) << x;
    }
}

TEST(Bessel, ThreeTermRecurrence)
{
    for (double x = 0.5; x <= 20.0; x += 0.5)
        for (int n = -30; n <= 30; ++n) {
            const double lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
            const double rhs = 2.0 * n / x * bessel_j(n, x);
            const double scale = std::abs(bessel_j(n - 1, x)) + std::abs(bessel_j(n + 1, x)) +
                                 std::abs(rhs) + std::numeric_limits<double>::min();
            EXPECT_LE(std::abs(lhs - rhs), 1e-9 * scale) << n << " " << x;
        }
}

TEST(Bessel, BoundedByOne)
{
    for (int n = -64; n <= 64; n += 3)
        for (double x = -50.0; x <= 50.0; x += 1.3)
            EXPECT_LE(std::abs(bessel_j(n, x)), 1.0);
}

TEST(Bessel, RejectsInvalidArguments)
{
    EXPECT_THROW(bessel_j(0, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    EXPECT_THROW(bessel_j(0, std::numeric_limits<double>::infinity()), std::invalid_argument);
    EXPECT_THROW(bessel_j(1, 1e4), std::invalid_argument);
    EXPECT_THROW(bessel_j_range(-1, 1.0), std::invalid_argument);
    EXPECT_NO_THROW(bessel_j(3, 1e3));
}

TEST(SidebandCutoff, ZeroArgument)
{
    EXPECT_EQ(sideband_cutoff(0.0, 1e-8), 0);
}

TEST(SidebandCutoff, MatchesBruteScan)
{
    for (double z : {0.1, 0.7, 2.5, 6.0, 11.3}) {
        int expected = 0;
        for (int p = 1; p <= 64; ++p)
            if (std::abs(oracle::bessel_series(p, z)) >= 1e-10)
                expected = p;
        EXPECT_EQ(sideband_cutoff(z, 1e-10), expected) << z;
    }
}

TEST(SidebandCutoff, NonDecreasingInArgument)
{
    int prev = 0;
    for (double z = 0.0; z <= 30.0; z += 0.05) {
        const int p = sideband_cutoff(z, 1e-10);
        EXPECT_GE(p, prev) << z;
        prev = p;
    }
}

TEST(SidebandCutoff, EveryDroppedOrderIsBelowTolerance)
{
    for (double z : {0.3, 3.0, 17.0}) {
        const int p = sideband_cutoff(z, 1e-10);
        for (int q = p + 1; q <= p + 40; ++q)
            EXPECT_LT(std::abs(bessel_j(q, z)), 1e-10);
        EXPECT_GE(std::abs(bessel_j(p, z)), 1e-10);
    }
}

TEST(SidebandCutoff, RejectsNonPositiveTolerance)
{
    EXPECT_THROW(sideband_cutoff(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(sideband_cutoff(1.0, -1e-3), std::invalid_argument);
}
