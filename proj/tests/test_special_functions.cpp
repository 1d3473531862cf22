#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>

#include "rbs/special_functions.hpp"

TEST(BesselI1, Examples)
{
    EXPECT_EQ(rbs::bessel_i1(0.0), 0.0);
    EXPECT_NEAR(rbs::bessel_i1(1.0), 0.5651591039924851, 1e-15);
    EXPECT_NEAR(rbs::bessel_i1(2.0), 1.5906368546373291, 1e-14);
}

TEST(BesselI1, MatchesBoostOracle)
{
    for (double x = 0.0; x <= 30.0; x += 0.37) {
        const double ref = boost::math::cyl_bessel_i(1, x);
        EXPECT_NEAR(rbs::bessel_i1(x), ref, 1e-13 * std::max(1.0, ref)) << "x=" << x;
    }
}

TEST(BesselI1, MonotoneAndOdd)
{
    double prev = -1.0;
    for (double x = 0.0; x <= 20.0; x += 0.05) {
        const double v = rbs::bessel_i1(x);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_DOUBLE_EQ(rbs::bessel_i1(-1.5), -rbs::bessel_i1(1.5));
}

TEST(BesselI1Ratio, Examples)
{
    EXPECT_EQ(rbs::bessel_i1_ratio(0.0), 0.5);
    EXPECT_NEAR(rbs::bessel_i1_ratio(2.0), 0.7953184273186645, 1e-15);
    EXPECT_NEAR(rbs::bessel_i1_ratio(1e-8), 0.5, 1e-15);
}

TEST(BesselI1Ratio, ConsistentWithI1AndAtLeastHalf)
{
    for (double x = 0.01; x <= 25.0; x += 0.13) {
        const double r = rbs::bessel_i1_ratio(x);
        EXPECT_NEAR(r, rbs::bessel_i1(x) / x, 1e-14 * r);
        EXPECT_GE(r, 0.5);
    }
}

TEST(BesselJ0, MatchesBoostOracle)
{
    for (double x = 0.0; x <= 10.0; x += 0.25) {
        EXPECT_NEAR(rbs::bessel_j0(x), boost::math::cyl_bessel_j(0, x), 1e-12) << "x=" << x;
    }
}

TEST(J0FirstZero, ValueAndResidual)
{
    const double z = rbs::j0_first_zero();
    EXPECT_NEAR(z, 2.404825557695773, 1e-12);
    EXPECT_LT(std::fabs(rbs::bessel_j0(z)), 1e-11);
    EXPECT_GT(z, 2.40);
    EXPECT_LT(z, 2.41);
}

TEST(Fnk, Examples)
{
    EXPECT_DOUBLE_EQ(rbs::f_nk(1.0, 0.5, {0, 0, 0.25}), 0.125);
    EXPECT_NEAR(rbs::f_nk(2.0, 1.0, {1, 1, 1.0}), std::log(3.0), 1e-15);
    for (int n = 0; n < 4; ++n) {
        for (int k = 0; k < 4; ++k) {
            EXPECT_EQ(rbs::f_nk(0.7, 0.7, {n, k, 2.0}), 0.0);
        }
    }
}

TEST(Fnk, DirectFormulaAgreement)
{
    const double a = 1.3;
    const double b = 0.4;
    const double lb = 0.8;
    for (int n = 0; n <= 5; ++n) {
        for (int k = 0; k <= 4; ++k) {
            const double expected = std::pow(lb, n + 1) * std::pow(a * b, n) / (std::tgamma(n + 1.0) * std::tgamma(n + 2.0)) *
                                    (a - b) * std::pow(std::log((a + b) / (a - b)), k) / std::tgamma(k + 1.0);
            EXPECT_NEAR(rbs::f_nk(a, b, {n, k, lb}), expected, 1e-14 * expected);
        }
    }
}

TEST(Fnk, NonnegativeAndVanishingOnBetaZero)
{
    for (double a = 0.1; a <= 2.0; a += 0.3) {
        for (double b = 0.0; b <= a; b += 0.05) {
            for (int n = 0; n <= 3; ++n) {
                for (int k = 0; k <= 3; ++k) {
                    EXPECT_GE(rbs::f_nk(a, b, {n, k, 1.5}), 0.0);
                }
            }
        }
        EXPECT_EQ(rbs::f_nk(a, 0.0, {1, 0, 1.0}), 0.0);
        EXPECT_EQ(rbs::f_nk(a, 0.0, {0, 2, 1.0}), 0.0);
        EXPECT_DOUBLE_EQ(rbs::f_nk(a, 0.0, {0, 0, 1.5}), 1.5 * a);
    }
}

TEST(Fnk, NegativeIndicesAndDomain)
{
    EXPECT_EQ(rbs::f_nk(1.0, 0.5, {-1, 0, 1.0}), 0.0);
    EXPECT_EQ(rbs::f_nk(1.0, 0.5, {0, -1, 1.0}), 0.0);
    EXPECT_THROW(rbs::f_nk(0.5, 1.0, {0, 0, 1.0}), std::domain_error);
    EXPECT_THROW(rbs::f_nk(1.0, -0.1, {0, 0, 1.0}), std::domain_error);
}

TEST(Fnk, SeriesInNSumsToBesselClosedForm)
{
    const double lb = 2.0;
    for (double a : {0.5, 1.0, 1.4}) {
        for (double b : {0.1, 0.5, 1.0}) {
            if (b > a || lb * a * b > 4.0) {
                continue;
            }
            double sum = 0.0;
            for (int n = 0; n <= 40; ++n) {
                sum += rbs::f_nk(a, b, {n, 0, lb});
            }
            const double closed = std::sqrt(lb) * (a - b) * rbs::bessel_i1(2.0 * std::sqrt(lb * a * b)) / std::sqrt(a * b);
            EXPECT_NEAR(sum, closed, 1e-8) << "a=" << a << " b=" << b;
        }
    }
}
