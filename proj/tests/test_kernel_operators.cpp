#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rbs/kernel/operators.hpp"
#include "rbs/special_functions.hpp"

namespace {

rbs::LatticeField fnk_table(const rbs::TriangleGrid& g, int n, int k, double lb)
{
    return rbs::tabulate(g, [&](double a, double b) { return rbs::f_nk(a, b, {n, k, lb}); });
}

double sup_diff(const rbs::LatticeField& x, const rbs::LatticeField& y)
{
    double m = 0.0;
    for (std::size_t i = 0; i < x.values().size(); ++i) {
        m = std::max(m, std::fabs(x.values()[i] - y.values()[i]));
    }
    return m;
}

rbs::LatticeField random_vanishing_field(const rbs::TriangleGrid& g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    rbs::LatticeField f(g);
    for (int a = 0; a <= g.max_a(); ++a) {
        for (int b = 0; b < std::min(a, g.max_b(a) + 1); ++b) {
            f(a, b) = u(rng);
        }
    }
    return f;
}

} // namespace

TEST(KernelOperators, ZeroInZeroOut)
{
    const rbs::TriangleGrid g(16, 1.0);
    const auto p = rbs::ReactionProfile::constant(5.0, 1.0, 1.0);
    const rbs::KernelOperators ops(g, p, rbs::KernelVariant::direct);
    const rbs::LatticeField zero(g);
    EXPECT_EQ(ops.smooth(zero).sup_norm(), 0.0);
    EXPECT_EQ(ops.singular(zero).sup_norm(), 0.0);
    EXPECT_EQ(ops.combined(zero).sup_norm(), 0.0);
}

TEST(KernelOperators, VanishesOnBetaZeroAndDiagonal)
{
    const rbs::TriangleGrid g(12, 1.0);
    const auto p = rbs::ReactionProfile::constant(5.0, 1.0, 1.0);
    const rbs::KernelOperators ops(g, p, rbs::KernelVariant::direct);
    const auto h = ops.combined(fnk_table(g, 0, 0, 1.25));
    for (int a = 0; a <= g.max_a(); ++a) {
        EXPECT_EQ(h(a, 0), 0.0);
        if (a <= g.max_b(a)) {
            EXPECT_EQ(h(a, a), 0.0);
        }
    }
}

TEST(KernelOperators, Linear)
{
    const rbs::TriangleGrid g(24, 1.0);
    const auto p = rbs::ReactionProfile::polynomial({3.0, 1.0, 2.0}, 1.0, 1.0);
    const rbs::KernelOperators ops(g, p, rbs::KernelVariant::direct);
    std::mt19937_64 rng(7);
    const auto g1 = random_vanishing_field(g, rng);
    const auto g2 = random_vanishing_field(g, rng);
    const double s1 = 0.7;
    const double s2 = -2.3;
    rbs::LatticeField mix = g1;
    mix *= s1;
    rbs::LatticeField t = g2;
    t *= s2;
    mix += t;
    for (int part = 0; part < 2; ++part) {
        auto apply = [&](const rbs::LatticeField& f) { return part == 0 ? ops.smooth(f) : ops.singular(f); };
        rbs::LatticeField expected = apply(g1);
        expected *= s1;
        rbs::LatticeField other = apply(g2);
        other *= s2;
        expected += other;
        EXPECT_LE(sup_diff(apply(mix), expected), 1e-12 * expected.sup_norm()) << "part " << part;
    }
}

TEST(KernelOperators, SmoothOfF00IsF10)
{
    const double lb = 0.25;
    const auto p = rbs::ReactionProfile::constant(4.0 * lb, 1.0, 1.0);
    double prev = 1.0;
    for (std::size_t n : {20, 40, 80}) {
        const rbs::TriangleGrid g(n, 1.0);
        const rbs::KernelOperators ops(g, p, rbs::KernelVariant::direct);
        const double err = sup_diff(ops.smooth(fnk_table(g, 0, 0, lb), rbs::DiagonalTrace::vanishing), fnk_table(g, 1, 0, lb));
        EXPECT_LT(err, 1e-5);
        EXPECT_LT(err, 0.3 * prev);
        prev = err;
    }
}

TEST(KernelOperators, SingularOfF00IsQuarterF01)
{
    const double lb = 0.25;
    const rbs::TriangleGrid g(80, 1.0);
    const auto h = rbs::apply_singular_operator(fnk_table(g, 0, 0, lb), rbs::DiagonalTrace::vanishing);
    // (alpha, beta) = (1, 0.5) sits at lattice node (80, 40).
    const double expected = 0.25 * 0.5 * std::log(3.0) / 4.0;
    EXPECT_NEAR(expected, 0.034328, 1e-5);
    EXPECT_NEAR(h(80, 40), expected, 0.01 * expected);
    const auto target = fnk_table(g, 0, 1, lb);
    rbs::LatticeField quarter = target;
    quarter *= 0.25;
    EXPECT_LT(sup_diff(h, quarter), 0.01 * quarter.sup_norm());
}

TEST(KernelOperators, SingularOfF01MatchesMajorantIdentity)
{
    const double lb = 1.0;
    // The log singularity limits this to roughly first order in the mesh width.
    double prev = 1.0;
    for (std::size_t n : {20, 40, 80, 160}) {
        const rbs::TriangleGrid g(n, 1.0);
        const auto h = rbs::apply_singular_operator(fnk_table(g, 0, 1, lb), rbs::DiagonalTrace::vanishing);
        rbs::LatticeField target = fnk_table(g, 0, 1, lb);
        target += fnk_table(g, 0, 2, lb);
        target *= 0.25;
        const double rel = sup_diff(h, target) / target.sup_norm();
        EXPECT_LT(rel, 0.7 * prev) << "N=" << n;
        prev = rel;
    }
    EXPECT_LT(prev, 0.03);
}

TEST(KernelOperators, InverseWeightFlipsSignForConstantLambda)
{
    const rbs::TriangleGrid g(16, 1.0);
    const auto p = rbs::ReactionProfile::constant(6.0, 2.0, 1.0);
    const auto f = fnk_table(g, 1, 1, 0.5);
    auto direct = rbs::apply_smooth_operator(f, p, rbs::KernelVariant::direct);
    const auto inverse = rbs::apply_smooth_operator(f, p, rbs::KernelVariant::inverse);
    direct *= -1.0;
    EXPECT_LE(sup_diff(direct, inverse), 1e-14 * inverse.sup_norm());
}

TEST(KernelOperators, InverseWeightEvaluatesLambdaAtHalfSum)
{
    // lambda(r) = r: inverse weight -(eta + sig)/(8 eps); applied to G = 1 off the diagonal the
    // result at (alpha, beta) is -(1/8) int_beta^alpha int_0^beta (eta + sig) dsig deta.
    const rbs::TriangleGrid g(40, 1.0);
    const auto p = rbs::ReactionProfile::polynomial({0.0, 1.0}, 1.0, 1.0);
    const auto one = rbs::tabulate(g, [](double a, double b) { return a > b ? std::sqrt(a * a - b * b) : 0.0; });
    const auto h = rbs::apply_smooth_operator(one, p, rbs::KernelVariant::inverse);
    // Direct check on G = sqrt(eta^2 - sig^2) with an independent tensor Simpson rule.
    const double alpha = 1.0;
    const double beta = 0.5;
    const int m = 400;
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double eta = beta + (alpha - beta) * i / m;
        const double wi = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        for (int j = 0; j <= m; ++j) {
            const double sig = beta * j / m;
            const double wj = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            acc += wi * wj * (-(eta + sig) / 8.0) * std::sqrt(eta * eta - sig * sig);
        }
    }
    acc *= (alpha - beta) / (3.0 * m) * beta / (3.0 * m);
    EXPECT_NEAR(h(40, 20), acc, 1e-6 * std::fabs(acc));
}

TEST(KernelOperators, ThreadCountDoesNotChangeBits)
{
    const rbs::TriangleGrid g(40, 1.0);
    const auto p = rbs::ReactionProfile::polynomial({10.0, 0.0, 10.0}, 1.0, 1.0);
    std::mt19937_64 rng(3);
    const auto f = random_vanishing_field(g, rng);
    const auto one = rbs::KernelOperators(g, p, rbs::KernelVariant::direct, 1).combined(f);
    for (unsigned threads : {2u, 3u, 8u}) {
        const auto many = rbs::KernelOperators(g, p, rbs::KernelVariant::direct, threads).combined(f);
        for (std::size_t i = 0; i < one.values().size(); ++i) {
            ASSERT_EQ(one.values()[i], many.values()[i]) << "threads=" << threads;
        }
    }
}

TEST(KernelOperators, RejectsMismatchedInputs)
{
    const rbs::TriangleGrid g(8, 1.0);
    const auto p = rbs::ReactionProfile::constant(1.0, 1.0, 2.0);
    EXPECT_THROW(rbs::KernelOperators(g, p, rbs::KernelVariant::direct), std::invalid_argument);
    const auto q = rbs::ReactionProfile::constant(1.0, 1.0, 1.0);
    const rbs::KernelOperators ops(g, q, rbs::KernelVariant::direct);
    EXPECT_THROW((void)ops.combined(rbs::LatticeField(rbs::TriangleGrid(9, 1.0))), std::invalid_argument);
}

TEST(ReducedField, DiagonalClosures)
{
    const rbs::TriangleGrid g(10, 1.0);
    // G = sqrt(alpha^2 - beta^2) * (1 + rho^2): the reduced field is 1 + ((alpha - beta)/2)^2, even in rho.
    const auto G = rbs::tabulate(g, [](double a, double b) {
        const double rho = 0.5 * (a - b);
        return std::sqrt(a * a - b * b) * (1.0 + rho * rho);
    });
    const auto ext = rbs::reduced_field(G);
    const auto van = rbs::reduced_field(G, rbs::DiagonalTrace::vanishing);
    for (int a = 2; 2 * a <= g.max_a(); ++a) {
        EXPECT_NEAR(ext(a, a), 1.0, 1e-12);
        EXPECT_EQ(van(a, a), 0.0);
    }
    EXPECT_NEAR(ext(3, 1), 1.0 + 0.01, 1e-12);
}
