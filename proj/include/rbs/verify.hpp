#pragma once

// Self-checks of a solved kernel pair, shared by the command-line `verify` suite and the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rbs/kernel/bounds.hpp"
#include "rbs/kernel/operators.hpp"
#include "rbs/kernel/solver.hpp"
#include "rbs/special_functions.hpp"

namespace rbs {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::string sci(double v)
{
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

} // namespace detail

/// Sup relative error of a kernel table against a closed form on the physical nodes.
inline double sup_relative_error(const KernelTable& t, const std::function<double(double, double)>& exact)
{
    const int n = static_cast<int>(t.grid.N());
    const double h = t.grid.delta();
    double err = 0.0;
    double scale = 0.0;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double e = exact(i * h, j * h);
            err = std::max(err, std::fabs(t.K_at(i, j) - e));
            scale = std::max(scale, std::fabs(e));
        }
    }
    return scale == 0.0 ? err : err / scale;
}

inline CheckResult check_oracle(const KernelTable& t, const ReactionProfile& p, double limit = 1e-3)
{
    const double lam = p(0.0);
    const double eps = p.epsilon();
    const bool direct = t.variant == KernelVariant::direct;
    const double err = sup_relative_error(t, [&](double r, double rho) {
        return direct ? exact_constant_kernel(lam, eps, r, rho) : exact_constant_inverse_kernel(lam, eps, r, rho);
    });
    return {std::string("closed form (") + to_string(t.variant) + ")", err <= limit,
            "sup rel err " + detail::sci(err) + " <= " + detail::sci(limit)};
}

/// K(r, 0) = 0 exactly and K(r, r) = -int_0^r lambda / (2 eps) within 10 delta^2 sup|lambda / (2 eps)|.
inline CheckResult check_boundary_conditions(const KernelTable& t, const ReactionProfile& p)
{
    const int n = static_cast<int>(t.grid.N());
    const double h = t.grid.delta();
    bool zero_ok = true;
    double diag_err = 0.0;
    for (int i = 0; i <= n; ++i) {
        zero_ok = zero_ok && t.K_at(i, 0) == 0.0;
        const double target = g0(2.0 * i * h, 0.0, p, 4 * std::max(1, i));
        diag_err = std::max(diag_err, std::fabs(t.K_at(i, i) - target));
    }
    const double limit = 10.0 * h * h * p.lambda_max() / (2.0 * p.epsilon());
    return {std::string("boundary conditions (") + to_string(t.variant) + ")", zero_ok && diag_err <= limit,
            std::string("K(r,0)=0 ") + (zero_ok ? "exact" : "violated") + ", diagonal err " + detail::sci(diag_err)};
}

/**
 * |K| <= corrected bound at every node. For constant lambda the bound is attained, so the
 * comparison allows the discretization error: bound * (1 + slack).
 */
inline CheckResult check_bound_domination(const KernelTable& t, const ReactionProfile& p, double slack = 1e-3)
{
    const int n = static_cast<int>(t.grid.N());
    const double h = t.grid.delta();
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double b = kernel_bound(i * h, j * h, p);
            const double k = std::fabs(t.K_at(i, j));
            if (k > b * (1.0 + slack) + 1e-14) {
                ok = false;
            }
            if (b > 0.0) {
                worst = std::max(worst, k / b);
            }
        }
    }
    return {std::string("bound domination (") + to_string(t.variant) + ")", ok,
            "max |K|/bound " + detail::sci(worst)};
}

inline CheckResult check_residual(const KernelTable& t, const KernelOperators& ops, const ReactionProfile& p)
{
    const double res = residual(t, ops, p);
    const double limit = 5.0 * t.tol * t.G.sup_norm();
    return {std::string("residual (") + to_string(t.variant) + ")", res <= limit,
            detail::sci(res) + " <= " + detail::sci(limit)};
}

inline std::vector<std::pair<std::string, std::function<double(double)>>> roundtrip_samples(double radius)
{
    return {
        {"1-(r/R)^2", [radius](double r) { return 1.0 - (r / radius) * (r / radius); }},
        {"cos(3r/R)", [radius](double r) { return std::cos(3.0 * r / radius); }},
        {"1+(r/R)^3", [radius](double r) { return 1.0 + std::pow(r / radius, 3); }},
    };
}

inline CheckResult check_roundtrip(const KernelTable& K, const KernelTable& L, double limit = 1e-3)
{
    double worst = 0.0;
    for (const auto& [name, f] : roundtrip_samples(K.grid.R())) {
        worst = std::max(worst, transform_roundtrip(K, L, f));
    }
    return {"transform roundtrip", worst < limit, "max rel err " + detail::sci(worst) + " < " + detail::sci(limit)};
}

/**
 * Majorant identity sum_{i=1}^k F_ni = H_s[sum_{i=1}^k F_(n-1)i] + 4 H_r[F_n(k-1)] for n <= 2,
 * k <= 2 with the constant weight lambda_bar, on an N x N lattice. Returns the largest error
 * relative to the sup of the left side.
 */
inline double majorant_identity_error(double lambda_bar, double radius, std::size_t N, unsigned threads = 1)
{
    const TriangleGrid grid(N, radius);
    const ReactionProfile flat = ReactionProfile::constant(4.0 * lambda_bar, 1.0, radius);
    const KernelOperators ops(grid, flat, KernelVariant::direct, threads);
    auto F = [&](int n, int k) {
        return tabulate(grid, [&](double a, double b) { return f_nk(a, b, {n, k, lambda_bar}); });
    };
    double worst = 0.0;
    for (int n = 0; n <= 2; ++n) {
        for (int k = 1; k <= 2; ++k) {
            LatticeField lhs(grid);
            LatticeField prev(grid);
            for (int i = 1; i <= k; ++i) {
                lhs += F(n, i);
                prev += F(n - 1, i);
            }
            LatticeField rhs = ops.smooth(prev, DiagonalTrace::vanishing);
            LatticeField sing = ops.singular(F(n, k - 1), DiagonalTrace::vanishing);
            sing *= 4.0;
            rhs += sing;
            double err = 0.0;
            for (std::size_t i = 0; i < lhs.values().size(); ++i) {
                err = std::max(err, std::fabs(lhs.values()[i] - rhs.values()[i]));
            }
            worst = std::max(worst, err / lhs.sup_norm());
        }
    }
    return worst;
}

inline CheckResult check_majorant_identity(double lambda_bar, double radius, unsigned threads = 1,
                                           double limit = 5e-2)
{
    const double err = majorant_identity_error(lambda_bar, radius, 100, threads);
    return {"majorant identities (N=100)", err <= limit, "max rel err " + detail::sci(err) + " <= " + detail::sci(limit)};
}

} // namespace rbs
