#pragma once

#include <cmath>
#include <stdexcept>

#include "rbs/combinatorics.hpp"
#include "rbs/kernel/grid.hpp"
#include "rbs/profile.hpp"
#include "rbs/special_functions.hpp"

namespace rbs {

/// Closed-form kernel for constant lambda: -(lambda/eps) rho I1(z)/z, z = sqrt((lambda/eps)(r^2 - rho^2)).
inline double exact_constant_kernel(double lambda0, double epsilon, double r, double rho)
{
    if (rho < 0.0 || rho > r) {
        throw std::domain_error("exact_constant_kernel: requires 0 <= rho <= r");
    }
    const double c = lambda0 / epsilon;
    return -c * rho * bessel_i1_ratio(std::sqrt(c * (r * r - rho * rho)));
}

/// Closed-form inverse kernel for constant lambda: -(lambda/eps) rho J1(z)/z.
inline double exact_constant_inverse_kernel(double lambda0, double epsilon, double r, double rho)
{
    if (rho < 0.0 || rho > r) {
        throw std::domain_error("exact_constant_inverse_kernel: requires 0 <= rho <= r");
    }
    const double c = lambda0 / epsilon;
    const double q = 0.25 * c * (r * r - rho * rho);
    double term = 0.5;
    double sum = term;
    for (int m = 0; m < 500; ++m) {
        term *= -q / (static_cast<double>(m + 1) * static_cast<double>(m + 2));
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum) && static_cast<double>(m + 2) * (m + 3) > q) {
            break;
        }
    }
    return -c * rho * sum;
}

enum class BoundVariant { corrected, printed };

/**
 * |K(r, rho)| <= 2 rho sqrt(lb) I1(x) / sqrt(r^2 - rho^2), x = 2 sqrt(lb (r^2 - rho^2)).
 * The printed variant is half of this and is not a valid bound in general.
 */
inline double kernel_bound(double r, double rho, const ReactionProfile& profile,
                           BoundVariant variant = BoundVariant::corrected)
{
    if (rho < 0.0 || rho > r || r > profile.radius() * (1.0 + 1e-12)) {
        throw std::domain_error("kernel_bound: requires 0 <= rho <= r <= R");
    }
    const double lb = profile.lambda_bar();
    const double d = std::sqrt(r * r - rho * rho);
    // On the diagonal the quotient tends to rho lambda_max / (2 eps) = 2 rho lb.
    const double value = d == 0.0 ? 2.0 * rho * lb : 2.0 * rho * std::sqrt(lb) * bessel_i1(2.0 * std::sqrt(lb) * d) / d;
    return variant == BoundVariant::corrected ? value : 0.5 * value;
}

/// F_n0 + sum_{i<n} sum_{j=1}^{n-i} C_{(n-i)j} / 4^(n-i) F_ij on every lattice node.
inline LatticeField series_bound_term(int n, const TriangleGrid& grid, const ReactionProfile& profile,
                                      const CatalanTriangle& tri)
{
    if (n < 1) {
        throw std::invalid_argument("series_bound_term: n must be >= 1");
    }
    if (tri.rows() < static_cast<std::size_t>(n)) {
        throw std::invalid_argument("series_bound_term: triangle has too few rows");
    }
    const double lb = profile.lambda_bar();
    return tabulate(grid, [&](double alpha, double beta) {
        double acc = f_nk(alpha, beta, {n, 0, lb});
        for (int i = 0; i < n; ++i) {
            for (int j = 1; j <= n - i; ++j) {
                acc += tri.scaled(static_cast<std::size_t>(n - i), static_cast<std::size_t>(j)) * f_nk(alpha, beta, {i, j, lb});
            }
        }
        return acc;
    });
}

} // namespace rbs
