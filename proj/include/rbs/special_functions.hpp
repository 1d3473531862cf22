#pragma once

// Power-series special functions for the kernel bounds and oracles, plus the F_nk
// majorant family. Series are only used where they are well conditioned (x <= 30).

#include <cmath>
#include <stdexcept>

namespace rbs {

/// I_1(x) = sum_m (x/2)^(2m+1) / (m! (m+1)!), x >= 0.
inline double bessel_i1(double x)
{
    if (x < 0.0) {
        return -bessel_i1(-x);
    }
    const double half = 0.5 * x;
    const double q = half * half;
    double term = half;
    double sum = term;
    for (int m = 0; m < 500; ++m) {
        term *= q / (static_cast<double>(m + 1) * static_cast<double>(m + 2));
        if (term < 1e-15 * sum && static_cast<double>(m + 2) * static_cast<double>(m + 3) > q) {
            break;
        }
        sum += term;
    }
    return sum;
}

/// I_1(x)/x with the removable singularity filled in (value 1/2 at x = 0).
inline double bessel_i1_ratio(double x)
{
    x = std::fabs(x);
    const double q = 0.25 * x * x;
    double term = 0.5;
    double sum = term;
    for (int m = 0; m < 500; ++m) {
        term *= q / (static_cast<double>(m + 1) * static_cast<double>(m + 2));
        if (term < 1e-15 * sum && static_cast<double>(m + 2) * static_cast<double>(m + 3) > q) {
            break;
        }
        sum += term;
    }
    return sum;
}

/// J_0(x) by its alternating power series; accurate for |x| up to about 10.
inline double bessel_j0(double x)
{
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 200; ++m) {
        term *= -q / (static_cast<double>(m) * static_cast<double>(m));
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum) && static_cast<double>(m) * m > q) {
            break;
        }
    }
    return sum;
}

/// Smallest positive zero of J_0, by bisection on [2, 3].
inline double j0_first_zero()
{
    double lo = 2.0;
    double hi = 3.0;
    double f_lo = bessel_j0(lo);
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = bessel_j0(mid);
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct FnkParams {
    int n = 0;
    int k = 0;
    double lambda_bar = 0.0;
};

/**
 * Majorant family
 *
 *     F_nk(a, b) = lb^(n+1) a^n b^n / (n! (n+1)!) * (a - b) * log^k((a+b)/(a-b)) / k!
 *
 * on 0 <= b <= a. The diagonal a == b is the continuous extension 0, and negative n or k
 * give 0 by convention.
 */
inline double f_nk(double alpha, double beta, const FnkParams& p)
{
    if (beta < 0.0 || beta > alpha) {
        throw std::domain_error("f_nk: requires 0 <= beta <= alpha");
    }
    if (p.n < 0 || p.k < 0 || alpha == beta) {
        return 0.0;
    }
    double coef = p.lambda_bar;
    const double ab = alpha * beta;
    for (int m = 1; m <= p.n; ++m) {
        coef *= p.lambda_bar * ab / (static_cast<double>(m) * static_cast<double>(m + 1));
    }
    double value = coef * (alpha - beta);
    if (p.k > 0) {
        const double log_ratio = std::log((alpha + beta) / (alpha - beta));
        for (int m = 1; m <= p.k; ++m) {
            value *= log_ratio / static_cast<double>(m);
        }
    }
    return value;
}

} // namespace rbs
