#pragma once

/**
 * @file operators.hpp
 * @brief Discrete versions of the two integral operators of the kernel integral equation,
 *
 *     H_s[G](a, b) = int_b^a int_0^b  w(eta, sig) G(eta, sig)                         dsig deta
 *     H_r[G](a, b) = int_b^a int_0^b  eta sig / (eta^2 - sig^2)^2 G(eta, sig)         dsig deta
 *
 * with w = lambda((eta - sig)/2)/(4 eps) for the direct kernel and
 * w = -lambda((eta + sig)/2)/(4 eps) for the inverse kernel.
 *
 * Product integration: G is written as sqrt(eta^2 - sig^2) * g with g piecewise bilinear on
 * lattice cells, and the weights (including the sqrt factor) are integrated against the four
 * bilinear hats once per grid. The singular weight then behaves like (eta - sig)^(-3/2) and
 * only the cell touching the corner (b, b) of each integration rectangle is singular; those
 * cells go through a Duffy split with a square-root radial substitution, which leaves a
 * smooth integrand, and are refined dyadically until the moments settle.
 *
 * Applying an operator costs O(lattice) per call through row and column prefix sums.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbs/kernel/grid.hpp"
#include "rbs/parallel.hpp"
#include "rbs/profile.hpp"
#include "rbs/quadrature.hpp"

namespace rbs {

enum class KernelVariant { direct, inverse };

inline const char* to_string(KernelVariant v) { return v == KernelVariant::direct ? "direct" : "inverse"; }

class QuadratureFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// How g = G / sqrt(alpha^2 - beta^2) is closed on the diagonal, where the quotient is 0/0.
enum class DiagonalTrace {
    extrapolate, ///< g even in rho to leading order: the converged kernel and its iterates
    vanishing,   ///< g -> 0 on the diagonal, e.g. G = O((alpha - beta) log^k)
};

/// g = G / sqrt(alpha^2 - beta^2) off the diagonal. With `extrapolate` the diagonal value comes
/// from rho = delta and 2 delta; with `vanishing` it is 0.
inline LatticeField reduced_field(const LatticeField& G, DiagonalTrace trace = DiagonalTrace::extrapolate)
{
    const TriangleGrid& grid = G.grid();
    LatticeField g(grid);
    const double d2 = grid.delta() * grid.delta();
    for (int a = 1; a <= grid.max_a(); ++a) {
        for (int b = 0; b <= grid.max_b(a); ++b) {
            if (b < a) {
                g(a, b) = G(a, b) / std::sqrt(static_cast<double>(a - b) * static_cast<double>(a + b) * d2);
            }
        }
    }
    if (trace == DiagonalTrace::vanishing) {
        return g;
    }
    for (int a = 1; 2 * a <= grid.max_a(); ++a) {
        g(a, a) = (a >= 2) ? (4.0 * g(a + 1, a - 1) - g(a + 2, a - 2)) / 3.0 : g(a + 1, a - 1);
    }
    return g;
}

class KernelOperators {
public:
    KernelOperators(const TriangleGrid& grid, const ReactionProfile& profile, KernelVariant variant,
                    unsigned threads = 1)
        : grid_(grid), variant_(variant), threads_(threads)
    {
        if (std::fabs(profile.radius() - grid.R()) > 1e-12 * grid.R()) {
            throw std::invalid_argument("KernelOperators: profile radius does not match grid");
        }
        const int two_n = grid_.max_a();
        cell_offset_.assign(static_cast<std::size_t>(two_n) + 1, 0);
        std::size_t total = 0;
        for (int k = 0; k < two_n; ++k) {
            cell_offset_[static_cast<std::size_t>(k)] = total;
            total += static_cast<std::size_t>(cells_in_row(k));
        }
        cell_offset_[static_cast<std::size_t>(two_n)] = total;
        moments_.resize(total);
        parallel_for(0, static_cast<std::size_t>(two_n), threads_, [&](std::size_t uk) {
            const int k = static_cast<int>(uk);
            for (int m = 0; m < cells_in_row(k); ++m) {
                moments_[cell_offset_[uk] + static_cast<std::size_t>(m)] = integrate_cell(k, m, profile);
            }
        });
    }

    [[nodiscard]] const TriangleGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] KernelVariant variant() const noexcept { return variant_; }
    [[nodiscard]] std::size_t cell_count() const noexcept { return moments_.size(); }

    [[nodiscard]] LatticeField smooth(const LatticeField& G, DiagonalTrace trace = DiagonalTrace::extrapolate) const
    {
        return apply(G, Part::smooth, trace);
    }
    [[nodiscard]] LatticeField singular(const LatticeField& G, DiagonalTrace trace = DiagonalTrace::extrapolate) const
    {
        return apply(G, Part::singular, trace);
    }
    [[nodiscard]] LatticeField combined(const LatticeField& G, DiagonalTrace trace = DiagonalTrace::extrapolate) const
    {
        return apply(G, Part::both, trace);
    }

private:
    enum class Part { smooth, singular, both };

    struct Moments {
        std::array<double, 4> smooth{};
        std::array<double, 4> singular{};
    };

    // Cells (k, m) span [k, k+1] x [m, m+1] in lattice units; only cells with m + 1 <= k and
    // k + m + 2 <= 2N are ever inside an integration rectangle.
    [[nodiscard]] int cells_in_row(int k) const noexcept { return std::max(0, std::min(k - 1, grid_.max_a() - 2 - k) + 1); }

    [[nodiscard]] double smooth_weight(const ReactionProfile& p, double eta, double sig) const
    {
        if (variant_ == KernelVariant::direct) {
            return p(0.5 * (eta - sig)) / (4.0 * p.epsilon());
        }
        return -p(0.5 * (eta + sig)) / (4.0 * p.epsilon());
    }

    // Integrand values at one point: hat functions times both weights, scaled by `jac`.
    void accumulate(const ReactionProfile& p, double eta, double sig, double diff, double x, double y, double jac,
                    Moments& acc) const
    {
        const double sum = eta + sig;
        const double s = std::sqrt(diff * sum);
        const double ws = smooth_weight(p, eta, sig) * s * jac;
        const double wr = eta * sig / (diff * sum * s) * jac;
        const std::array<double, 4> hat{(1 - x) * (1 - y), x * (1 - y), (1 - x) * y, x * y};
        for (int i = 0; i < 4; ++i) {
            acc.smooth[i] += ws * hat[i];
            acc.singular[i] += wr * hat[i];
        }
    }

    static double moment_gap(const Moments& a, const Moments& b)
    {
        double gap = 0.0;
        for (int i = 0; i < 4; ++i) {
            gap = std::max({gap, std::fabs(a.smooth[i] - b.smooth[i]), std::fabs(a.singular[i] - b.singular[i])});
        }
        return gap;
    }

    static double moment_scale(const Moments& a)
    {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            s = std::max({s, std::fabs(a.smooth[i]), std::fabs(a.singular[i])});
        }
        return s;
    }

    static void add(Moments& into, const Moments& m)
    {
        for (int i = 0; i < 4; ++i) {
            into.smooth[i] += m.smooth[i];
            into.singular[i] += m.singular[i];
        }
    }

    // Regular cell: tensor Gauss on the local square [x0, x0+len] x [y0, y0+len].
    Moments regular_block(const ReactionProfile& p, int k, int m, double x0, double y0, double len) const
    {
        const auto& g = quad::UnitGauss<10>::instance();
        const double h = grid_.delta();
        Moments acc;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double x = x0 + len * g.x[i];
            for (std::size_t j = 0; j < g.x.size(); ++j) {
                const double y = y0 + len * g.x[j];
                const double eta = (k + x) * h;
                const double sig = (m + y) * h;
                const double diff = ((k - m) + (x - y)) * h;
                accumulate(p, eta, sig, diff, x, y, g.w[i] * g.w[j] * len * len * h * h, acc);
            }
        }
        return acc;
    }

    Moments regular_adaptive(const ReactionProfile& p, int k, int m, double x0, double y0, double len,
                             const Moments& whole, int depth) const
    {
        const double half = 0.5 * len;
        Moments parts[4] = {regular_block(p, k, m, x0, y0, half), regular_block(p, k, m, x0 + half, y0, half),
                            regular_block(p, k, m, x0, y0 + half, half),
                            regular_block(p, k, m, x0 + half, y0 + half, half)};
        Moments refined;
        for (const auto& part : parts) {
            add(refined, part);
        }
        if (moment_gap(refined, whole) <= 1e-13 * moment_scale(refined) || depth >= 8) {
            return refined;
        }
        Moments out;
        add(out, regular_adaptive(p, k, m, x0, y0, half, parts[0], depth + 1));
        add(out, regular_adaptive(p, k, m, x0 + half, y0, half, parts[1], depth + 1));
        add(out, regular_adaptive(p, k, m, x0, y0 + half, half, parts[2], depth + 1));
        add(out, regular_adaptive(p, k, m, x0 + half, y0 + half, half, parts[3], depth + 1));
        return out;
    }

    // Corner cell (k = m + 1): singular vertex at local (x, y) = (0, 1). With u = x h and
    // v = (1 - y) h, each half-triangle is mapped by u = S, v = S t (or swapped) and S = h q^2.
    Moments corner_block(const ReactionProfile& p, int k, bool swap, double q0, double t0, double len) const
    {
        const auto& g = quad::UnitGauss<10>::instance();
        const double h = grid_.delta();
        const double corner = k * h;
        Moments acc;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double q = q0 + len * g.x[i];
            const double S = h * q * q;
            for (std::size_t j = 0; j < g.x.size(); ++j) {
                const double t = t0 + len * g.x[j];
                const double u = swap ? S * t : S;
                const double v = swap ? S : S * t;
                const double jac = 2.0 * h * h * q * q * q * g.w[i] * g.w[j] * len * len;
                accumulate(p, corner + u, corner - v, S * (1.0 + t), u / h, 1.0 - v / h, jac, acc);
            }
        }
        return acc;
    }

    Moments corner_adaptive(const ReactionProfile& p, int k, bool swap, double q0, double t0, double len,
                            const Moments& whole, int depth) const
    {
        const double half = 0.5 * len;
        Moments parts[4] = {corner_block(p, k, swap, q0, t0, half), corner_block(p, k, swap, q0 + half, t0, half),
                            corner_block(p, k, swap, q0, t0 + half, half),
                            corner_block(p, k, swap, q0 + half, t0 + half, half)};
        Moments refined;
        for (const auto& part : parts) {
            add(refined, part);
        }
        if (moment_gap(refined, whole) <= 1e-12 * moment_scale(refined)) {
            return refined;
        }
        if (depth >= 40) {
            throw QuadratureFailure("corner refinement did not settle within 40 levels at cell k=" +
                                    std::to_string(k));
        }
        Moments out;
        add(out, corner_adaptive(p, k, swap, q0, t0, half, parts[0], depth + 1));
        add(out, corner_adaptive(p, k, swap, q0 + half, t0, half, parts[1], depth + 1));
        add(out, corner_adaptive(p, k, swap, q0, t0 + half, half, parts[2], depth + 1));
        add(out, corner_adaptive(p, k, swap, q0 + half, t0 + half, half, parts[3], depth + 1));
        return out;
    }

    Moments integrate_cell(int k, int m, const ReactionProfile& p) const
    {
        if (k == m + 1) {
            Moments out;
            for (bool swap : {false, true}) {
                add(out, corner_adaptive(p, k, swap, 0.0, 0.0, 1.0, corner_block(p, k, swap, 0.0, 0.0, 1.0), 1));
            }
            return out;
        }
        const Moments whole = regular_block(p, k, m, 0.0, 0.0, 1.0);
        if (k - m > 8) {
            return whole;
        }
        return regular_adaptive(p, k, m, 0.0, 0.0, 1.0, whole, 1);
    }

    LatticeField apply(const LatticeField& G, Part part, DiagonalTrace trace) const
    {
        if (!(G.grid() == grid_)) {
            throw std::invalid_argument("KernelOperators: field grid mismatch");
        }
        const LatticeField g = reduced_field(G, trace);
        const int two_n = grid_.max_a();
        // prefix[cell_offset(k) + b - 1] = sum_{m < b} cell(k, m)
        std::vector<double> prefix(moments_.size(), 0.0);
        parallel_for(0, static_cast<std::size_t>(two_n), threads_, [&](std::size_t uk) {
            const int k = static_cast<int>(uk);
            double run = 0.0;
            for (int m = 0; m < cells_in_row(k); ++m) {
                const Moments& mo = moments_[cell_offset_[uk] + static_cast<std::size_t>(m)];
                const std::array<double, 4> nodes{g(k, m), g(k + 1, m), g(k, m + 1), g(k + 1, m + 1)};
                double c = 0.0;
                for (int i = 0; i < 4; ++i) {
                    double w = 0.0;
                    if (part != Part::singular) {
                        w += mo.smooth[i];
                    }
                    if (part != Part::smooth) {
                        w += mo.singular[i];
                    }
                    c += w * nodes[i];
                }
                run += c;
                prefix[cell_offset_[uk] + static_cast<std::size_t>(m)] = run;
            }
        });
        LatticeField out(grid_);
        parallel_for(1, static_cast<std::size_t>(grid_.N()) + 1, threads_, [&](std::size_t ub) {
            const int b = static_cast<int>(ub);
            double run = 0.0;
            for (int a = b + 1; a <= two_n - b; ++a) {
                const int k = a - 1;
                run += prefix[cell_offset_[static_cast<std::size_t>(k)] + static_cast<std::size_t>(b - 1)];
                out(a, b) = run;
            }
        });
        return out;
    }

    TriangleGrid grid_;
    KernelVariant variant_;
    unsigned threads_;
    std::vector<std::size_t> cell_offset_;
    std::vector<Moments> moments_;
};

/// One-shot H_s[G]; builds the cell moments for this call only.
inline LatticeField apply_smooth_operator(const LatticeField& G, const ReactionProfile& profile, KernelVariant variant,
                                          DiagonalTrace trace = DiagonalTrace::extrapolate, unsigned threads = 1)
{
    return KernelOperators(G.grid(), profile, variant, threads).smooth(G, trace);
}

/// One-shot H_r[G]; the singular weight does not depend on the plant.
inline LatticeField apply_singular_operator(const LatticeField& G, DiagonalTrace trace = DiagonalTrace::extrapolate,
                                            unsigned threads = 1)
{
    const ReactionProfile none = ReactionProfile::constant(0.0, 1.0, G.grid().R());
    return KernelOperators(G.grid(), none, KernelVariant::direct, threads).singular(G, trace);
}

} // namespace rbs
