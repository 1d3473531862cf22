#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbs/kernel/grid.hpp"
#include "rbs/kernel/operators.hpp"
#include "rbs/profile.hpp"
#include "rbs/quadrature.hpp"

namespace rbs {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 200;
    KernelVariant variant = KernelVariant::direct;
    unsigned threads = 1;
};

/// Kernel on the (alpha, beta) lattice: G and the physical kernel K (or L) side by side.
struct KernelTable {
    TriangleGrid grid;
    KernelVariant variant = KernelVariant::direct;
    LatticeField G;
    LatticeField K;
    int iterations_used = 0;
    std::vector<double> increment_history;
    double tol = 0.0;

    KernelTable(const TriangleGrid& g, KernelVariant v) : grid(g), variant(v), G(g), K(g) {}

    /// K(r_i, rho_j) on the physical grid, 0 <= j <= i <= N.
    [[nodiscard]] double K_at(int i, int j) const { return K.physical(i, j); }

    /// K(R, rho), linear in rho between physical nodes.
    [[nodiscard]] double boundary_gain(double rho) const
    {
        const int n = static_cast<int>(grid.N());
        if (rho < 0.0 || rho > grid.R() * (1.0 + 1e-12)) {
            throw std::domain_error("boundary_gain: rho outside [0, R]");
        }
        const double s = std::min(rho / grid.delta(), static_cast<double>(n));
        const int j = std::min(static_cast<int>(s), n - 1);
        const double t = s - j;
        return (1.0 - t) * K_at(n, j) + t * K_at(n, j + 1);
    }
};

class MaxIterExceeded : public std::runtime_error {
public:
    MaxIterExceeded(double last_increment, KernelTable partial)
        : std::runtime_error("kernel series did not converge: last increment " + std::to_string(last_increment)),
          last_increment_(last_increment), partial_(std::make_shared<KernelTable>(std::move(partial)))
    {
    }

    [[nodiscard]] double last_increment() const noexcept { return last_increment_; }
    [[nodiscard]] const KernelTable& partial() const noexcept { return *partial_; }

private:
    double last_increment_;
    std::shared_ptr<const KernelTable> partial_;
};

/// -int_{beta/2}^{alpha/2} lambda / (2 eps), Simpson with `panels` panels.
inline double g0(double alpha, double beta, const ReactionProfile& profile, int panels = 4)
{
    if (alpha == beta) {
        return 0.0;
    }
    const double eps = profile.epsilon();
    return -quad::simpson([&](double rho) { return profile(rho) / (2.0 * eps); }, 0.5 * beta, 0.5 * alpha,
                          std::max(4, panels));
}

inline LatticeField g0_table(const TriangleGrid& grid, const ReactionProfile& profile)
{
    LatticeField out(grid);
    for (int a = 0; a <= grid.max_a(); ++a) {
        for (int b = 0; b <= grid.max_b(a); ++b) {
            out(a, b) = g0(grid.coord(a), grid.coord(b), profile, 2 * (a - b));
        }
    }
    return out;
}

/// K = sqrt(rho / r) G, with K = 0 on rho = 0.
inline LatticeField physical_kernel(const LatticeField& G)
{
    const TriangleGrid& grid = G.grid();
    LatticeField K(grid);
    for (int a = 1; a <= grid.max_a(); ++a) {
        for (int b = 0; b <= grid.max_b(a); ++b) {
            if (b < a) {
                K(a, b) = G(a, b) * std::sqrt(static_cast<double>(a - b) / static_cast<double>(a + b));
            }
        }
    }
    return K;
}

namespace detail {

inline KernelTable finish(KernelTable t)
{
    t.K = physical_kernel(t.G);
    return t;
}

} // namespace detail

/// Successive approximations G = sum_k G_k with G_{k+1} = (H_s + H_r)[G_k].
inline KernelTable solve_kernel(const ReactionProfile& profile, const KernelOperators& ops, const SolverOptions& opt)
{
    if (!(opt.tol > 0.0)) {
        throw std::invalid_argument("solve_kernel: tol must be positive");
    }
    if (opt.max_iter < 1) {
        throw std::invalid_argument("solve_kernel: max_iter must be >= 1");
    }
    if (ops.variant() != opt.variant) {
        throw std::invalid_argument("solve_kernel: operator variant does not match options");
    }
    const TriangleGrid& grid = ops.grid();
    KernelTable table(grid, opt.variant);
    table.tol = opt.tol;
    LatticeField term = g0_table(grid, profile);
    table.G = term;
    table.iterations_used = 1;
    table.increment_history.push_back(term.sup_norm());
    for (;;) {
        const double last = table.increment_history.back();
        if (last < opt.tol * std::max(1.0, table.G.sup_norm())) {
            return detail::finish(std::move(table));
        }
        if (table.iterations_used >= opt.max_iter) {
            throw MaxIterExceeded(last, detail::finish(std::move(table)));
        }
        term = ops.combined(term);
        table.G += term;
        ++table.iterations_used;
        table.increment_history.push_back(term.sup_norm());
    }
}

inline KernelTable solve_kernel(const ReactionProfile& profile, const TriangleGrid& grid, const SolverOptions& opt)
{
    const KernelOperators ops(grid, profile, opt.variant, opt.threads);
    return solve_kernel(profile, ops, opt);
}

/// sup over nodes of |G - g0 - H_s[G] - H_r[G]|.
inline double residual(const KernelTable& table, const KernelOperators& ops, const ReactionProfile& profile)
{
    if (!(ops.grid() == table.grid) || ops.variant() != table.variant) {
        throw std::invalid_argument("residual: operators do not match table");
    }
    const LatticeField h = ops.combined(table.G);
    const LatticeField base = g0_table(table.grid, profile);
    const auto g = table.G.values();
    const auto hv = h.values();
    const auto bv = base.values();
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        worst = std::max(worst, std::fabs(g[i] - bv[i] - hv[i]));
    }
    return worst;
}

inline double residual(const KernelTable& table, const ReactionProfile& profile, unsigned threads = 1)
{
    const KernelOperators ops(table.grid, profile, table.variant, threads);
    return residual(table, ops, profile);
}

/// Applies w = u - int_0^r K u, then u' = w + int_0^r L w on the physical grid (trapezoid) and
/// returns max |u' - u| / max |u|. Zero input returns 0.
inline double transform_roundtrip(const KernelTable& K, const KernelTable& L, const std::function<double(double)>& u)
{
    if (!(K.grid == L.grid)) {
        throw std::invalid_argument("transform_roundtrip: kernels live on different grids");
    }
    if (K.variant != KernelVariant::direct || L.variant != KernelVariant::inverse) {
        throw std::invalid_argument("transform_roundtrip: expects a direct and an inverse kernel");
    }
    const int n = static_cast<int>(K.grid.N());
    const double h = K.grid.delta();
    std::vector<double> us(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        us[static_cast<std::size_t>(i)] = u(i * h);
    }
    auto volterra = [&](const KernelTable& k, const std::vector<double>& f, double sign) {
        std::vector<double> out(f.size());
        for (int i = 0; i <= n; ++i) {
            double acc = 0.0;
            for (int j = 0; j <= i; ++j) {
                const double w = (j == 0 || j == i) ? 0.5 : 1.0;
                acc += w * k.K_at(i, j) * f[static_cast<std::size_t>(j)];
            }
            out[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i)] + sign * h * acc;
        }
        return out;
    };
    const auto w = volterra(K, us, -1.0);
    const auto back = volterra(L, w, 1.0);
    double err = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        err = std::max(err, std::fabs(back[i] - us[i]));
        scale = std::max(scale, std::fabs(us[i]));
    }
    return scale == 0.0 ? 0.0 : err / scale;
}

} // namespace rbs
