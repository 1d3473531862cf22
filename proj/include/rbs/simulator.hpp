#pragma once

/**
 * @file simulator.hpp
 * @brief Radial reaction-diffusion plant u_t = (eps/r)(r u_r)_r + lambda(r) u on [0, R] with
 * boundary actuation u(t, R) = U(t), integrated by Crank-Nicolson on a uniform radial grid.
 *
 * The feedback U = sum_j w_j u_j is imposed implicitly: the new boundary value is an unknown of
 * the same linear system, which is tridiagonal plus one dense last row and is solved by a
 * bordered elimination in O(M) per step.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbs/kernel/io.hpp"
#include "rbs/kernel/solver.hpp"
#include "rbs/profile.hpp"

namespace rbs {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RadialGrid {
public:
    RadialGrid(std::size_t subdivisions, double radius) : m_(subdivisions), radius_(radius)
    {
        if (subdivisions < 8) {
            throw std::invalid_argument("RadialGrid: M must be >= 8");
        }
        if (!(radius > 0.0)) {
            throw std::invalid_argument("RadialGrid: R must be positive");
        }
    }

    [[nodiscard]] std::size_t M() const noexcept { return m_; }
    [[nodiscard]] double R() const noexcept { return radius_; }
    [[nodiscard]] double dr() const noexcept { return radius_ / static_cast<double>(m_); }
    [[nodiscard]] double r(std::size_t i) const noexcept
    {
        return i == m_ ? radius_ : static_cast<double>(i) * dr();
    }
    [[nodiscard]] std::size_t size() const noexcept { return m_ + 1; }

private:
    std::size_t m_;
    double radius_;
};

/// Rows 0..M-1 of the spatial operator as a tridiagonal band; row M belongs to the boundary.
struct RadialOperator {
    std::vector<double> lower; // coefficient of u_{i-1}
    std::vector<double> diag;  // coefficient of u_i
    std::vector<double> upper; // coefficient of u_{i+1}

    /// (A u)_i for i < M; entry M of the result is 0.
    [[nodiscard]] std::vector<double> apply(const std::vector<double>& u) const
    {
        const std::size_t m = diag.size();
        if (u.size() != m + 1) {
            throw std::invalid_argument("RadialOperator::apply: size mismatch");
        }
        std::vector<double> out(m + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            out[i] = diag[i] * u[i] + upper[i] * u[i + 1] + (i > 0 ? lower[i] * u[i - 1] : 0.0);
        }
        return out;
    }
};

inline RadialOperator build_operator(const RadialGrid& grid, const ReactionProfile& profile)
{
    if (std::fabs(grid.R() - profile.radius()) > 1e-12 * grid.R()) {
        throw std::invalid_argument("build_operator: grid and profile radii differ");
    }
    const std::size_t m = grid.M();
    const double eps = profile.epsilon();
    const double h = grid.dr();
    const double h2 = h * h;
    RadialOperator op;
    op.lower.assign(m, 0.0);
    op.diag.assign(m, 0.0);
    op.upper.assign(m, 0.0);
    // Origin: (1/r)(r u_r)_r -> 2 u_rr, with the symmetric ghost u_{-1} = u_1.
    op.diag[0] = -4.0 * eps / h2 + profile(0.0);
    op.upper[0] = 4.0 * eps / h2;
    for (std::size_t i = 1; i < m; ++i) {
        const double ri = grid.r(i);
        op.lower[i] = eps / h2 - eps / (2.0 * ri * h);
        op.diag[i] = -2.0 * eps / h2 + profile(ri);
        op.upper[i] = eps / h2 + eps / (2.0 * ri * h);
    }
    return op;
}

/// Trapezoid weights for U = int_0^R K(R, rho) u(rho) drho on the radial grid.
inline std::vector<double> feedback_gain_vector(const KernelTable& kernel, const RadialGrid& grid)
{
    if (std::fabs(kernel.grid.R() - grid.R()) > 1e-12 * grid.R()) {
        throw std::invalid_argument("feedback_gain_vector: kernel and simulation radii differ");
    }
    const std::size_t m = grid.M();
    std::vector<double> w(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        const double end = (j == 0 || j == m) ? 0.5 : 1.0;
        w[j] = grid.dr() * end * kernel.boundary_gain(grid.r(j));
    }
    return w;
}

struct NormSample {
    double t;
    double plain;
    double disk;
};

struct Snapshot {
    double t;
    std::vector<double> u;
};

struct SimState {
    double t = 0.0;
    std::vector<double> u;
    std::vector<NormSample> norm_history;
    std::vector<double> boundary_history;
    std::vector<Snapshot> snapshots;
};

struct L2Norms {
    double plain;
    double disk;
};

/// sqrt(int u^2 dr) and sqrt(int u^2 r dr), trapezoid.
inline L2Norms l2_norms(const std::vector<double>& u, const RadialGrid& grid)
{
    if (u.size() != grid.size()) {
        throw std::invalid_argument("l2_norms: size mismatch");
    }
    double plain = 0.0;
    double disk = 0.0;
    const std::size_t m = grid.M();
    for (std::size_t i = 0; i <= m; ++i) {
        const double w = (i == 0 || i == m) ? 0.5 : 1.0;
        plain += w * u[i] * u[i];
        disk += w * u[i] * u[i] * grid.r(i);
    }
    return {std::sqrt(plain * grid.dr()), std::sqrt(disk * grid.dr())};
}

using Forcing = std::function<double(double t, double r)>;

/**
 * One Crank-Nicolson integrator bound to (grid, operator, dt, gain). The boundary row reads
 * u_M - sum_j w_j u_j = s(t), with s = 0 for feedback control and s = prescribed data otherwise.
 */
class CrankNicolson {
public:
    CrankNicolson(const RadialGrid& grid, RadialOperator op, double dt, std::vector<double> gain)
        : grid_(grid), op_(std::move(op)), dt_(dt), gain_(std::move(gain))
    {
        const std::size_t m = grid_.M();
        if (!(dt > 0.0)) {
            throw std::invalid_argument("CrankNicolson: dt must be positive");
        }
        if (gain_.empty()) {
            gain_.assign(m + 1, 0.0);
        }
        if (gain_.size() != m + 1 || op_.diag.size() != m) {
            throw std::invalid_argument("CrankNicolson: size mismatch");
        }
        // Left-hand band T = I - dt/2 A on rows 0..M-1, factored once.
        const double half = 0.5 * dt_;
        sub_.assign(m, 0.0);
        piv_.assign(m, 0.0);
        sup_.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            sub_[i] = -half * op_.lower[i];
            piv_[i] = 1.0 - half * op_.diag[i];
            sup_[i] = -half * op_.upper[i];
        }
        for (std::size_t i = 1; i < m; ++i) {
            if (piv_[i - 1] == 0.0) {
                throw SimulationError("CrankNicolson: zero pivot in tridiagonal factorization");
            }
            sub_[i] /= piv_[i - 1];
            piv_[i] -= sub_[i] * sup_[i - 1];
        }
        coupling_ = sup_[m - 1];
        std::vector<double> rhs(m, 0.0);
        rhs[m - 1] = -coupling_;
        q_ = solve_band(rhs);
        double denom = 1.0 - gain_[m];
        for (std::size_t j = 0; j < m; ++j) {
            denom -= gain_[j] * q_[j];
        }
        if (!(std::fabs(denom) > 1e-12)) {
            throw SimulationError("CrankNicolson: bordered system is singular (feedback denominator " +
                                  std::to_string(denom) + ")");
        }
        denom_ = denom;
    }

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] const std::vector<double>& gain() const noexcept { return gain_; }

    /// Advances u from t to t + dt in place. `forcing` enters as the average of both time levels.
    void step(std::vector<double>& u, double t, const Forcing& forcing = {}, double boundary_data = 0.0) const
    {
        const std::size_t m = grid_.M();
        if (u.size() != m + 1) {
            throw std::invalid_argument("CrankNicolson::step: size mismatch");
        }
        const double half = 0.5 * dt_;
        std::vector<double> rhs = op_.apply(u);
        for (std::size_t i = 0; i < m; ++i) {
            rhs[i] = u[i] + half * rhs[i];
            if (forcing) {
                rhs[i] += half * (forcing(t, grid_.r(i)) + forcing(t + dt_, grid_.r(i)));
            }
        }
        rhs.resize(m);
        const std::vector<double> p = solve_band(rhs);
        double num = boundary_data;
        for (std::size_t j = 0; j < m; ++j) {
            num += gain_[j] * p[j];
        }
        const double um = num / denom_;
        for (std::size_t j = 0; j < m; ++j) {
            u[j] = p[j] + um * q_[j];
        }
        u[m] = um;
    }

private:
    [[nodiscard]] std::vector<double> solve_band(std::vector<double> d) const
    {
        const std::size_t m = d.size();
        for (std::size_t i = 1; i < m; ++i) {
            d[i] -= sub_[i] * d[i - 1];
        }
        d[m - 1] /= piv_[m - 1];
        for (std::size_t i = m - 1; i-- > 0;) {
            d[i] = (d[i] - sup_[i] * d[i + 1]) / piv_[i];
        }
        return d;
    }

    RadialGrid grid_;
    RadialOperator op_;
    double dt_;
    std::vector<double> gain_;
    std::vector<double> sub_, piv_, sup_, q_;
    double coupling_ = 0.0;
    double denom_ = 1.0;
};

struct SimOptions {
    std::size_t snapshot_stride = 0; // 0 disables snapshots
    Forcing forcing;
    std::function<double(double t)> boundary_data; // prescribed U(t) added to the feedback row
};

/// Runs horizon/dt Crank-Nicolson steps. Empty `gain` means open loop with u(t, R) = 0.
inline SimState simulate(const ReactionProfile& profile, const RadialGrid& grid, const std::vector<double>& gain,
                         const std::function<double(double)>& u0, double horizon, double dt,
                         const SimOptions& opt = {})
{
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("simulate: horizon must be positive");
    }
    const double count = horizon / dt;
    const auto steps = static_cast<std::size_t>(std::llround(count));
    if (steps == 0 || std::fabs(count - static_cast<double>(steps)) > 1e-9 * count) {
        throw std::invalid_argument("simulate: horizon must be an integer multiple of dt");
    }
    const CrankNicolson cn(grid, build_operator(grid, profile), dt, gain);
    SimState s;
    s.u.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s.u[i] = u0(grid.r(i));
    }
    auto record = [&](std::size_t k) {
        const L2Norms n = l2_norms(s.u, grid);
        s.norm_history.push_back({s.t, n.plain, n.disk});
        s.boundary_history.push_back(s.u.back());
        if (opt.snapshot_stride > 0 && k % opt.snapshot_stride == 0) {
            s.snapshots.push_back({s.t, s.u});
        }
    };
    record(0);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_prev = static_cast<double>(k - 1) * dt;
        s.t = static_cast<double>(k) * dt;
        cn.step(s.u, t_prev, opt.forcing, opt.boundary_data ? opt.boundary_data(s.t) : 0.0);
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            if (!std::isfinite(s.u[i])) {
                throw SimulationError("simulate: non-finite value at r=" + std::to_string(grid.r(i)) +
                                      " after step " + std::to_string(k) + " (t=" + std::to_string(s.t) + ")");
            }
        }
        record(k);
    }
    return s;
}

struct DecayFit {
    double c2 = 0.0;
    double r_squared = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
};

enum class NormKind { disk, plain };

/// Least-squares line through (t, log ||u||) on [t_start, t_end]; c2 is minus the slope.
inline DecayFit fit_decay(const std::vector<NormSample>& history, double t_start, double t_end,
                          NormKind kind = NormKind::disk)
{
    auto value = [kind](const NormSample& s) { return kind == NormKind::disk ? s.disk : s.plain; };
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<std::pair<double, double>> pts;
        bool nonpositive = false;
        double last_positive = t_start;
        for (const auto& s : history) {
            if (s.t < t_start - 1e-12 || s.t > t_end + 1e-12) {
                continue;
            }
            const double v = value(s);
            if (!(v > 0.0)) {
                nonpositive = true;
                break;
            }
            last_positive = s.t;
            pts.emplace_back(s.t, std::log(v));
        }
        if (nonpositive) {
            if (attempt == 0) {
                t_end = last_positive;
                continue;
            }
            throw SimulationError("fit_decay: norm reached zero inside the fit window");
        }
        if (pts.size() < 10) {
            throw SimulationError("fit_decay: fewer than 10 samples in the fit window");
        }
        const double n = static_cast<double>(pts.size());
        double mt = 0.0;
        double my = 0.0;
        for (const auto& [t, y] : pts) {
            mt += t;
            my += y;
        }
        mt /= n;
        my /= n;
        double stt = 0.0;
        double sty = 0.0;
        double syy = 0.0;
        for (const auto& [t, y] : pts) {
            stt += (t - mt) * (t - mt);
            sty += (t - mt) * (y - my);
            syy += (y - my) * (y - my);
        }
        if (stt == 0.0) {
            throw SimulationError("fit_decay: degenerate time window");
        }
        const double slope = sty / stt;
        const double r2 = syy == 0.0 ? 1.0 : std::clamp(sty * sty / (stt * syy), 0.0, 1.0);
        return {-slope, r2, pts.front().first, pts.back().first};
    }
    throw SimulationError("fit_decay: no usable window");
}

/// Default window: drop the first 20% of the horizon.
inline DecayFit fit_decay(const std::vector<NormSample>& history, NormKind kind = NormKind::disk)
{
    if (history.empty()) {
        throw SimulationError("fit_decay: empty history");
    }
    const double t0 = history.front().t;
    const double t1 = history.back().t;
    return fit_decay(history, t0 + 0.2 * (t1 - t0), t1, kind);
}

inline void write_trajectory_csv(const SimState& s, const std::filesystem::path& path)
{
    auto out = detail::open_for_write(path);
    out << "t,norm_plain,norm_disk,U\n";
    for (std::size_t k = 0; k < s.norm_history.size(); ++k) {
        const auto& n = s.norm_history[k];
        out << n.t << ',' << n.plain << ',' << n.disk << ',' << s.boundary_history[k] << '\n';
    }
    detail::check_written(out, path);
}

inline void write_snapshot_csv(const SimState& s, const RadialGrid& grid, const std::filesystem::path& path)
{
    auto out = detail::open_for_write(path);
    out << "t,r,u\n";
    for (const auto& snap : s.snapshots) {
        for (std::size_t i = 0; i < snap.u.size(); ++i) {
            out << snap.t << ',' << grid.r(i) << ',' << snap.u[i] << '\n';
        }
    }
    detail::check_written(out, path);
}

} // namespace rbs
