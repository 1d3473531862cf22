#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rbs {

/**
 * Uniform grid on T = {0 <= rho <= r <= R} with spacing delta = R/N, seen through the
 * characteristic coordinates alpha = r + rho, beta = r - rho.
 *
 * Computations run on the full (alpha, beta) lattice of spacing delta: integer pairs (a, b)
 * with 0 <= b <= a and a + b <= 2N. Physical nodes (r_i, rho_j) are the sublattice with a + b
 * even, via a = i + j and b = i - j; the odd sublattice carries half-step points.
 */
class TriangleGrid {
public:
    TriangleGrid(std::size_t subdivisions, double radius) : n_(subdivisions), radius_(radius)
    {
        if (subdivisions < 1) {
            throw std::invalid_argument("TriangleGrid: N must be >= 1");
        }
        if (!(radius > 0.0)) {
            throw std::invalid_argument("TriangleGrid: R must be positive");
        }
    }

    [[nodiscard]] std::size_t N() const noexcept { return n_; }
    [[nodiscard]] double R() const noexcept { return radius_; }
    [[nodiscard]] double delta() const noexcept { return radius_ / static_cast<double>(n_); }
    [[nodiscard]] int max_a() const noexcept { return static_cast<int>(2 * n_); }

    /// Largest b on lattice row a.
    [[nodiscard]] int max_b(int a) const noexcept { return std::min(a, max_a() - a); }

    [[nodiscard]] bool contains(int a, int b) const noexcept
    {
        return a >= 0 && a <= max_a() && b >= 0 && b <= max_b(a);
    }

    [[nodiscard]] std::size_t index(int a, int b) const noexcept { return row_offset(a) + static_cast<std::size_t>(b); }

    [[nodiscard]] std::size_t lattice_size() const noexcept { return row_offset(max_a() + 1); }

    [[nodiscard]] double coord(int a) const noexcept { return a * delta(); }

    [[nodiscard]] bool operator==(const TriangleGrid& o) const noexcept { return n_ == o.n_ && radius_ == o.radius_; }

private:
    [[nodiscard]] std::size_t row_offset(int a) const noexcept
    {
        const auto n = static_cast<std::size_t>(n_);
        const auto ua = static_cast<std::size_t>(a);
        if (ua <= n + 1) {
            return ua * (ua + 1) / 2;
        }
        const std::size_t t = ua - n - 1;
        return (n + 1) * (n + 2) / 2 + t * n - t * (t - 1) / 2;
    }

    std::size_t n_;
    double radius_;
};

/// One value per lattice node of a TriangleGrid.
class LatticeField {
public:
    explicit LatticeField(const TriangleGrid& grid, double fill = 0.0)
        : grid_(grid), values_(grid.lattice_size(), fill)
    {
    }

    [[nodiscard]] const TriangleGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] double& operator()(int a, int b) { return values_[grid_.index(a, b)]; }
    [[nodiscard]] double operator()(int a, int b) const { return values_[grid_.index(a, b)]; }

    /// Physical node (r_i, rho_j), j <= i.
    [[nodiscard]] double physical(int i, int j) const { return (*this)(i + j, i - j); }

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] double sup_norm() const
    {
        double m = 0.0;
        for (double v : values_) {
            m = std::max(m, std::fabs(v));
        }
        return m;
    }

    LatticeField& operator+=(const LatticeField& o)
    {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            values_[i] += o.values_[i];
        }
        return *this;
    }

    LatticeField& operator*=(double s)
    {
        for (double& v : values_) {
            v *= s;
        }
        return *this;
    }

private:
    TriangleGrid grid_;
    std::vector<double> values_;
};

/// Fills f(alpha, beta) at every lattice node.
template <class F>
LatticeField tabulate(const TriangleGrid& grid, F&& f)
{
    LatticeField out(grid);
    for (int a = 0; a <= grid.max_a(); ++a) {
        for (int b = 0; b <= grid.max_b(a); ++b) {
            out(a, b) = f(grid.coord(a), grid.coord(b));
        }
    }
    return out;
}

struct AlphaBeta {
    double alpha;
    double beta;
};

struct RadialPair {
    double r;
    double rho;
};

inline AlphaBeta to_alphabeta(double r, double rho)
{
    if (rho < 0.0 || rho > r) {
        throw std::domain_error("to_alphabeta: requires 0 <= rho <= r");
    }
    return {r + rho, r - rho};
}

inline AlphaBeta to_alphabeta(double r, double rho, double radius)
{
    if (r > radius) {
        throw std::domain_error("to_alphabeta: r exceeds R");
    }
    return to_alphabeta(r, rho);
}

inline RadialPair from_alphabeta(AlphaBeta ab) { return {0.5 * (ab.alpha + ab.beta), 0.5 * (ab.alpha - ab.beta)}; }

} // namespace rbs
