#pragma once

/**
 * @file combinatorics.hpp
 * @brief Catalan's Triangle (ballot numbers) and the exact generating-function
 * values used to sum the successive-approximation majorant.
 *
 * Indexing follows the (row i, column j) convention with 1 <= j <= i:
 *
 *     C(1,1) = 1,  C(i,0) = 0,  C(i,j) = 0 for j > i,
 *     C(i,j) = C(i-1,j-1) + C(i,j+1)   otherwise.
 *
 * Column 1 holds the Catalan numbers, column 2 repeats it shifted by one row.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rbs {

using BigInt = boost::multiprecision::cpp_int;

class CatalanTriangle {
public:
    explicit CatalanTriangle(std::size_t rows) : rows_(rows)
    {
        if (rows == 0) {
            throw std::invalid_argument("CatalanTriangle: rows must be >= 1");
        }
        entries_.resize(rows * (rows + 1) / 2);
        for (std::size_t i = 1; i <= rows; ++i) {
            // Descending column order: C(i,j) reads C(i,j+1) from the same row.
            slot(i, i) = 1;
            for (std::size_t j = i - 1; j >= 1; --j) {
                slot(i, j) = at(i - 1, j - 1) + slot(i, j + 1);
            }
        }
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }

    /// Entry with implicit zeros for j == 0 or j > i. Rows outside [1, rows] throw.
    [[nodiscard]] BigInt at(std::size_t i, std::size_t j) const
    {
        if (i == 0 || i > rows_) {
            throw std::out_of_range("CatalanTriangle: row " + std::to_string(i) +
                                    " outside [1, " + std::to_string(rows_) + "]");
        }
        if (j == 0 || j > i) {
            return BigInt{0};
        }
        return entries_[offset(i, j)];
    }

    /// C(i,j) / 4^i rounded to double.
    [[nodiscard]] double scaled(std::size_t i, std::size_t j) const
    {
        const BigInt c = at(i, j);
        if (c == 0) {
            return 0.0;
        }
        // Shift in exact arithmetic first so huge rows never overflow a double.
        const std::size_t bits = msb_or_zero(c);
        const std::size_t keep = 60;
        if (bits > keep) {
            const std::size_t drop = bits - keep;
            const BigInt top = c >> drop;
            return std::ldexp(top.convert_to<double>(),
                              static_cast<int>(drop) - 2 * static_cast<int>(i));
        }
        return std::ldexp(c.convert_to<double>(), -2 * static_cast<int>(i));
    }

private:
    static std::size_t offset(std::size_t i, std::size_t j) { return (i - 1) * i / 2 + (j - 1); }
    BigInt& slot(std::size_t i, std::size_t j) { return entries_[offset(i, j)]; }
    static std::size_t msb_or_zero(const BigInt& v) { return v == 0 ? 0 : boost::multiprecision::msb(v); }

    std::size_t rows_;
    std::vector<BigInt> entries_;
};

inline CatalanTriangle build_triangle(std::size_t rows) { return CatalanTriangle(rows); }

/// Returns (C(i,j), sum_{k=j-1}^{i-1} C(i-1,k)); the two agree for every valid (i,j).
inline std::pair<BigInt, BigInt> row_sum_identity(const CatalanTriangle& tri, std::size_t i, std::size_t j)
{
    if (i < 2 || i > tri.rows() || j < 1 || j > i) {
        throw std::out_of_range("row_sum_identity: need 2 <= i <= rows and 1 <= j <= i");
    }
    BigInt rhs = 0;
    for (std::size_t k = j - 1; k <= i - 1; ++k) {
        rhs += tri.at(i - 1, k);
    }
    return {tri.at(i, j), rhs};
}

/// Exact value numerator / 2^exponent, kept in canonical form (odd numerator or exponent 0).
class DyadicRational {
public:
    DyadicRational() = default;
    DyadicRational(BigInt numerator, std::uint32_t exponent) : num_(std::move(numerator)), exp_(exponent)
    {
        normalize();
    }

    /// 2^e for any integer e.
    static DyadicRational pow2(int e)
    {
        if (e >= 0) {
            return DyadicRational(BigInt{1} << e, 0);
        }
        return DyadicRational(BigInt{1}, static_cast<std::uint32_t>(-e));
    }

    [[nodiscard]] const BigInt& numerator() const noexcept { return num_; }
    [[nodiscard]] std::uint32_t exponent() const noexcept { return exp_; }

    [[nodiscard]] double to_double() const
    {
        return std::ldexp(num_.convert_to<double>(), -static_cast<int>(exp_));
    }

    friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b)
    {
        const std::uint32_t e = std::max(a.exp_, b.exp_);
        return DyadicRational((a.num_ << (e - a.exp_)) + (b.num_ << (e - b.exp_)), e);
    }
    friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b)
    {
        return a + DyadicRational(-b.num_, b.exp_);
    }
    friend DyadicRational operator*(const DyadicRational& a, const DyadicRational& b)
    {
        return DyadicRational(a.num_ * b.num_, a.exp_ + b.exp_);
    }
    friend bool operator==(const DyadicRational& a, const DyadicRational& b)
    {
        return a.exp_ == b.exp_ && a.num_ == b.num_;
    }

    [[nodiscard]] std::string str() const
    {
        if (exp_ == 0) {
            return num_.str();
        }
        return num_.str() + "/2^" + std::to_string(exp_);
    }

private:
    void normalize()
    {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        while (exp_ > 0 && !boost::multiprecision::bit_test(num_, 0)) {
            num_ >>= 1;
            --exp_;
        }
    }

    BigInt num_{0};
    std::uint32_t exp_{0};
};

/**
 * f_j(1/4) where f_j(x) = sum_{l>=j} C(l,j) x^(l-1).
 *
 * Uses f_n = f_{n-1} - x f_{n-2} with f_1(1/4) = 2 and f_2(1/4) = 1; the result is 2^(2-j).
 */
inline DyadicRational genfun_at_quarter(unsigned j)
{
    if (j == 0) {
        throw std::invalid_argument("genfun_at_quarter: j must be >= 1");
    }
    const DyadicRational quarter = DyadicRational::pow2(-2);
    DyadicRational prev2 = DyadicRational(BigInt{2}, 0);
    if (j == 1) {
        return prev2;
    }
    DyadicRational prev1 = DyadicRational(BigInt{1}, 0);
    for (unsigned n = 3; n <= j; ++n) {
        DyadicRational next = prev1 - quarter * prev2;
        prev2 = std::move(prev1);
        prev1 = std::move(next);
    }
    return prev1;
}

/**
 * Partial column sums for columns 1..max_column at once: entry j-1 of the result is
 * sum_{l=j}^{j+terms-1} C(l,j)/4^l, computed in floating point.
 *
 * Rows are carried as E(i,k) = 2^k C(i,k)/4^i, which obeys E(i,k) = (E(i-1,k-1) + E(i,k+1))/2.
 * C(i,k)/4^i itself falls off like 2^-k, so a relative cutoff on it would clip the row far too
 * early; E has a Gaussian tail in k, and entries below 1e-20 of the row maximum are dropped.
 * Every entry is positive, so dropping only lowers the partial sums.
 */
inline std::vector<double> column_sums_partial(unsigned max_column, std::size_t terms)
{
    if (max_column == 0 || terms == 0) {
        throw std::invalid_argument("column_sum_partial: j and terms must be >= 1");
    }
    const std::size_t last_row = max_column + terms - 1;
    std::vector<double> sums(max_column, 0.0);
    // prev[k-1] holds E(i-1, k); prev.size() is the retained width.
    std::vector<double> prev{0.5};
    std::vector<double> cur;
    sums[0] = 0.25;
    for (std::size_t i = 2; i <= last_row; ++i) {
        const std::size_t width = std::min(i, prev.size() + 1);
        cur.assign(width, 0.0);
        // E(i,i) = 2^-i; past a truncated edge the dropped E(i, width+1) counts as zero.
        double right = 0.0;
        double row_max = 0.0;
        for (std::size_t k = width; k >= 1; --k) {
            if (k == i) {
                right = std::ldexp(1.0, -static_cast<int>(i));
            } else {
                right = 0.5 * (right + ((k >= 2) ? prev[k - 2] : 0.0));
            }
            cur[k - 1] = right;
            row_max = std::max(row_max, right);
        }
        std::size_t keep = cur.size();
        while (keep > max_column + 1 && cur[keep - 1] < 1e-20 * row_max) {
            --keep;
        }
        cur.resize(keep);
        for (std::size_t j = 1; j <= max_column && j <= cur.size(); ++j) {
            if (i <= j + terms - 1) {
                sums[j - 1] += std::ldexp(cur[j - 1], -static_cast<int>(j));
            }
        }
        std::swap(prev, cur);
    }
    return sums;
}

inline double column_sum_partial(unsigned j, std::size_t terms)
{
    if (j == 0) {
        throw std::invalid_argument("column_sum_partial: j must be >= 1");
    }
    return column_sums_partial(j, terms)[j - 1];
}

} // namespace rbs
