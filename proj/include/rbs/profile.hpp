#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rbs {

/**
 * Plant data for u_t = (eps/r)(r u_r)_r + lambda(r) u on [0, R].
 *
 * lambda_max is the sup of |lambda| on [0, R] and lambda_bar = lambda_max / (4 eps) is the
 * constant entering the majorant family. Evaluation clamps r into [0, R].
 */
class ReactionProfile {
public:
    using Fn = std::function<double(double)>;

    ReactionProfile(double epsilon, double radius, Fn lambda, double lambda_max, std::string descriptor,
                    bool is_constant = false)
        : epsilon_(epsilon), radius_(radius), lambda_(std::move(lambda)), lambda_max_(lambda_max),
          descriptor_(std::move(descriptor)), constant_(is_constant)
    {
        if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
            throw std::invalid_argument("ReactionProfile: epsilon must be positive");
        }
        if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
            throw std::invalid_argument("ReactionProfile: R must be positive");
        }
        if (!(lambda_max_ >= 0.0) || !std::isfinite(lambda_max_)) {
            throw std::invalid_argument("ReactionProfile: lambda must be finite on [0, R]");
        }
    }

    static ReactionProfile constant(double lambda0, double epsilon, double radius)
    {
        std::ostringstream d;
        d.precision(17);
        d << "constant(" << lambda0 << ")";
        return {epsilon, radius, [lambda0](double) { return lambda0; }, std::fabs(lambda0), d.str(), true};
    }

    /// lambda(r) = sum_k coeffs[k] r^k.
    static ReactionProfile polynomial(std::vector<double> coeffs, double epsilon, double radius)
    {
        if (coeffs.empty()) {
            throw std::invalid_argument("ReactionProfile: polynomial needs at least one coefficient");
        }
        auto eval = [coeffs](double r) {
            double acc = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
                acc = acc * r + *it;
            }
            return acc;
        };
        std::ostringstream d;
        d.precision(17);
        d << "polynomial(";
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            d << (k ? "," : "") << coeffs[k];
        }
        d << ")";
        const bool is_const = std::all_of(coeffs.begin() + 1, coeffs.end(), [](double c) { return c == 0.0; });
        return {epsilon, radius, eval, sampled_max(eval, radius), d.str(), is_const};
    }

    /// Piecewise-linear table; held constant outside the sampled range.
    static ReactionProfile table(std::vector<double> radii, std::vector<double> values, double epsilon, double radius)
    {
        if (radii.size() != values.size() || radii.size() < 2) {
            throw std::invalid_argument("ReactionProfile: table needs >= 2 matching (r, value) samples");
        }
        for (std::size_t i = 0; i < radii.size(); ++i) {
            if (radii[i] < 0.0 || radii[i] > radius || (i > 0 && !(radii[i] > radii[i - 1]))) {
                throw std::invalid_argument("ReactionProfile: table radii must be strictly increasing in [0, R]");
            }
        }
        double vmax = 0.0;
        for (double v : values) {
            vmax = std::max(vmax, std::fabs(v));
        }
        auto eval = [radii, values](double r) {
            if (r <= radii.front()) {
                return values.front();
            }
            if (r >= radii.back()) {
                return values.back();
            }
            const auto it = std::upper_bound(radii.begin(), radii.end(), r);
            const std::size_t hi = static_cast<std::size_t>(it - radii.begin());
            const std::size_t lo = hi - 1;
            const double t = (r - radii[lo]) / (radii[hi] - radii[lo]);
            return (1.0 - t) * values[lo] + t * values[hi];
        };
        return {epsilon, radius, eval, vmax, "table(" + std::to_string(radii.size()) + " samples)"};
    }

    /// Any evaluator; lambda_max is estimated by dense sampling including both endpoints.
    static ReactionProfile from_function(Fn lambda, double epsilon, double radius, std::string descriptor)
    {
        const double vmax = sampled_max(lambda, radius);
        return {epsilon, radius, std::move(lambda), vmax, std::move(descriptor)};
    }

    [[nodiscard]] double operator()(double r) const { return lambda_(std::clamp(r, 0.0, radius_)); }
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] double lambda_max() const noexcept { return lambda_max_; }
    [[nodiscard]] double lambda_bar() const noexcept { return lambda_max_ / (4.0 * epsilon_); }
    [[nodiscard]] const std::string& descriptor() const noexcept { return descriptor_; }
    [[nodiscard]] bool is_constant() const noexcept { return constant_; }

private:
    static double sampled_max(const Fn& f, double radius)
    {
        constexpr int samples = 20000;
        double vmax = std::max(std::fabs(f(0.0)), std::fabs(f(radius)));
        for (int i = 1; i < samples; ++i) {
            vmax = std::max(vmax, std::fabs(f(radius * i / samples)));
        }
        return vmax;
    }

    double epsilon_;
    double radius_;
    Fn lambda_;
    double lambda_max_;
    std::string descriptor_;
    bool constant_ = false;
};

} // namespace rbs
