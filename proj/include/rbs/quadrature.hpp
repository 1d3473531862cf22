#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace rbs::quad {

/// Composite Simpson on [a, b]; `panels` is rounded up to an even count >= 2.
template <class F>
double simpson(F&& f, double a, double b, int panels)
{
    if (panels < 2) {
        panels = 2;
    }
    if (panels % 2) {
        ++panels;
    }
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) {
        acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    }
    return acc * h / 3.0;
}

/// Gauss-Legendre rule mapped to [0, 1].
template <std::size_t Points>
struct UnitGauss {
    std::array<double, Points> x{};
    std::array<double, Points> w{};

    UnitGauss()
    {
        using Rule = boost::math::quadrature::gauss<double, Points>;
        const auto& absc = Rule::abscissa();
        const auto& wts = Rule::weights();
        std::size_t out = 0;
        // Boost stores the nonnegative half; mirror it (the zero node appears once for odd rules).
        for (std::size_t i = absc.size(); i-- > 0;) {
            if (absc[i] == 0.0) {
                continue;
            }
            x[out] = 0.5 * (1.0 - absc[i]);
            w[out] = 0.5 * wts[i];
            ++out;
        }
        for (std::size_t i = 0; i < absc.size(); ++i) {
            x[out] = 0.5 * (1.0 + absc[i]);
            w[out] = 0.5 * wts[i];
            ++out;
        }
        if (out != Points) {
            throw std::logic_error("UnitGauss: unexpected abscissa count");
        }
    }

    static const UnitGauss& instance()
    {
        static const UnitGauss rule;
        return rule;
    }
};

} // namespace rbs::quad
