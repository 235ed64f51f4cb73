#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>

namespace oracle {

/// Composite Simpson rule, long double, on every support interval.
inline std::complex<long double> line_integral(std::span<const double> centers, double hw, double s, double t,
                                               int panels = 2000) {
    const long double pi = std::numbers::pi_v<long double>;
    std::complex<long double> total{};
    for (const double c : centers) {
        const long double a = static_cast<long double>(c) - hw;
        const long double step = 2.0L * hw / panels;
        std::complex<long double> acc{};
        for (int i = 0; i <= panels; ++i) {
            const long double xi = a + step * i;
            const long double phase = 2 * pi * (s * xi) - pi * t * xi * xi;
            const long double w = (i == 0 || i == panels) ? 1.0L : (i % 2 == 1 ? 4.0L : 2.0L);
            acc += w * std::complex<long double>(std::cos(phase), std::sin(phase));
        }
        total += acc * (step / 3.0L);
    }
    return total;
}

}  // namespace oracle
