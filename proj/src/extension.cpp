#include "schrlat/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "schrlat/parallel.hpp"

namespace schrlat {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

/// Phase in cycles of the extension kernel at xi'.
double phase_cycles(std::span<const double> x, std::span<const double> xi, double sign) {
    const std::size_t m = xi.size();
    long double lin = 0, sq = 0;
    for (std::size_t j = 0; j < m; ++j) {
        lin += static_cast<long double>(x[j]) * xi[j];
        sq += static_cast<long double>(xi[j]) * xi[j];
    }
    const long double phase = sign * lin - static_cast<long double>(x[m]) * sq / 2;
    return static_cast<double>(phase - std::nearbyint(phase));
}

double sign_of(ExtensionConvention c) { return c == ExtensionConvention::propagator ? 1.0 : -1.0; }

/// Tensor Gauss-Legendre over the box prod_j [lo_j, lo_j + width_j] of f(xi').
template <typename F>
std::complex<double> tensor_box(std::span<const double> lo, std::span<const double> width, const GaussRule& rule,
                                F&& f) {
    const std::size_t dims = lo.size();
    const std::size_t m = rule.nodes.size();
    std::vector<std::size_t> idx(dims, 0);
    std::vector<double> xi(dims);
    std::complex<double> acc{};
    while (true) {
        double w = 1;
        for (std::size_t d = 0; d < dims; ++d) {
            xi[d] = lo[d] + width[d] * (rule.nodes[idx[d]] + 1) / 2;
            w *= rule.weights[idx[d]] * width[d] / 2;
        }
        acc += w * f(std::span<const double>(xi));
        std::size_t d = 0;
        while (d < dims && ++idx[d] == m) idx[d++] = 0;
        if (d == dims) break;
    }
    return acc;
}

}  // namespace

double ParaboloidSection::density(std::span<const double> xi_prime) const {
    double s = 1;
    for (const double v : xi_prime) s += v * v;
    return std::sqrt(s);
}

std::complex<double> surface_extension(const FrequencyProfile& profile, int n, std::span<const double> x,
                                       const QuadratureSpec& quad, ExtensionConvention convention) {
    if (n < 2) throw ValidationError("dimension n must be >= 2");
    if (x.size() != static_cast<std::size_t>(n)) throw ValidationError("surface_extension expects n coordinates");
    quad.validate();
    const ParaboloidSection surface{n};
    const double sign = sign_of(convention);
    const auto centers = profile.centers();
    const double hw = profile.halfwidth();
    const std::size_t dims = static_cast<std::size_t>(n - 1);

    double cycles = 0;
    for (std::size_t j = 0; j < dims; ++j)
        cycles += std::abs(x[j]) * 2 * hw + std::abs(x[dims]) * profile.max_abs_xi() * 2 * hw;
    const GaussRule& rule = gauss_legendre(quad.nodes_for(cycles));

    auto integrand = [&](std::span<const double> xi) {
        // amplitude prod g / density, times the surface density
        const double dens = surface.density(xi);
        const double amp = 1.0 / dens;
        return amp * dens * std::polar(1.0, kTwoPi * phase_cycles(x, xi, sign));
    };

    std::size_t cells = 1;
    for (std::size_t d = 0; d < dims; ++d) cells *= centers.size();
    std::vector<std::complex<double>> parts(cells);
    parallel_for(cells, [&](std::size_t cell) {
        std::vector<double> lo(dims), width(dims, 2 * hw);
        std::size_t rest = cell;
        for (std::size_t d = dims; d-- > 0;) {
            lo[d] = centers[rest % centers.size()] - hw;
            rest /= centers.size();
        }
        parts[cell] = tensor_box(lo, width, rule, integrand);
    });
    return pairwise_sum(std::span<const std::complex<double>>(parts));
}

KnappCell KnappCell::make(double delta, int n, double c0, ExtensionConvention convention) {
    if (!(delta > 0 && delta <= 0.25)) throw ValidationError("Knapp cell needs 0 < delta <= 1/4");
    if (n < 2) throw ValidationError("dimension n must be >= 2");
    if (!(c0 > 0)) throw ValidationError("tube constant c0 must be positive");
    return KnappCell{delta, n, c0, convention};
}

double KnappCell::default_c0() { return 1 / (8 * std::numbers::pi); }

std::vector<double> KnappCell::center() const { return std::vector<double>(static_cast<std::size_t>(n - 1), delta / 2); }

double KnappCell::phase_variation() const { return (n - 1) * c0 * (0.25 + 1.0 / 16); }

BoxUnionWeight KnappCell::tube() const {
    std::vector<AxisUnion> axes(static_cast<std::size_t>(n), AxisUnion{{0.0}, c0 / delta / 2});
    axes.back().halfwidth = c0 / (delta * delta) / 2;
    return BoxUnionWeight::product(std::move(axes));
}

std::vector<double> KnappCell::unshear(std::span<const double> y) const {
    if (y.size() != static_cast<std::size_t>(n)) throw ValidationError("unshear expects n coordinates");
    const double sign = sign_of(convention);
    std::vector<double> x(y.begin(), y.end());
    for (std::size_t j = 0; j + 1 < x.size(); ++j) x[j] = y[j] + sign * y.back() * (delta / 2);
    return x;
}

std::complex<double> surface_extension(const KnappCell& cell, std::span<const double> x, const QuadratureSpec& quad) {
    if (x.size() != static_cast<std::size_t>(cell.n)) throw ValidationError("surface_extension expects n coordinates");
    quad.validate();
    const ParaboloidSection surface{cell.n};
    const double sign = sign_of(cell.convention);
    const std::size_t dims = static_cast<std::size_t>(cell.n - 1);
    double cycles = 0;
    for (std::size_t j = 0; j < dims; ++j) cycles += std::abs(x[j]) * cell.delta;
    cycles += std::abs(x[dims]) * static_cast<double>(dims) * cell.delta * cell.delta;
    const GaussRule& rule = gauss_legendre(quad.nodes_for(cycles));
    const std::vector<double> lo(dims, 0.0), width(dims, cell.delta);
    return tensor_box(lo, width, rule, [&](std::span<const double> xi) {
        return surface.density(xi) * std::polar(1.0, kTwoPi * phase_cycles(x, xi, sign));
    });
}

double l2_cell_mass(const KnappCell& cell) {
    if (cell.n == 2) {
        const double d = cell.delta;
        return (d * std::sqrt(1 + d * d) + std::asinh(d)) / 2;
    }
    const ParaboloidSection surface{cell.n};
    const std::size_t dims = static_cast<std::size_t>(cell.n - 1);
    const std::vector<double> lo(dims, 0.0), width(dims, cell.delta);
    return tensor_box(lo, width, gauss_legendre(16), [&](std::span<const double> xi) {
               return std::complex<double>(surface.density(xi), 0);
           }).real();
}

KnappBound knapp_lower_bound(const KnappCell& cell, const QuadratureSpec& quad, int per_axis) {
    const double variation = cell.phase_variation();
    if (!(variation < 0.1)) {
        std::ostringstream msg;
        msg << "tube constant c0 = " << cell.c0 << " lets the phase vary by " << variation
            << " cycles over the cell; need < 1/10";
        throw ValidationError(msg.str());
    }
    if (per_axis < 2) throw ValidationError("need at least two samples per tube axis");
    const BoxUnionWeight tube = cell.tube();
    const auto n = static_cast<std::size_t>(cell.n);
    std::size_t total = 1;
    for (std::size_t d = 0; d < n; ++d) total *= static_cast<std::size_t>(per_axis);

    std::vector<double> mods(total);
    std::vector<std::vector<double>> points(total);
    parallel_for(total, [&](std::size_t i) {
        std::vector<double> y(n);
        std::size_t rest = i;
        for (std::size_t d = n; d-- > 0;) {
            const double hw = tube.axes()[d].halfwidth;
            const auto k = static_cast<double>(rest % static_cast<std::size_t>(per_axis));
            y[d] = -hw + 2 * hw * k / (per_axis - 1);
            rest /= static_cast<std::size_t>(per_axis);
        }
        points[i] = cell.unshear(y);
        mods[i] = std::abs(surface_extension(cell, points[i], quad));
    });
    KnappBound out;
    out.reference = l2_cell_mass(cell);
    out.samples = total;
    const auto it = std::min_element(mods.begin(), mods.end());
    out.min_modulus = *it;
    out.argmin = points[static_cast<std::size_t>(it - mods.begin())];
    return out;
}

}  // namespace schrlat
