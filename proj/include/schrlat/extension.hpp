#pragma once

#include <complex>
#include <span>
#include <vector>

#include "schrlat/profile.hpp"
#include "schrlat/quadrature.hpp"
#include "schrlat/weight.hpp"

namespace schrlat {

/// Sign of the linear phase in the extension operator.
///   propagator: e^{+2 pi i x'.xi' - pi i x_n |xi'|^2}, equal to e^{i x_n Delta} f(x')
///   standard:   e^{-2 pi i x.xi} on the surface, equal to the propagator at (-x', x_n)
enum class ExtensionConvention { propagator, standard };

/// The paraboloid xi_n = |xi'|^2 / 2 over the parameter box [0, 1]^{n-1},
/// with surface density (1 + |xi'|^2)^(1/2).
struct ParaboloidSection {
    int n = 2;

    double density(std::span<const double> xi_prime) const;
};

/// Extension of the surface amplitude g(xi', |xi'|^2/2) = prod_j g_k(xi_j) /
/// density(xi'), by tensor Gauss-Legendre over every support cell. x has n
/// entries (x', x_n).
std::complex<double> surface_extension(const FrequencyProfile& profile, int n, std::span<const double> x,
                                       const QuadratureSpec& quad = {},
                                       ExtensionConvention convention = ExtensionConvention::propagator);

/// A delta-cap over the parameter box [0, delta]^{n-1} and its dual tube.
///
/// The tube is axis-aligned in sheared coordinates y' = x' -+ x_n xi0'
/// (xi0' the cell center, sign per convention), y_n = x_n, with sides
/// c0 / delta (n-1 times) and c0 / delta^2.
struct KnappCell {
    double delta = 0;
    int n = 2;
    double c0 = 0;
    ExtensionConvention convention = ExtensionConvention::propagator;

    /// Requires 0 < delta <= 1/4, n >= 2, c0 > 0.
    static KnappCell make(double delta, int n, double c0 = default_c0(),
                          ExtensionConvention convention = ExtensionConvention::propagator);
    static double default_c0();

    /// Center of the cell in parameter space.
    std::vector<double> center() const;
    /// Worst-case phase deviation in cycles over the cell for tube points:
    /// (n-1) c0 (1/4 + 1/16).
    double phase_variation() const;
    /// The tube in sheared coordinates (product form, centered at 0).
    BoxUnionWeight tube() const;
    /// Maps a sheared point (y', y_n) to x.
    std::vector<double> unshear(std::span<const double> y) const;
};

/// Extension of the cell indicator at x.
std::complex<double> surface_extension(const KnappCell& cell, std::span<const double> x,
                                       const QuadratureSpec& quad = {});

/// Surface measure of the cell: int_{[0,delta]^{n-1}} (1 + |xi'|^2)^(1/2).
double l2_cell_mass(const KnappCell& cell);

struct KnappBound {
    double min_modulus = 0;
    double reference = 0;  // l2_cell_mass
    std::vector<double> argmin;
    std::size_t samples = 0;

    double ratio() const { return min_modulus / reference; }
};

/// Minimum of |extension| over a grid of `per_axis` points per axis on the
/// closed tube. Throws ValidationError when phase_variation() >= 1/10.
KnappBound knapp_lower_bound(const KnappCell& cell, const QuadratureSpec& quad = {}, int per_axis = 5);

}  // namespace schrlat
