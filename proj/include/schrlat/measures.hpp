#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "schrlat/lattice.hpp"
#include "schrlat/profile.hpp"
#include "schrlat/quadrature.hpp"
#include "schrlat/weight.hpp"

namespace schrlat {

/// Radius grid for the extremal searches. Cubes Q(x, r) of half-side r stand
/// in for balls throughout.
struct SearchSpec {
    double radius_ratio = std::sqrt(2.0);
    /// Extra radii at ratio 2^(1/32) around the best grid radii.
    bool refine = true;

    void validate() const;
};

/// Either sup mu(Q(x,r)) / r^eta or the Morrey-Campanato norm
/// sup r^alpha (r^-n mu(Q(x,r)))^(1/p).
struct NormQuery {
    enum class Kind { ball_mass, morrey };
    Kind kind = Kind::ball_mass;
    double eta = 0;
    double alpha = 0;
    double p = 1;
    SearchSpec search;

    static NormQuery ball_mass(double eta, SearchSpec search = {});
    static NormQuery morrey(double alpha, double p, SearchSpec search = {});

    /// The ball-mass exponent the query reduces to: eta, or n - alpha p.
    double effective_eta(int n) const;
    /// Maps a ball-mass supremum to the query's value.
    double finish(double ball_value) const;
    /// Throws ValidationError unless 0 <= eta <= n, or p > 0 and alpha p <= n.
    void validate(int n) const;
};

struct SupResult {
    double value = 0;
    std::vector<double> center;
    double r = 0;
};

/// Lebesgue measure of W inside the cube of half-side r around center.
double box_mass(const BoxUnionWeight& w, std::span<const double> center, double r);

/// Maximizes box_mass / r^eta over box centers plus the centroid and a
/// geometric radius grid from min halfwidth / 2 to the bounding-box side.
/// On product weights the candidate centers form the product of per-axis
/// candidates, and the maximum factorizes per axis.
SupResult sup_ball_mass(const BoxUnionWeight& w, double eta, const SearchSpec& search = {});

/// Morrey-Campanato norm of the indicator of W. Requires p > 0, alpha p <= n.
SupResult mc_norm(const BoxUnionWeight& w, double alpha, double p, const SearchSpec& search = {});

/// Either of the above, by query kind.
SupResult evaluate(const BoxUnionWeight& w, const NormQuery& query);

/// Exhaustive oracle: centers on a uniform grid of step grid_step anchored
/// at the bounding-box center, radii at ratio 2^(1/8). Throws
/// ValidationError above 1e7 evaluations.
double brute_force_sup(const BoxUnionWeight& w, const NormQuery& query, double grid_step);

/// Integral of |solution_at|^2 over the thickened lattice Omega (cubes of
/// half-side rho around the points of an undilated lattice), with
/// `nodes`-point Gauss-Legendre per cube axis.
double omega_l2_mass(const FrequencyProfile& profile, const LatticeSet& lattice, double rho,
                     const QuadratureSpec& quad, int nodes = 3);

struct SectionMass {
    /// Integral of |u(., t)|^2 over the x-cubes at height t.
    double mass = 0;
    /// mass / ||f||_2^2 with ||f||_2^2 = support_mass^(n-1).
    double raw_ratio = 0;
    /// mass / (|X|^(n-1) (2 rho)^(n-1) (cos(2 pi theta) support_mass^(n-1))^2).
    double benchmark_ratio = 0;
    std::size_t cubes = 0;
};

/// Requires t to be a time of the lattice. `nodes` Gauss-Legendre points
/// per cube axis.
SectionMass section_mass(const FrequencyProfile& profile, const LatticeSet& lattice, double t, double rho,
                         const QuadratureSpec& quad, int nodes = 3);

}  // namespace schrlat
