#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "schrlat/exact.hpp"
#include "schrlat/profile.hpp"
#include "schrlat/quadrature.hpp"
#include "schrlat/weight.hpp"

namespace schrlat {

/// Lattice point as exact coefficients: x_j in units of h^-1 and t in units
/// of 2 h^-2, with h = delta^sigma. Layout (x_1, ..., x_{n-1}, t).
using ExactPoint = std::vector<Dyadic>;

/// Product lattice X_k^{n-1} x T_k with
///   X_k = { h^-1 sum_m p_m delta^(1-m) : 0 <= p_m <= p_max },
///   T_k = { 2 h^-2 sum_m q_m delta^(1-m) : 0 <= q_m <= q_max },
/// optionally dilated by an exact rational factor.
///
/// Points are never stored; they are indexed in lexicographic order of
/// (x_1, ..., x_{n-1}, t), t varying fastest.
class LatticeSet {
public:
    const Dyadic& delta() const { return delta_; }
    const Rational& sigma() const { return sigma_; }
    int level() const { return level_; }
    int dimension() const { return n_; }
    const Rational& c() const { return c_; }
    const Rational& dilation() const { return dilation_; }
    std::int64_t p_max() const { return p_max_; }
    std::int64_t q_max() const { return q_max_; }
    long double unit() const { return unit_; }

    /// Ascending per-axis coefficients (integers).
    std::span<const std::int64_t> x_coefs() const { return x_coefs_; }
    std::span<const std::int64_t> t_coefs() const { return t_coefs_; }
    /// Ascending per-axis coordinates, dilation applied.
    std::span<const double> x_values() const { return x_values_; }
    std::span<const double> t_values() const { return t_values_; }

    /// ((p_max+1)^k)^(n-1) (q_max+1)^k; throws std::overflow_error past 2^62.
    std::uint64_t size() const;
    /// Axis indices (i_1, ..., i_{n-1}, i_t) of point `index`.
    std::vector<std::size_t> axis_indices(std::uint64_t index) const;
    std::vector<double> point(std::uint64_t index) const;
    ExactPoint exact_point(std::uint64_t index) const;
    /// All points, exact; throws ValidationError above `limit`.
    std::vector<ExactPoint> exact_points(std::size_t limit = 5'000'000) const;

    /// Smallest gap between distinct coordinates on any axis; +inf when
    /// every axis holds a single value.
    double min_spacing() const;

    friend bool operator==(const LatticeSet& a, const LatticeSet& b) {
        return a.delta_ == b.delta_ && a.sigma_ == b.sigma_ && a.level_ == b.level_ && a.n_ == b.n_ &&
               a.c_ == b.c_ && a.dilation_ == b.dilation_ && a.x_coefs_ == b.x_coefs_ && a.t_coefs_ == b.t_coefs_;
    }

private:
    friend LatticeSet build_lattice(const Dyadic&, const Rational&, int, int, const Rational&);
    friend LatticeSet scale(const LatticeSet&, const Rational&);
    void refresh_values();

    Dyadic delta_;
    Rational sigma_;
    int level_ = 0;
    int n_ = 0;
    Rational c_;
    Rational dilation_{1};
    std::int64_t p_max_ = 0;
    std::int64_t q_max_ = 0;
    long double unit_ = 0;
    std::vector<std::int64_t> x_coefs_;
    std::vector<std::int64_t> t_coefs_;
    std::vector<double> x_values_;
    std::vector<double> t_values_;
};

/// Requires 0 < delta < 1, 0 < sigma < 1/2, level >= 1 (1/delta integral for
/// level >= 2), n >= 2, c > 0. Throws ValidationError when p_max = q_max = 0.
LatticeSet build_lattice(const Dyadic& delta, const Rational& sigma, int level, int n, const Rational& c);

/// One cube of half-side rho per lattice point, in product form.
/// Throws ValidationError unless 2 rho is below min_spacing().
BoxUnionWeight thicken(const LatticeSet& lattice, double rho);

/// Dilates all coordinates by lambda > 0; scale(scale(L, l), 1/l) == L exactly.
LatticeSet scale(const LatticeSet& lattice, const Rational& lambda);

struct MinModulus {
    double value = 0;
    std::vector<double> x;
    double t = 0;
    std::uint64_t index = 0;
};

/// Minimum of |solution_at| over the lattice. The solution is a product of
/// per-coordinate line integrals, so only |X| |T| integrals are evaluated.
/// Ties go to the lexicographically first point.
MinModulus min_modulus(const FrequencyProfile& profile, const LatticeSet& lattice, const QuadratureSpec& quad);

/// Largest phase-deviation certificate over the lattice's (x_j, t) pairs.
double max_theta(const FrequencyProfile& profile, const LatticeSet& lattice);

struct SelfSimilarityResult {
    bool holds = false;
    std::optional<ExactPoint> witness;
    std::string detail;
};

/// Checks Lambda_k = Lambda_1 (+) delta^-1 Lambda_{k-1} exactly, with all
/// sums distinct. Requires level >= 2.
SelfSimilarityResult lattice_self_similarity(const LatticeSet& lattice);

/// Same check against an explicit point set claimed to be Lambda_k.
SelfSimilarityResult lattice_self_similarity(std::vector<ExactPoint> points, const LatticeSet& lattice);

}  // namespace schrlat
