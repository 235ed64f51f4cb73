#pragma once

#include <complex>
#include <span>
#include <vector>

namespace schrlat {

/// Controls for the per-interval Gauss-Legendre panels used on oscillatory
/// line integrals.
struct QuadratureSpec {
    int nodes_min = 8;
    double nodes_per_cycle = 6.0;
    double abs_tol = 1e-10;

    /// Throws ValidationError unless nodes_min >= 2 and nodes_per_cycle >= 2.
    void validate() const;
    /// Node count for a panel whose phase sweeps `cycles` cycles.
    int nodes_for(double cycles) const;
};

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached n-point rule; the reference stays valid for the program lifetime.
const GaussRule& gauss_legendre(int n);

/// Pairwise (cascade) summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> values);

}  // namespace schrlat
