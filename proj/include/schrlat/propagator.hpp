#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "schrlat/profile.hpp"
#include "schrlat/quadrature.hpp"

namespace schrlat {

/// Signals that a phase certificate does not apply (some theta >= 1/4).
class CertificateInapplicable : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// int e^{-pi i t xi^2 + 2 pi i s xi} g_k(xi) dxi, one Gauss-Legendre panel
/// per support interval. Node count per panel is
/// max(nodes_min, ceil(nodes_per_cycle * (|t| xi_max w + |s| w))).
std::complex<double> line_integral(const FrequencyProfile& profile, double s, double t,
                                   const QuadratureSpec& quad = {});

/// e^{it Delta} f(x) for f^ = prod_j g_k(xi_j): the product of n-1 line
/// integrals. x must have n-1 entries.
std::complex<double> solution_at(const FrequencyProfile& profile, int n, std::span<const double> x, double t,
                                 const QuadratureSpec& quad = {});

/// Digits of a lattice-form frequency pair:
/// s = h^-1 sum_m p_m delta^(1-m), t = 2 h^-2 sum_m q_m delta^(1-m).
struct LatticeDigits {
    std::vector<std::int64_t> p;
    std::vector<std::int64_t> q;
};

double lattice_s(const FrequencyProfile& profile, std::span<const std::int64_t> p);
double lattice_t(const FrequencyProfile& profile, std::span<const std::int64_t> q);

/// One summand of the expanded phase s xi - t xi^2 / 2 at a lattice pair.
struct PhaseTerm {
    std::string label;
    double bound = 0;  // sup |term| over the support
    bool integer_valued = false;
};

struct PhaseCertificate {
    /// Max over support intervals of the distance (in cycles) of the phase
    /// from the integer nearest to its value at the interval center; capped at 1/2.
    double theta = 0;
    /// Filled only for lattice-form (s, t).
    std::vector<PhaseTerm> per_term_report;
    std::optional<LatticeDigits> digits;

    /// Sum of the bounds of the non-integer terms.
    double small_term_total() const;
};

PhaseCertificate phase_deviation(const FrequencyProfile& profile, double s, double t);
PhaseCertificate phase_deviation(const FrequencyProfile& profile, const LatticeDigits& digits);

/// Recovers lattice digits from (s, t) when both are of lattice form.
std::optional<LatticeDigits> recognize_lattice_pair(const FrequencyProfile& profile, double s, double t);

struct LowerBoundCheck {
    bool holds = false;
    double bound = 0;
    double measured = 0;
    std::vector<double> thetas;
};

/// Compares |e^{it Delta} f(x)| with prod_j cos(2 pi theta_j) * mass.
/// Throws CertificateInapplicable if some theta_j >= 1/4.
LowerBoundCheck lower_bound_check(const FrequencyProfile& profile, int n, std::span<const double> x, double t,
                                  const QuadratureSpec& quad = {});

}  // namespace schrlat
