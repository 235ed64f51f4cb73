#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schrlat/exact.hpp"
#include "schrlat/measures.hpp"
#include "schrlat/quadrature.hpp"

namespace schrlat {

/// Ordinary least squares of log_value on log_scale.
struct ExponentFit {
    std::vector<std::pair<double, double>> samples;
    double slope = 0;
    double intercept = 0;
    double max_residual = 0;
};

/// Requires >= 3 samples with at least two distinct abscissae.
ExponentFit fit_exponent(std::span<const double> log_scale, std::span<const double> log_value);
ExponentFit fit_exponent(std::span<const std::pair<double, double>> samples);

/// One measured quantity across the scale list.
struct Component {
    std::string name;
    std::vector<double> values;
    ExponentFit fit;
    std::optional<double> expected_slope;
};

/// Common result of the sharpness experiments. Slopes are taken against
/// log_scale, which is log R for R-scans and log delta for delta-scans.
struct ExperimentReport {
    std::string experiment;
    int n = 0;
    std::string scale_name;  // "R" or "delta"
    std::vector<int> scale_log2;
    std::vector<double> log_scale;
    std::vector<Component> components;
    /// Ordered scalar results (implied bounds, thresholds, flags as 0/1).
    std::vector<std::pair<std::string, double>> summary;
    /// Per-sample annotations, e.g. the detected ball-mass regime.
    std::vector<std::string> sample_notes;
    std::vector<std::string> warnings;

    const Component& component(const std::string& name) const;
    double value(const std::string& key) const;
    bool has_value(const std::string& key) const;
};

struct UpperBoundConfig {
    int n = 3;
    Rational eta{2};
    std::vector<int> r_log2{12, 16, 20};
    Rational c{1, 40};
    double rho = 0.02;
    QuadratureSpec quad;
    SearchSpec search;
    int cube_nodes = 3;
    /// Overrides the regime-boundary sigma, for sweeps over sigma.
    std::optional<Rational> sigma;
};

/// Weighted decay test with sigma = (n - eta)/(n + 1) unless overridden and mu the Lebesgue
/// measure on Omega~ = Omega / R. Components: lhs, ball_mass, f_norm2, ratio.
/// Summary: sigma, implied_gamma = -slope(ratio), expected_gamma.
ExperimentReport run_upperbound(const UpperBoundConfig& cfg);

struct BallMassConfig {
    int n = 3;
    Rational sigma{1, 4};
    double eta = 1.6;
    std::vector<int> r_log2{12, 14, 16, 18, 20};
    /// The large-scale branch dominates only once c^(n-eta) rho^eta R^(n-eta-sigma(n+1))
    /// is large, which needs coarser defaults than the other experiments.
    Rational c{1, 4};
    double rho = 1;
    SearchSpec search;
};

/// sup_ball_mass(Omega~, eta) across R; the regime of each sample is read
/// off the maximizing radius and the expected slope follows the majority.
ExperimentReport run_ballmass(const BallMassConfig& cfg);

struct KnappConfig {
    int n = 2;
    double alpha = 1.5;
    double p = 1;
    std::vector<int> delta_log2{3, 4, 5, 6, 7};
    double c0 = 0;  // 0 selects KnappCell::default_c0()
    QuadratureSpec quad;
    SearchSpec search;
};

/// Knapp cell and tube across delta. Components: cell_mass, tube_min,
/// lhs (tube_min^2 |tube|), norm, ratio. Summary: implied threshold on 1/p
/// (bisection on measured slopes) and 2(alpha - 1)/(n - 1).
ExperimentReport run_knapp(const KnappConfig& cfg);

struct MorreyConfig {
    int n = 4;
    double alpha = 2;
    double p = 1.25;
    Rational sigma{1, 4};
    std::vector<int> delta_log2{12, 16, 20};
    Rational c{1, 40};
    double rho = 0.02;
    QuadratureSpec quad;
    SearchSpec search;
    int cube_nodes = 3;
    /// sigma sweep over i / sweep_den, 0 < sigma < 1/2.
    int sweep_den = 32;
};

/// Weighted L^2 test with V = chi_Omega. Components: lhs (||u||_{L^2(V)}),
/// f_hat (||f^||_2), norm (mc_norm of Omega). Summary includes the per-sigma
/// threshold from the measured lhs and f_hat slopes, the sweep's implied
/// threshold on 1/p and 2 alpha/(n + 1).
ExperimentReport run_morrey(const MorreyConfig& cfg);

/// Per-sigma necessary condition 1/p <= (2 sigma - 1 + alpha) / (sigma (n + 1)).
double morrey_threshold(int n, double alpha, double sigma);

/// Boundaries in the (alpha, 1/p) plane.
struct RegionReport {
    int n = 0;
    /// Positive: 2n/(n+1) < alpha <= n and alpha/n <= 1/p < 2(alpha-1)/(n-1).
    Rational positive_alpha_min;
    /// Knapp false region: alpha < 2 and 1/p > 2(alpha-1)/(n-1).
    /// Paraboloid false region (n >= 4 only): alpha >= 2 and 1/p > 2 alpha/(n+1).
    bool paraboloid_applies = false;
    std::vector<std::pair<std::string, std::pair<Rational, Rational>>> endpoints;
    std::vector<std::string> notes;

    Rational positive_lower(const Rational& alpha) const;  // alpha / n
    Rational positive_upper(const Rational& alpha) const;  // 2(alpha-1)/(n-1), exclusive
    Rational knapp_boundary(const Rational& alpha) const;  // 2(alpha-1)/(n-1)
    Rational paraboloid_boundary(const Rational& alpha) const;  // 2 alpha/(n+1)

    /// "positive", "false" or "open"; "outside" when 1/p < alpha/n or 1/p > 1.
    std::string classify(const Rational& alpha, const Rational& inv_p) const;
};

RegionReport region_report(int n);

}  // namespace schrlat
