#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "schrlat/exact.hpp"

namespace schrlat {

/// One support interval of a frequency profile.
///
/// The center is stored as a dyadic coefficient of the unit h = delta^sigma,
/// i.e. the absolute center is `center_coef * h`. The halfwidth is absolute.
/// With this split every center is exact for any sigma; when delta = 2^-a and
/// a*sigma is an integer the absolute center is itself dyadic.
struct Interval {
    Dyadic center_coef;
    Dyadic halfwidth;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// xi -> shift_coef * h + scale * xi, with the shift in units of h.
struct AffineMap1D {
    Dyadic scale;
    Dyadic shift_coef;

    Interval apply(const Interval& in) const;
    friend bool operator==(const AffineMap1D&, const AffineMap1D&) = default;
};

/// Indicator of the union of L^k intervals of halfwidth delta^k centered at
/// sum_{r=1..k} l_r delta^(sigma+r-1), 1 <= l_r <= L = floor(delta^-sigma).
///
/// Immutable; intervals are ordered by center.
class FrequencyProfile {
public:
    const Dyadic& delta() const { return delta_; }
    const Rational& sigma() const { return sigma_; }
    int level() const { return level_; }
    std::int64_t ell_count() const { return ell_count_; }

    /// h = delta^sigma.
    long double unit() const { return unit_; }
    /// True when delta = 2^-a and a*sigma is an integer, so h is dyadic.
    bool on_grid() const { return sigma_num_.has_value(); }
    std::optional<int> delta_log2() const { return delta_log2_; }
    /// a*sigma on the dyadic grid.
    std::optional<int> sigma_num() const { return sigma_num_; }
    /// h as an exact dyadic; only on the grid.
    std::optional<Dyadic> unit_exact() const;

    std::span<const Interval> intervals() const { return intervals_; }
    std::size_t size() const { return intervals_.size(); }

    /// Absolute centers, in the same order as intervals().
    std::span<const double> centers() const { return centers_; }
    double halfwidth() const { return halfwidth_; }
    /// Absolute center of interval i as an exact dyadic; only on the grid.
    std::optional<Dyadic> exact_center(std::size_t i) const;
    /// Digits (l_1, ..., l_k) of interval i.
    std::vector<std::int64_t> digits(std::size_t i) const;

    /// Largest |xi| on the support.
    double max_abs_xi() const;

private:
    friend FrequencyProfile build_profile(const Dyadic& delta, const Rational& sigma, int level);

    Dyadic delta_;
    Rational sigma_;
    int level_ = 0;
    std::int64_t ell_count_ = 0;
    long double unit_ = 0;
    std::optional<int> delta_log2_;
    std::optional<int> sigma_num_;
    std::vector<Interval> intervals_;
    std::vector<double> centers_;
    double halfwidth_ = 0;
};

/// Scale data shared by profiles and lattices: h = delta^sigma and the
/// dyadic-grid exponents when delta = 2^-a and a*sigma is an integer.
struct UnitScale {
    long double unit = 0;
    std::optional<int> delta_log2;
    std::optional<int> sigma_num;
};
UnitScale unit_scale(const Dyadic& delta, const Rational& sigma);

/// Builds g (level 1) or g_k.
///
/// Requires 0 < delta < 1, 0 < sigma < 1/2, level >= 1, 2 delta^(1-sigma) < 1,
/// and 1/delta integral when level >= 2. Throws ValidationError otherwise.
FrequencyProfile build_profile(const Dyadic& delta, const Rational& sigma, int level);

/// Convenience overload for delta = 2^-delta_log2.
FrequencyProfile build_profile(int delta_log2, const Rational& sigma, int level);

/// 1 if xi lies in a (closed) support interval, else 0.
int eval_profile(const FrequencyProfile& profile, double xi);

/// Integral of the profile: 2 delta^k L^k, exact.
Dyadic support_mass(const FrequencyProfile& profile);

/// Offset of xi from its support interval: digits l_1..l_k and epsilon.
struct SupportLocation {
    std::vector<std::int64_t> digits;
    double epsilon = 0;
};
std::optional<SupportLocation> locate(const FrequencyProfile& profile, double xi);

struct SelfSimilarDecomposition {
    FrequencyProfile base;
    std::vector<AffineMap1D> maps;
};

/// Writes g_k as the disjoint union of L rescaled copies of g_{k-1} under
/// xi -> l h + delta xi, and checks the identity exactly.
/// Throws ValidationError for level 1 and std::logic_error if the
/// reconstruction does not reproduce the interval set.
SelfSimilarDecomposition self_similar_decomposition(const FrequencyProfile& profile);

}  // namespace schrlat
