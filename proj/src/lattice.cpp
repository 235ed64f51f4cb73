#include "schrlat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "schrlat/parallel.hpp"
#include "schrlat/propagator.hpp"

namespace schrlat {

namespace {

/// floor(c * 2^e) for e >= 0, exact.
std::int64_t floor_times_pow2(const Rational& c, int e) {
    if (e > 62) throw ValidationError("index bound exceeds 64 bits");
    const __int128 num = static_cast<__int128>(c.num()) << e;
    const __int128 q = num / c.den();
    if (q > std::numeric_limits<std::int64_t>::max()) throw ValidationError("index bound exceeds 64 bits");
    return static_cast<std::int64_t>(q);
}

/// floor(c * delta^exponent) for the given rational exponent.
std::int64_t index_bound(const Rational& c, const Dyadic& delta, const UnitScale& us, const Rational& exponent) {
    if (us.delta_log2) {
        const Rational e = exponent * Rational(-*us.delta_log2);  // log2 of delta^exponent
        if (e.is_integer()) {
            if (e.num() >= 0) return floor_times_pow2(c, static_cast<int>(e.num()));
            return floor(c * Rational(1, std::int64_t{1} << std::min<std::int64_t>(-e.num(), 62)));
        }
    }
    const long double v = c.to_long_double() * std::pow(delta.to_long_double(), exponent.to_long_double());
    return static_cast<std::int64_t>(std::floor(v));
}

/// {sum_m d_m base^(m-1) : 0 <= d_m <= dmax}, ascending.
std::vector<std::int64_t> digit_expansions(std::int64_t dmax, int level, std::int64_t base) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(dmax) + 1);
    for (std::int64_t d = 0; d <= dmax; ++d) out[static_cast<std::size_t>(d)] = d;
    __int128 place = 1;
    for (int m = 2; m <= level; ++m) {
        place *= base;
        if (place * (dmax + 1) > (static_cast<__int128>(1) << 62)) throw ValidationError("lattice coordinates exceed 64 bits");
        std::vector<std::int64_t> next;
        next.reserve(out.size() * static_cast<std::size_t>(dmax + 1));
        for (std::int64_t d = 0; d <= dmax; ++d)
            for (const auto v : out) next.push_back(v + static_cast<std::int64_t>(place) * d);
        out = std::move(next);
    }
    return out;
}

std::uint64_t checked_pow(std::uint64_t base, int e) {
    unsigned __int128 v = 1;
    for (int i = 0; i < e; ++i) {
        v *= base;
        if (v > (static_cast<unsigned __int128>(1) << 62)) throw std::overflow_error("lattice cardinality exceeds 2^62");
    }
    return static_cast<std::uint64_t>(v);
}

}  // namespace

void LatticeSet::refresh_values() {
    const long double inv_h = 1.0L / unit_;
    const long double dil = dilation_.to_long_double();
    x_values_.resize(x_coefs_.size());
    t_values_.resize(t_coefs_.size());
    for (std::size_t i = 0; i < x_coefs_.size(); ++i)
        x_values_[i] = static_cast<double>(static_cast<long double>(x_coefs_[i]) * inv_h * dil);
    for (std::size_t i = 0; i < t_coefs_.size(); ++i)
        t_values_[i] = static_cast<double>(2.0L * static_cast<long double>(t_coefs_[i]) * inv_h * inv_h * dil);
}

std::uint64_t LatticeSet::size() const {
    const std::uint64_t nx = checked_pow(x_coefs_.size(), n_ - 1);
    const unsigned __int128 total = static_cast<unsigned __int128>(nx) * t_coefs_.size();
    if (total > (static_cast<unsigned __int128>(1) << 62)) throw std::overflow_error("lattice cardinality exceeds 2^62");
    return static_cast<std::uint64_t>(total);
}

std::vector<std::size_t> LatticeSet::axis_indices(std::uint64_t index) const {
    if (index >= size()) throw ValidationError("lattice point index out of range");
    std::vector<std::size_t> idx(static_cast<std::size_t>(n_));
    idx.back() = static_cast<std::size_t>(index % t_coefs_.size());
    index /= t_coefs_.size();
    for (int d = n_ - 2; d >= 0; --d) {
        idx[static_cast<std::size_t>(d)] = static_cast<std::size_t>(index % x_coefs_.size());
        index /= x_coefs_.size();
    }
    return idx;
}

std::vector<double> LatticeSet::point(std::uint64_t index) const {
    const auto idx = axis_indices(index);
    std::vector<double> out(idx.size());
    for (std::size_t d = 0; d + 1 < idx.size(); ++d) out[d] = x_values_[idx[d]];
    out.back() = t_values_[idx.back()];
    return out;
}

ExactPoint LatticeSet::exact_point(std::uint64_t index) const {
    const auto idx = axis_indices(index);
    ExactPoint out(idx.size());
    for (std::size_t d = 0; d + 1 < idx.size(); ++d) out[d] = Dyadic(x_coefs_[idx[d]]);
    out.back() = Dyadic(t_coefs_[idx.back()]);
    return out;
}

std::vector<ExactPoint> LatticeSet::exact_points(std::size_t limit) const {
    const std::uint64_t count = size();
    if (count > limit) throw ValidationError("lattice too large to enumerate");
    std::vector<ExactPoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(exact_point(i));
    return out;
}

double LatticeSet::min_spacing() const {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto* axis : {&x_values_, &t_values_})
        for (std::size_t i = 1; i < axis->size(); ++i) gap = std::min(gap, (*axis)[i] - (*axis)[i - 1]);
    return gap;
}

LatticeSet build_lattice(const Dyadic& delta, const Rational& sigma, int level, int n, const Rational& c) {
    if (!(Dyadic(0) < delta && delta < Dyadic(1))) throw ValidationError("delta must lie in (0, 1), got " + delta.str());
    if (!(Rational(0) < sigma && sigma < Rational(1, 2)))
        throw ValidationError("sigma must lie in (0, 1/2), got " + sigma.str());
    if (level < 1) throw ValidationError("level must be >= 1");
    if (level >= 2 && !delta.is_power_of_two())
        throw ValidationError("level >= 2 requires 1/delta to be an integer, got delta = " + delta.str());
    if (n < 2) throw ValidationError("dimension n must be >= 2");
    if (!(Rational(0) < c)) throw ValidationError("lattice constant c must be positive");

    LatticeSet L;
    L.delta_ = delta;
    L.sigma_ = sigma;
    L.level_ = level;
    L.n_ = n;
    L.c_ = c;
    const UnitScale us = unit_scale(delta, sigma);
    L.unit_ = us.unit;
    L.p_max_ = index_bound(c, delta, us, sigma - Rational(1));
    L.q_max_ = index_bound(c, delta, us, Rational(2) * sigma - Rational(1));
    if (L.p_max_ == 0 && L.q_max_ == 0) {
        std::ostringstream msg;
        msg << "lattice is the single point 0: c delta^(sigma-1) < 1 for delta = " << delta << ", sigma = " << sigma
            << ", c = " << c << "; choose a smaller delta";
        throw ValidationError(msg.str());
    }
    std::int64_t base = 1;
    if (level >= 2) {
        const int a = *us.delta_log2;
        if (a > 62) throw ValidationError("1/delta exceeds 64 bits");
        base = std::int64_t{1} << a;
        if (L.p_max_ >= base || L.q_max_ >= base)
            throw ValidationError("index bound reaches 1/delta, so level digits would collide; decrease c");
    }
    L.x_coefs_ = digit_expansions(L.p_max_, level, base);
    L.t_coefs_ = digit_expansions(L.q_max_, level, base);
    std::sort(L.x_coefs_.begin(), L.x_coefs_.end());
    std::sort(L.t_coefs_.begin(), L.t_coefs_.end());
    L.refresh_values();
    (void)L.size();
    return L;
}

BoxUnionWeight thicken(const LatticeSet& lattice, double rho) {
    if (!(rho > 0)) throw ValidationError("thickening radius must be positive");
    const double spacing = lattice.min_spacing();
    if (!(2 * rho < spacing)) {
        std::ostringstream msg;
        msg << "thickening radius " << rho << " makes cubes overlap: need 2 rho < minimal spacing " << spacing;
        throw ValidationError(msg.str());
    }
    std::vector<AxisUnion> axes;
    const auto xs = lattice.x_values();
    const auto ts = lattice.t_values();
    for (int d = 0; d + 1 < lattice.dimension(); ++d) axes.push_back(AxisUnion{{xs.begin(), xs.end()}, rho});
    axes.push_back(AxisUnion{{ts.begin(), ts.end()}, rho});
    return BoxUnionWeight::product(std::move(axes));
}

LatticeSet scale(const LatticeSet& lattice, const Rational& lambda) {
    if (!(Rational(0) < lambda)) throw ValidationError("scale factor must be positive");
    LatticeSet out = lattice;
    out.dilation_ = lattice.dilation_ * lambda;
    out.refresh_values();
    return out;
}

namespace {

void require_matching(const FrequencyProfile& profile, const LatticeSet& lattice) {
    if (!(profile.delta() == lattice.delta()) || !(profile.sigma() == lattice.sigma()) ||
        profile.level() != lattice.level())
        throw ValidationError("profile and lattice must share delta, sigma and level");
    if (!(lattice.dilation() == Rational(1))) throw ValidationError("lattice must be undilated");
}

}  // namespace

MinModulus min_modulus(const FrequencyProfile& profile, const LatticeSet& lattice, const QuadratureSpec& quad) {
    require_matching(profile, lattice);
    quad.validate();
    const auto xs = lattice.x_values();
    const auto ts = lattice.t_values();
    const std::size_t nx = xs.size();
    std::vector<double> mod(nx * ts.size());
    parallel_for(mod.size(), [&](std::size_t k) {
        mod[k] = std::abs(line_integral(profile, xs[k / ts.size()], ts[k % ts.size()], quad));
    });

    const int n = lattice.dimension();
    MinModulus best;
    best.value = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0, best_j = 0;
    for (std::size_t j = 0; j < ts.size(); ++j) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < nx; ++i)
            if (mod[i * ts.size() + j] < mod[arg * ts.size() + j]) arg = i;
        const double value = std::pow(mod[arg * ts.size() + j], n - 1);
        if (value < best.value || (value == best.value && arg < best_i)) {
            best.value = value;
            best_i = arg;
            best_j = j;
        }
    }
    best.x.assign(static_cast<std::size_t>(n - 1), xs[best_i]);
    best.t = ts[best_j];
    std::uint64_t index = 0;
    for (int d = 0; d < n - 1; ++d) index = index * nx + best_i;
    best.index = index * ts.size() + best_j;
    return best;
}

double max_theta(const FrequencyProfile& profile, const LatticeSet& lattice) {
    require_matching(profile, lattice);
    const auto xs = lattice.x_values();
    const auto ts = lattice.t_values();
    std::vector<double> theta(xs.size() * ts.size());
    parallel_for(theta.size(), [&](std::size_t k) {
        theta[k] = phase_deviation(profile, xs[k / ts.size()], ts[k % ts.size()]).theta;
    });
    return theta.empty() ? 0.0 : *std::max_element(theta.begin(), theta.end());
}

SelfSimilarityResult lattice_self_similarity(const LatticeSet& lattice) {
    return lattice_self_similarity(lattice.exact_points(), lattice);
}

SelfSimilarityResult lattice_self_similarity(std::vector<ExactPoint> points, const LatticeSet& lattice) {
    if (lattice.level() < 2) throw ValidationError("lattice self-similarity needs level >= 2");
    const LatticeSet base = build_lattice(lattice.delta(), lattice.sigma(), 1, lattice.dimension(), lattice.c());
    const LatticeSet coarse =
        build_lattice(lattice.delta(), lattice.sigma(), lattice.level() - 1, lattice.dimension(), lattice.c());
    const Dyadic inv_delta = Dyadic::pow2(-lattice.delta().exponent());

    const auto fine = base.exact_points();
    const auto rest = coarse.exact_points();
    std::vector<ExactPoint> sums;
    sums.reserve(fine.size() * rest.size());
    for (const auto& a : fine) {
        for (const auto& b : rest) {
            ExactPoint s(a.size());
            for (std::size_t d = 0; d < a.size(); ++d) s[d] = a[d] + inv_delta * b[d];
            sums.push_back(std::move(s));
        }
    }
    std::sort(sums.begin(), sums.end());
    SelfSimilarityResult out;
    if (const auto dup = std::adjacent_find(sums.begin(), sums.end()); dup != sums.end()) {
        out.witness = *dup;
        out.detail = "Minkowski sum has a repeated point";
        return out;
    }
    std::sort(points.begin(), points.end());
    std::vector<ExactPoint> diff;
    std::set_symmetric_difference(points.begin(), points.end(), sums.begin(), sums.end(), std::back_inserter(diff));
    if (!diff.empty()) {
        out.witness = diff.front();
        const bool in_points = std::binary_search(points.begin(), points.end(), diff.front());
        out.detail = in_points ? "point of the lattice missing from the Minkowski sum"
                               : "point of the Minkowski sum missing from the lattice";
        return out;
    }
    out.holds = true;
    out.detail = std::to_string(sums.size()) + " points match";
    return out;
}

}  // namespace schrlat
