#include "schrlat/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace schrlat {

namespace {

constexpr std::int64_t kMaxIntervals = 10'000'000;

Dyadic dyadic_pow(const Dyadic& base, int exponent) {
    Dyadic out(1);
    for (int i = 0; i < exponent; ++i) out *= base;
    return out;
}

}  // namespace

Interval AffineMap1D::apply(const Interval& in) const {
    return Interval{shift_coef + scale * in.center_coef, scale * in.halfwidth};
}

std::optional<Dyadic> FrequencyProfile::unit_exact() const {
    if (!sigma_num_) return std::nullopt;
    return Dyadic::pow2(-*sigma_num_);
}

std::optional<Dyadic> FrequencyProfile::exact_center(std::size_t i) const {
    const auto h = unit_exact();
    if (!h) return std::nullopt;
    return intervals_.at(i).center_coef * *h;
}

std::vector<std::int64_t> FrequencyProfile::digits(std::size_t i) const {
    std::vector<std::int64_t> out(static_cast<std::size_t>(level_));
    auto rest = static_cast<std::int64_t>(i);
    for (int r = level_ - 1; r >= 0; --r) {
        out[static_cast<std::size_t>(r)] = rest % ell_count_ + 1;
        rest /= ell_count_;
    }
    return out;
}

double FrequencyProfile::max_abs_xi() const {
    if (centers_.empty()) return 0.0;
    return centers_.back() + halfwidth_;
}

UnitScale unit_scale(const Dyadic& delta, const Rational& sigma) {
    UnitScale out;
    if (delta.is_power_of_two() && delta.exponent() < 0) {
        const int a = -delta.exponent();
        out.delta_log2 = a;
        if ((static_cast<std::int64_t>(a) * sigma.num()) % sigma.den() == 0)
            out.sigma_num = static_cast<int>(a * sigma.num() / sigma.den());
    }
    out.unit = out.sigma_num ? std::ldexp(1.0L, -*out.sigma_num)
                             : std::pow(delta.to_long_double(), sigma.to_long_double());
    return out;
}

FrequencyProfile build_profile(const Dyadic& delta, const Rational& sigma, int level) {
    if (!(Dyadic(0) < delta && delta < Dyadic(1))) throw ValidationError("delta must lie in (0, 1), got " + delta.str());
    if (!(Rational(0) < sigma && sigma < Rational(1, 2)))
        throw ValidationError("sigma must lie in (0, 1/2), got " + sigma.str());
    if (level < 1) throw ValidationError("level must be >= 1");
    if (level >= 2 && !delta.is_power_of_two())
        throw ValidationError("level >= 2 requires 1/delta to be an integer, got delta = " + delta.str());

    FrequencyProfile p;
    p.delta_ = delta;
    p.sigma_ = sigma;
    p.level_ = level;
    const UnitScale scale = unit_scale(delta, sigma);
    p.delta_log2_ = scale.delta_log2;
    p.sigma_num_ = scale.sigma_num;
    p.unit_ = scale.unit;

    const long double d = delta.to_long_double();
    if (p.sigma_num_) {
        if (*p.sigma_num_ > 62) throw ValidationError("delta^-sigma too large");
        p.ell_count_ = std::int64_t{1} << *p.sigma_num_;
        if (!(Dyadic(2) * delta < Dyadic::pow2(-*p.sigma_num_)))
            throw ValidationError("intervals overlap: need 2 delta^(1-sigma) < 1");
    } else {
        p.ell_count_ = static_cast<std::int64_t>(std::floor(std::pow(d, -sigma.to_long_double())));
        if (!(2.0L * d < p.unit_)) throw ValidationError("intervals overlap: need 2 delta^(1-sigma) < 1");
    }

    std::int64_t count = 1;
    for (int r = 0; r < level; ++r) {
        count *= p.ell_count_;
        if (count > kMaxIntervals) throw ValidationError("profile would have more than 1e7 intervals");
    }

    std::vector<Dyadic> scale_pows(static_cast<std::size_t>(level));
    for (int r = 0; r < level; ++r) scale_pows[static_cast<std::size_t>(r)] = dyadic_pow(delta, r);
    const Dyadic halfwidth = dyadic_pow(delta, level);

    p.intervals_.reserve(static_cast<std::size_t>(count));
    std::vector<std::int64_t> digit(static_cast<std::size_t>(level), 1);
    for (std::int64_t i = 0; i < count; ++i) {
        Dyadic coef;
        for (int r = 0; r < level; ++r)
            coef += Dyadic(digit[static_cast<std::size_t>(r)]) * scale_pows[static_cast<std::size_t>(r)];
        p.intervals_.push_back(Interval{coef, halfwidth});
        for (int r = level - 1; r >= 0; --r) {
            if (++digit[static_cast<std::size_t>(r)] <= p.ell_count_) break;
            digit[static_cast<std::size_t>(r)] = 1;
        }
    }

    p.halfwidth_ = halfwidth.to_double();
    p.centers_.reserve(p.intervals_.size());
    for (const auto& iv : p.intervals_)
        p.centers_.push_back(static_cast<double>(iv.center_coef.to_long_double() * p.unit_));
    return p;
}

FrequencyProfile build_profile(int delta_log2, const Rational& sigma, int level) {
    if (delta_log2 < 1 || delta_log2 > 60) throw ValidationError("delta_log2 must lie in [1, 60]");
    return build_profile(Dyadic::pow2(-delta_log2), sigma, level);
}

int eval_profile(const FrequencyProfile& profile, double xi) {
    return locate(profile, xi).has_value() ? 1 : 0;
}

std::optional<SupportLocation> locate(const FrequencyProfile& profile, double xi) {
    const auto centers = profile.centers();
    if (centers.empty()) return std::nullopt;
    const auto it = std::lower_bound(centers.begin(), centers.end(), xi);
    const double hw = profile.halfwidth();
    for (auto cand : {it, it == centers.begin() ? it : std::prev(it)}) {
        if (cand == centers.end()) continue;
        if (std::abs(xi - *cand) <= hw) {
            const auto idx = static_cast<std::size_t>(cand - centers.begin());
            return SupportLocation{profile.digits(idx), xi - *cand};
        }
    }
    return std::nullopt;
}

Dyadic support_mass(const FrequencyProfile& profile) {
    Dyadic count(1);
    for (int r = 0; r < profile.level(); ++r) count *= Dyadic(profile.ell_count());
    return Dyadic(2) * profile.intervals().front().halfwidth * count;
}

SelfSimilarDecomposition self_similar_decomposition(const FrequencyProfile& profile) {
    if (profile.level() < 2) throw ValidationError("self-similar decomposition needs level >= 2");
    SelfSimilarDecomposition out{build_profile(profile.delta(), profile.sigma(), profile.level() - 1), {}};
    out.maps.reserve(static_cast<std::size_t>(profile.ell_count()));
    for (std::int64_t l = 1; l <= profile.ell_count(); ++l) out.maps.push_back(AffineMap1D{profile.delta(), Dyadic(l)});

    std::vector<Interval> rebuilt;
    rebuilt.reserve(profile.size());
    for (const auto& map : out.maps)
        for (const auto& iv : out.base.intervals()) rebuilt.push_back(map.apply(iv));

    const auto expected = profile.intervals();
    if (rebuilt.size() != expected.size() || !std::equal(rebuilt.begin(), rebuilt.end(), expected.begin())) {
        std::ostringstream msg;
        msg << "self-similar reconstruction mismatch: " << rebuilt.size() << " rebuilt vs " << expected.size()
            << " intervals";
        for (std::size_t i = 0; i < std::min(rebuilt.size(), expected.size()); ++i) {
            if (!(rebuilt[i] == expected[i])) {
                msg << "; first difference at " << i << ": " << rebuilt[i].center_coef << " vs "
                    << expected[i].center_coef;
                break;
            }
        }
        throw std::logic_error(msg.str());
    }
    return out;
}

}  // namespace schrlat
