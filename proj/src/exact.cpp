#include "schrlat/exact.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace schrlat {

namespace {

constexpr __int128 kInt64Max = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kInt64Min = std::numeric_limits<std::int64_t>::min();

bool fits_int64(__int128 v) { return v >= kInt64Min && v <= kInt64Max; }

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

Dyadic::Dyadic(std::int64_t mantissa, int exponent) {
    *this = from_wide(mantissa, exponent);
}

Dyadic Dyadic::from_wide(__int128 m, int e) {
    Dyadic d;
    if (m == 0) return d;
    while ((m & 1) == 0) {
        m >>= 1;
        ++e;
    }
    if (!fits_int64(m)) throw std::overflow_error("Dyadic mantissa exceeds 64 bits");
    d.mantissa_ = static_cast<std::int64_t>(m);
    d.exponent_ = e;
    return d;
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(mantissa_), exponent_); }

long double Dyadic::to_long_double() const {
    return std::ldexp(static_cast<long double>(mantissa_), exponent_);
}

std::int64_t Dyadic::numerator() const {
    if (exponent_ >= 0) {
        if (exponent_ > 62) throw std::overflow_error("Dyadic numerator exceeds 64 bits");
        __int128 v = static_cast<__int128>(mantissa_) << exponent_;
        if (!fits_int64(v)) throw std::overflow_error("Dyadic numerator exceeds 64 bits");
        return static_cast<std::int64_t>(v);
    }
    return mantissa_;
}

std::int64_t Dyadic::denominator() const {
    if (exponent_ >= 0) return 1;
    if (-exponent_ > 62) throw std::overflow_error("Dyadic denominator exceeds 64 bits");
    return std::int64_t{1} << (-exponent_);
}

Dyadic Dyadic::ldexp(int shift) const {
    if (is_zero()) return *this;
    return from_wide(mantissa_, exponent_ + shift);
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const int e = std::min(a.exponent_, b.exponent_);
    const int sa = a.exponent_ - e;
    const int sb = b.exponent_ - e;
    if (sa > 63 || sb > 63) throw std::overflow_error("Dyadic sum exceeds 64-bit precision");
    const __int128 m = (static_cast<__int128>(a.mantissa_) << sa) + (static_cast<__int128>(b.mantissa_) << sb);
    return Dyadic::from_wide(m, e);
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    return Dyadic::from_wide(static_cast<__int128>(a.mantissa_) * b.mantissa_, a.exponent_ + b.exponent_);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    // Both values are exactly representable in an x87 long double (64-bit
    // significand, 15-bit exponent), so this comparison is exact.
    const long double x = a.to_long_double();
    const long double y = b.to_long_double();
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Dyadic::str() const {
    if (exponent_ >= 0 && exponent_ <= 62) return std::to_string(numerator());
    if (exponent_ < 0 && -exponent_ <= 62) return std::to_string(mantissa_) + "/" + std::to_string(denominator());
    return std::to_string(mantissa_) + "*2^" + std::to_string(exponent_);
}

std::ostream& operator<<(std::ostream& os, const Dyadic& d) { return os << d.str(); }

// Rational ------------------------------------------------------------------

Rational::Rational(std::int64_t num, std::int64_t den) { *this = from_wide(num, den); }

Rational Rational::from_wide(__int128 num, __int128 den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (!fits_int64(num) || !fits_int64(den)) throw std::overflow_error("Rational exceeds 64 bits");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

Rational Rational::parse(std::string_view text) {
    auto parse_int = [&](std::string_view s) -> std::int64_t {
        if (s.empty()) throw ValidationError("empty number in rational '" + std::string(text) + "'");
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(std::string(s), &pos);
        } catch (const std::exception&) {
            throw ValidationError("cannot parse rational '" + std::string(text) + "'");
        }
        if (pos != s.size()) throw ValidationError("cannot parse rational '" + std::string(text) + "'");
        return v;
    };
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    }
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (frac.size() > 17) throw ValidationError("too many decimals in '" + std::string(text) + "'");
        const bool negative = !whole.empty() && whole.front() == '-';
        if (negative) whole.remove_prefix(1);
        const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
        const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
        if (f < 0) throw ValidationError("cannot parse rational '" + std::string(text) + "'");
        __int128 den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        const __int128 num = static_cast<__int128>(w) * den + f;
        return from_wide(negative ? -num : num, den);
    }
    return Rational(parse_int(text));
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ValidationError("division by zero rational");
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

std::int64_t floor(const Rational& r) {
    std::int64_t q = r.num() / r.den();
    if (r.num() % r.den() != 0 && r.num() < 0) --q;
    return q;
}

}  // namespace schrlat
