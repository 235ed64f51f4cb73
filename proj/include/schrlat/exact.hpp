#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace schrlat {

/// Thrown when user-supplied parameters violate a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exact binary rational m * 2^e, kept normalized (m odd, or m == 0 with e == 0).
///
/// Every interval endpoint and lattice coefficient in this library is of this
/// form, so set identities can be checked with plain equality. Arithmetic
/// throws std::overflow_error instead of silently wrapping.
class Dyadic {
public:
    constexpr Dyadic() = default;
    Dyadic(std::int64_t mantissa, int exponent = 0);

    static Dyadic pow2(int exponent) { return Dyadic(1, exponent); }

    std::int64_t mantissa() const { return mantissa_; }
    int exponent() const { return exponent_; }

    bool is_zero() const { return mantissa_ == 0; }
    bool is_integer() const { return exponent_ >= 0; }
    bool is_power_of_two() const { return mantissa_ == 1; }

    double to_double() const;
    long double to_long_double() const;

    /// Numerator and denominator of the value as a reduced fraction.
    /// Throws std::overflow_error when either does not fit in int64.
    std::int64_t numerator() const;
    std::int64_t denominator() const;

    Dyadic operator-() const { return Dyadic(-mantissa_, exponent_); }
    Dyadic abs() const { return mantissa_ < 0 ? -*this : *this; }
    Dyadic ldexp(int shift) const;

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

    friend bool operator==(const Dyadic& a, const Dyadic& b) = default;
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

    std::string str() const;

private:
    static Dyadic from_wide(__int128 mantissa, int exponent);

    std::int64_t mantissa_ = 0;
    int exponent_ = 0;
};

std::ostream& operator<<(std::ostream& os, const Dyadic& d);

/// Reduced fraction with positive denominator.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    /// Parses "p/q", "p" or a decimal literal such as "0.02".
    static Rational parse(std::string_view text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    long double to_long_double() const {
        return static_cast<long double>(num_) / static_cast<long double>(den_);
    }
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const { return Rational(-num_, den_); }
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    std::string str() const;

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// floor(x) for a rational, exact.
std::int64_t floor(const Rational& r);

}  // namespace schrlat
