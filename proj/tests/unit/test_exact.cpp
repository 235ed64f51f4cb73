#include "doctest.h"
#include "schrlat/exact.hpp"

using schrlat::Dyadic;
using schrlat::Rational;

TEST_CASE("dyadic values stay normalized") {
    CHECK(Dyadic(12) == Dyadic(3, 2));
    CHECK(Dyadic(4, -3) == Dyadic::pow2(-1));
    CHECK(Dyadic(0, 7) == Dyadic());
    CHECK((Dyadic(1, -4) + Dyadic(1, -4)).str() == "1/8");
    CHECK((Dyadic(3, -2) * Dyadic(5, -1)).str() == "15/8");
    CHECK(Dyadic(3, -2) < Dyadic(1));
    CHECK(Dyadic::pow2(-12).denominator() == 4096);
}

TEST_CASE("dyadic overflow is reported") {
    CHECK_THROWS_AS(Dyadic::pow2(40) * Dyadic::pow2(-40) + Dyadic::pow2(-80), std::overflow_error);
    CHECK_THROWS_AS(Dyadic(3, 70).numerator(), std::overflow_error);
}

TEST_CASE("rationals parse fractions, integers and decimals") {
    CHECK(Rational::parse("1/40") == Rational(1, 40));
    CHECK(Rational::parse(" 6/8 ") == Rational(3, 4));
    CHECK(Rational::parse("-3") == Rational(-3));
    CHECK(Rational::parse("0.02") == Rational(1, 50));
    CHECK(Rational::parse("-1.5") == Rational(-3, 2));
    CHECK_THROWS_AS(Rational::parse("1/0"), schrlat::ValidationError);
    CHECK_THROWS_AS(Rational::parse("abc"), schrlat::ValidationError);
    CHECK_THROWS_AS(Rational::parse("1/2x"), schrlat::ValidationError);
}

TEST_CASE("rational arithmetic and floor") {
    CHECK(Rational(1, 4) + Rational(1, 6) == Rational(5, 12));
    CHECK(Rational(2, 3) / Rational(4, 9) == Rational(3, 2));
    CHECK(Rational(-1, 3) < Rational(-1, 4));
    CHECK(schrlat::floor(Rational(7, 2)) == 3);
    CHECK(schrlat::floor(Rational(-7, 2)) == -4);
    CHECK(schrlat::floor(Rational(-4, 2)) == -2);
}
