#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "schrlat/profile.hpp"

using namespace schrlat;

namespace {

std::vector<double> centers_of(const FrequencyProfile& p) { return {p.centers().begin(), p.centers().end()}; }

}  // namespace

TEST_CASE("profile examples") {
    const auto g = build_profile(4, Rational(1, 4), 1);
    CHECK(g.ell_count() == 2);
    CHECK(centers_of(g) == std::vector<double>{0.5, 1.0});
    CHECK(g.halfwidth() == 1.0 / 16);
    CHECK(*g.exact_center(0) == Dyadic(1, -1));

    const auto g2 = build_profile(4, Rational(1, 4), 2);
    CHECK(centers_of(g2) == std::vector<double>{0.5 + 1.0 / 32, 0.5 + 1.0 / 16, 1 + 1.0 / 32, 1 + 1.0 / 16});
    CHECK(g2.halfwidth() == 1.0 / 256);

    const auto g12 = build_profile(12, Rational(1, 4), 1);
    REQUIRE(g12.size() == 8);
    for (std::size_t l = 0; l < 8; ++l) CHECK(*g12.exact_center(l) == Dyadic(static_cast<std::int64_t>(l + 1), -3));
    CHECK(g12.halfwidth() == std::ldexp(1.0, -12));
}

TEST_CASE("centers are the digit sums") {
    const auto g = build_profile(12, Rational(1, 4), 3);
    CHECK(g.size() == 512);
    const Dyadic h = *g.unit_exact();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto d = g.digits(i);
        Dyadic expected;
        Dyadic scale = h;
        for (const auto l : d) {
            expected += Dyadic(l) * scale;
            scale *= g.delta();
        }
        CHECK(*g.exact_center(i) == expected);
    }
    CHECK(std::is_sorted(g.centers().begin(), g.centers().end()));
}

TEST_CASE("off-grid sigma keeps exact coefficients") {
    const auto g = build_profile(10, Rational(1, 4), 2);
    CHECK_FALSE(g.on_grid());
    CHECK(g.ell_count() == 5);  // floor(2^2.5)
    CHECK(g.size() == 25);
    CHECK(g.intervals()[6].center_coef == Dyadic(2) + Dyadic(2, -10));
    CHECK(g.centers()[0] == doctest::Approx(std::pow(2.0, -2.5) * (1 + 1.0 / 1024)).epsilon(1e-15));
}

TEST_CASE("profile evaluation and location") {
    const auto g = build_profile(4, Rational(1, 4), 1);
    CHECK(eval_profile(g, 0.5) == 1);
    CHECK(eval_profile(g, 0.25) == 0);
    CHECK(eval_profile(g, 0.5 + 1.0 / 16) == 1);
    CHECK(eval_profile(g, 1.0 + 1.0 / 16 + 1e-12) == 0);
    const auto g2 = build_profile(4, Rational(1, 4), 2);
    CHECK(eval_profile(g2, 0.5 + 1.0 / 32) == 1);
    const auto loc = locate(g2, 1 + 1.0 / 16 + 1.0 / 512);
    REQUIRE(loc.has_value());
    CHECK(loc->digits == std::vector<std::int64_t>{2, 2});
    CHECK(loc->epsilon == 1.0 / 512);
}

TEST_CASE("support mass") {
    CHECK(support_mass(build_profile(4, Rational(1, 4), 1)) == Dyadic(1, -2));
    CHECK(support_mass(build_profile(12, Rational(1, 4), 1)) == Dyadic(1, -8));
    CHECK(support_mass(build_profile(4, Rational(1, 4), 2)) == Dyadic(1, -5));
    for (int k = 2; k <= 3; ++k) {
        const auto pk = build_profile(12, Rational(1, 4), k);
        const auto pk1 = build_profile(12, Rational(1, 4), k - 1);
        CHECK(support_mass(pk) == Dyadic(pk.ell_count()) * pk.delta() * support_mass(pk1));
    }
}

TEST_CASE("self-similar decomposition") {
    const auto g2 = build_profile(4, Rational(1, 4), 2);
    const auto dec = self_similar_decomposition(g2);
    CHECK(dec.base.level() == 1);
    REQUIRE(dec.maps.size() == 2);
    CHECK(dec.maps[0] == AffineMap1D{Dyadic(1, -4), Dyadic(1)});
    CHECK(dec.maps[1] == AffineMap1D{Dyadic(1, -4), Dyadic(2)});

    const auto g3 = build_profile(12, Rational(1, 4), 3);
    const auto dec3 = self_similar_decomposition(g3);
    CHECK(dec3.maps.size() == 8);
    CHECK(dec3.base.level() == 2);

    CHECK_THROWS_AS(self_similar_decomposition(build_profile(4, Rational(1, 4), 1)), ValidationError);
}

TEST_CASE("profile preconditions") {
    CHECK_THROWS_AS(build_profile(Dyadic(1), Rational(1, 4), 1), ValidationError);
    CHECK_THROWS_AS(build_profile(12, Rational(1, 2), 1), ValidationError);
    CHECK_THROWS_AS(build_profile(12, Rational(1, 4), 0), ValidationError);
    CHECK_THROWS_AS(build_profile(Dyadic(3, -12), Rational(1, 4), 2), ValidationError);
    // 2 delta^(1-sigma) >= 1
    CHECK_THROWS_AS(build_profile(1, Rational(1, 4), 1), ValidationError);
    CHECK_NOTHROW(build_profile(Dyadic(3, -12), Rational(1, 4), 1));
}
