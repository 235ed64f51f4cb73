#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "doctest.h"
#include "schrlat/lattice.hpp"
#include "schrlat/propagator.hpp"

using namespace schrlat;

namespace {

const Rational kC(1, 40);

/// Independent enumeration: nested loops over every digit tuple, keeping the
/// distinct (x..., t) coefficient tuples.
std::set<std::vector<std::int64_t>> enumerate(int a, int k, int n, std::int64_t pmax, std::int64_t qmax) {
    std::vector<std::int64_t> xs, ts;
    auto expand = [&](std::int64_t dmax, std::vector<std::int64_t>& out) {
        std::vector<std::int64_t> digits(static_cast<std::size_t>(k), 0);
        while (true) {
            std::int64_t v = 0;
            for (int m = k - 1; m >= 0; --m) v = (v << a) + digits[static_cast<std::size_t>(m)];
            out.push_back(v);
            int m = 0;
            while (m < k && ++digits[static_cast<std::size_t>(m)] > dmax) digits[static_cast<std::size_t>(m++)] = 0;
            if (m == k) break;
        }
    };
    expand(pmax, xs);
    expand(qmax, ts);
    std::set<std::vector<std::int64_t>> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n - 1), 0);
    while (true) {
        for (const auto t : ts) {
            std::vector<std::int64_t> pt;
            for (const auto i : idx) pt.push_back(xs[i]);
            pt.push_back(t);
            out.insert(pt);
        }
        std::size_t d = 0;
        while (d < idx.size() && ++idx[d] == xs.size()) idx[d++] = 0;
        if (d == idx.size()) break;
    }
    return out;
}

}  // namespace

TEST_CASE("lattice cardinality examples") {
    const auto L = build_lattice(Dyadic::pow2(-20), Rational(1, 4), 1, 2, kC);
    CHECK(L.p_max() == 819);
    CHECK(L.q_max() == 25);
    CHECK(L.size() == 21320);

    const auto L3 = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 3, kC);
    CHECK(L3.p_max() == 12);
    CHECK(L3.q_max() == 1);
    CHECK(L3.size() == 338);
}

TEST_CASE("lattice points match an independent enumeration") {
    for (const auto& [k, n] : std::vector<std::pair<int, int>>{{1, 3}, {2, 2}, {2, 3}, {3, 2}}) {
        const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), k, n, kC);
        const auto ref = enumerate(12, k, n, L.p_max(), L.q_max());
        CHECK(L.size() == ref.size());
        std::vector<std::int64_t> prev;
        bool ordered = true;
        for (std::uint64_t i = 0; i < L.size(); ++i) {
            const auto pt = L.exact_point(i);
            std::vector<std::int64_t> coefs;
            for (const auto& c : pt) coefs.push_back(c.numerator());
            CHECK(ref.count(coefs) == 1);
            if (i > 0 && !(prev < coefs)) ordered = false;
            prev = coefs;
        }
        CHECK(ordered);
    }
}

TEST_CASE("lattice coordinates") {
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 2, kC);
    CHECK(L.x_values()[1] == 8.0);
    CHECK(L.t_values()[1] == 128.0);
    const auto pt = L.point(L.size() - 1);
    CHECK(pt == std::vector<double>{96.0, 128.0});
    const auto L10 = build_lattice(Dyadic::pow2(-10), Rational(1, 4), 1, 2, kC);
    CHECK(L10.x_values()[1] == doctest::Approx(std::pow(2.0, 2.5)).epsilon(1e-15));
}

TEST_CASE("lattice preconditions") {
    CHECK_THROWS_AS(build_lattice(Dyadic::pow2(-4), Rational(1, 4), 1, 2, kC), ValidationError);
    CHECK_THROWS_AS(build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 1, kC), ValidationError);
    CHECK_THROWS_AS(build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 2, Rational(0)), ValidationError);
    CHECK_THROWS_AS(build_lattice(Dyadic(3, -12), Rational(1, 4), 2, 2, kC), ValidationError);
}

TEST_CASE("thickening") {
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 3, kC);
    const auto W = thicken(L, 0.02);
    CHECK(W.box_count() == 338);
    CHECK(W.volume() == doctest::Approx(338 * std::pow(0.04, 3)).epsilon(1e-14));
    CHECK_THROWS_AS(thicken(L, 4.0), ValidationError);
    CHECK_THROWS_AS(thicken(L, 64.0), ValidationError);
}

TEST_CASE("scaling is exact") {
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 2, kC);
    CHECK(scale(L, Rational(1)) == L);
    CHECK(scale(scale(L, Rational(3)), Rational(1, 3)) == L);
    CHECK(scale(thicken(L, 0.02), 1.0) == thicken(L, 0.02));

    const double R = 4096;
    const auto small = thicken(scale(L, Rational(1, 4096)), 0.02 / R);
    CHECK(scale(small, R) == thicken(L, 0.02));
    const auto W = thicken(L, 0.02);
    CHECK(scale(W, 3.0).volume() == doctest::Approx(9 * W.volume()).epsilon(1e-14));
}

TEST_CASE("minimum modulus carries the certificate") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 2, kC);
    const auto mm = min_modulus(g, L, {});
    const double mass = support_mass(g).to_double();
    CHECK(mm.value >= 1.5 * std::pow(2.0, -9));
    CHECK(mm.value <= mass + 1e-14);
    const double theta = max_theta(g, L);
    CHECK(theta < 0.25);
    CHECK(mm.value / mass >= std::cos(2 * std::numbers::pi * theta) - 1e-9);
    CHECK(std::abs(solution_at(g, 2, mm.x, mm.t)) == doctest::Approx(mm.value).epsilon(1e-14));
    CHECK(L.point(mm.index) == std::vector<double>{mm.x[0], mm.t});

    const auto g2 = build_profile(12, Rational(1, 4), 2);
    const auto L2 = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 2, 2, kC);
    const auto mm2 = min_modulus(g2, L2, {});
    const double theta2 = max_theta(g2, L2);
    CHECK(theta2 < 0.25);
    CHECK(mm2.value / support_mass(g2).to_double() >= std::cos(2 * std::numbers::pi * theta2) - 1e-9);
}

TEST_CASE("lattice self-similarity") {
    for (int k = 2; k <= 3; ++k) {
        const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), k, 2, kC);
        const auto res = lattice_self_similarity(L);
        CHECK(res.holds);
    }
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 2, 2, kC);
    auto pts = L.exact_points();
    const Dyadic shift = Dyadic::pow2(-12) * Dyadic::pow2(-3);  // delta in units of h^-1
    pts[5][0] = pts[5][0] + shift;
    const auto bad = lattice_self_similarity(pts, L);
    CHECK_FALSE(bad.holds);
    REQUIRE(bad.witness.has_value());
    CHECK((*bad.witness == pts[5] || *bad.witness == L.exact_point(5)));
    CHECK_THROWS_AS(lattice_self_similarity(build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 2, kC)),
                    ValidationError);
}
