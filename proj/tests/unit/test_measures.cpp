#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "schrlat/measures.hpp"
#include "schrlat/propagator.hpp"

using namespace schrlat;

namespace {

BoxUnionWeight cube(int n, double hw, double offset = 0) {
    return BoxUnionWeight::from_boxes(n, {Box{std::vector<double>(static_cast<std::size_t>(n), offset),
                                              std::vector<double>(static_cast<std::size_t>(n), hw)}});
}

BoxUnionWeight two_cubes() {
    return BoxUnionWeight::from_boxes(2, {Box{{0, 0}, {0.5, 0.5}}, Box{{3, 1}, {0.25, 0.25}}});
}

BoxUnionWeight tube(double delta) {
    const double c0 = 1 / (8 * std::numbers::pi);
    return BoxUnionWeight::product({AxisUnion{{0}, c0 / delta / 2}, AxisUnion{{0}, c0 / (delta * delta) / 2}});
}

}  // namespace

TEST_CASE("box mass examples") {
    const auto W = cube(2, 1);
    const std::vector<double> origin{0, 0};
    CHECK(box_mass(W, origin, 1) == 4);
    CHECK(box_mass(W, origin, 0.5) == 1);
    CHECK(box_mass(cube(3, 1), std::vector<double>{0, 0, 0}, 1) == 8);
    CHECK(box_mass(cube(2, 1, 100), origin, 1) == 0);
    CHECK_THROWS_AS(box_mass(W, origin, 0), ValidationError);
}

TEST_CASE("product and explicit forms agree") {
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 3, Rational(1, 40));
    const auto P = thicken(L, 0.02);
    const auto E = BoxUnionWeight::from_boxes(3, P.boxes());
    CHECK(E.volume() == doctest::Approx(P.volume()).epsilon(1e-13));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ux(-5, 100), ut(-5, 140), ur(0.001, 80);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> c{ux(rng), ux(rng), ut(rng)};
        const double r = ur(rng);
        CHECK(box_mass(P, c, r) == doctest::Approx(box_mass(E, c, r)).epsilon(1e-12));
    }
}

TEST_CASE("box mass is monotone and additive") {
    const auto W = two_cubes();
    const std::vector<double> c{1, 0.5};
    double prev = 0;
    for (double r = 0.1; r < 6; r *= 1.3) {
        const double m = box_mass(W, c, r);
        CHECK(m >= prev);
        prev = m;
        const double parts = box_mass(BoxUnionWeight::from_boxes(2, {W.explicit_boxes()[0]}), c, r) +
                             box_mass(BoxUnionWeight::from_boxes(2, {W.explicit_boxes()[1]}), c, r);
        CHECK(m == parts);
    }
}

TEST_CASE("overlapping boxes are rejected") {
    CHECK_THROWS_AS(BoxUnionWeight::from_boxes(2, {Box{{0, 0}, {1, 1}}, Box{{1.5, 0}, {1, 1}}}), ValidationError);
    CHECK_THROWS_AS(BoxUnionWeight::product({AxisUnion{{0, 1}, 0.5}}), ValidationError);
    CHECK_NOTHROW(BoxUnionWeight::from_boxes(2, {Box{{0, 0}, {1, 1}}, Box{{2, 0}, {1, 1}}}));
}

TEST_CASE("sup ball mass and Morrey norm on single cubes") {
    const auto W = cube(2, 1);
    const auto s = sup_ball_mass(W, 2);
    CHECK(s.value == doctest::Approx(4).epsilon(1e-12));
    CHECK(s.r == 1);
    for (const double p : {1.0, 2.0}) {
        const auto m = mc_norm(cube(2, 0.5), 2 / p, p);
        CHECK(m.value == doctest::Approx(1).epsilon(1e-12));
    }
    CHECK_THROWS_AS(mc_norm(W, 2, 2), ValidationError);
    CHECK_THROWS_AS(sup_ball_mass(W, 3), ValidationError);
}

TEST_CASE("search agrees with the brute-force oracle") {
    const auto L = build_lattice(Dyadic::pow2(-4), Rational(1, 4), 1, 2, Rational(1));
    const auto omega = thicken(scale(L, Rational(1, 16)), 0.02 / 16);
    struct Case {
        BoxUnionWeight w;
        NormQuery q;
        double step;
    };
    const std::vector<Case> cases{
        {cube(2, 1), NormQuery::ball_mass(2), 0.25},
        {cube(2, 1), NormQuery::ball_mass(1), 0.25},
        {two_cubes(), NormQuery::ball_mass(1.5), 1.0 / 16},
        {two_cubes(), NormQuery::morrey(1, 1), 1.0 / 16},
        {tube(0.25), NormQuery::morrey(1.5, 1), 1.0 / 64},
        {omega, NormQuery::ball_mass(1), 1.0 / 64},
        {omega, NormQuery::ball_mass(1.8), 1.0 / 64},
    };
    for (const auto& c : cases) {
        const double fast = evaluate(c.w, c.q).value;
        const double slow = brute_force_sup(c.w, c.q, c.step);
        CHECK(fast / slow == doctest::Approx(1).epsilon(0.15));
    }
}

TEST_CASE("sup ball mass is homogeneous and monotone") {
    const auto W = two_cubes();
    for (const double eta : {0.5, 1.0, 1.7}) {
        const double base = sup_ball_mass(W, eta).value;
        for (const double lambda : {0.25, 2.0, 8.0}) {
            const double scaled = sup_ball_mass(scale(W, lambda), eta).value;
            const double ratio = scaled / (std::pow(lambda, 2 - eta) * base);
            CHECK(ratio <= 1.2);
            CHECK(ratio >= 1 / 1.2);
        }
        auto boxes = W.explicit_boxes();
        boxes.push_back(Box{{-4, 3}, {0.5, 0.5}});
        CHECK(sup_ball_mass(BoxUnionWeight::from_boxes(2, boxes), eta).value >= base);
    }
}

TEST_CASE("omega mass matches direct cube quadrature") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 3, Rational(1, 40));
    const double rho = 0.02;
    const auto& rule = gauss_legendre(3);
    double direct = 0;
    for (std::uint64_t i = 0; i < L.size(); ++i) {
        const auto pt = L.point(i);
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                for (std::size_t c = 0; c < 3; ++c) {
                    const std::vector<double> x{pt[0] + rho * rule.nodes[a], pt[1] + rho * rule.nodes[b]};
                    const double w = rule.weights[a] * rule.weights[b] * rule.weights[c] * rho * rho * rho;
                    direct += w * std::norm(solution_at(g, 3, x, pt[2] + rho * rule.nodes[c]));
                }
    }
    CHECK(omega_l2_mass(g, L, rho, {}) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("section mass") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 2, Rational(1, 40));
    const double mass = support_mass(g).to_double();
    const auto s0 = section_mass(g, L, 0, 0.02, {});
    CHECK(s0.raw_ratio > 0);
    CHECK(s0.raw_ratio <= 1);
    CHECK(s0.cubes == 13);
    // At t = 0 the x = 0 cube alone carries about 2 rho mass^2.
    CHECK(s0.mass >= 0.04 * mass * mass * 0.99);
    const auto s1 = section_mass(g, L, 128, 0.02, {});
    CHECK(s1.raw_ratio <= 1);
    CHECK(s1.benchmark_ratio > 0.5);
    CHECK_THROWS_AS(section_mass(g, L, 64, 0.02, {}), ValidationError);
}
