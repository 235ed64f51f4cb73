#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "schrlat/extension.hpp"
#include "schrlat/propagator.hpp"

using namespace schrlat;

namespace {

/// Simpson rule for int_0^d sqrt(1 + x^2).
double simpson_arc(double d, int panels = 20000) {
    const double h = d / panels;
    double acc = 0;
    for (int i = 0; i <= panels; ++i) {
        const double x = h * i;
        const double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
        acc += w * std::sqrt(1 + x * x);
    }
    return acc * h / 3;
}

}  // namespace

TEST_CASE("extension at the origin is the mass") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const double mass = support_mass(g).to_double();
    for (int n = 2; n <= 3; ++n) {
        const std::vector<double> x(static_cast<std::size_t>(n), 0.0);
        CHECK(std::abs(surface_extension(g, n, x) - std::pow(mass, n - 1)) < 1e-15);
    }
}

TEST_CASE("extension matches the propagator on random points") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const double range = 4096;
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> u(-range, range);
    for (int n = 2; n <= 3; ++n) {
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x(static_cast<std::size_t>(n));
            for (auto& v : x) v = u(rng);
            const auto e = surface_extension(g, n, x);
            const auto s = solution_at(g, n, std::span<const double>(x).first(static_cast<std::size_t>(n - 1)), x.back());
            worst = std::max(worst, std::abs(std::abs(e) - std::abs(s)) / std::abs(s));
            CHECK(std::abs(e - s) <= QuadratureSpec{}.abs_tol * (n - 1));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("standard convention reflects x'") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const std::vector<double> x{37.5, -12.25, 300};
    const std::vector<double> reflected{-37.5, 12.25};
    const auto e = surface_extension(g, 3, x, {}, ExtensionConvention::standard);
    const auto s = solution_at(g, 3, reflected, 300);
    CHECK(std::abs(e - s) < 1e-14);
}

TEST_CASE("cell mass") {
    const auto c2 = KnappCell::make(0.125, 2);
    CHECK(l2_cell_mass(c2) == doctest::Approx(simpson_arc(0.125)).epsilon(1e-12));
    CHECK(l2_cell_mass(c2) == doctest::Approx(0.12532476211930377).epsilon(1e-14));
    const auto c3 = KnappCell::make(0.125, 3);
    CHECK(l2_cell_mass(c3) / (0.125 * 0.125) == doctest::Approx(1).epsilon(0.01));
    for (const double d : {0.25, 0.0625, 0.001}) {
        for (int n = 2; n <= 4; ++n) {
            const double r = l2_cell_mass(KnappCell::make(d, n)) / std::pow(d, n - 1);
            CHECK(r >= 1);
            CHECK(r <= 1 + n);
        }
    }
    CHECK(l2_cell_mass(KnappCell::make(1e-4, 3)) / 1e-8 == doctest::Approx(1).epsilon(1e-7));
    CHECK(std::abs(surface_extension(c3, std::vector<double>{0, 0, 0})) ==
          doctest::Approx(l2_cell_mass(c3)).epsilon(1e-12));
}

TEST_CASE("Knapp lower bound on the tube") {
    for (const double d : {0.125, 0.0625}) {
        for (int n = 2; n <= 3; ++n) {
            const auto cell = KnappCell::make(d, n);
            CHECK(cell.phase_variation() < 0.1);
            const auto kb = knapp_lower_bound(cell);
            CHECK(kb.ratio() >= 0.8);
            CHECK(kb.ratio() >= std::cos(2 * std::numbers::pi * cell.phase_variation()) - 1e-12);
        }
    }
    CHECK_THROWS_AS(knapp_lower_bound(KnappCell::make(0.125, 2, 0.5)), ValidationError);
}

TEST_CASE("extension decays off the tube") {
    const auto cell = KnappCell::make(0.125, 2);
    const double sigma = l2_cell_mass(cell);
    double prev = 1;
    for (const double k : {10.0, 40.0, 160.0}) {
        const double xn = k / (cell.delta * cell.delta);
        const auto x = cell.unshear(std::vector<double>{0, xn});
        const double ratio = std::abs(surface_extension(cell, x)) / sigma;
        CHECK(ratio < 0.4);
        CHECK(ratio < prev);
        prev = ratio;
    }
    const auto x = cell.unshear(std::vector<double>{10 / cell.delta, 0});
    CHECK(std::abs(surface_extension(cell, x)) / sigma < 0.1);
}
