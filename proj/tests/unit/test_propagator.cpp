#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "schrlat/propagator.hpp"

using namespace schrlat;

namespace {

const double kDelta12 = std::ldexp(1.0, -12);

}  // namespace

TEST_CASE("line integral at the origin is the support mass") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const auto v = line_integral(g, 0, 0);
    CHECK(v.real() == doctest::Approx(std::ldexp(1.0, -8)).epsilon(1e-14));
    CHECK(std::abs(v.imag()) < 1e-18);
}

TEST_CASE("sinc closed form at s = 8") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const double expected = std::sin(16 * std::numbers::pi * kDelta12) / std::numbers::pi;
    CHECK(std::abs(line_integral(g, 8, 0)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.0039060).epsilon(1e-4));
}

TEST_CASE("line integral agrees with a Simpson oracle") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const double pts[][2] = {{8, 128}, {96, 0}, {3.7, 55.5}, {-40.25, 190}, {200, -150}, {1000, 3000}};
    for (const auto& st : pts) {
        const auto got = line_integral(g, st[0], st[1]);
        const auto ref = oracle::line_integral(g.centers(), g.halfwidth(), st[0], st[1]);
        CHECK(std::abs(got - std::complex<double>(ref)) < 1e-12);
    }
    const auto g2 = build_profile(10, Rational(1, 4), 2);
    const auto got = line_integral(g2, 123.4, 567.8);
    const auto ref = oracle::line_integral(g2.centers(), g2.halfwidth(), 123.4, 567.8, 200);
    CHECK(std::abs(got - std::complex<double>(ref)) < 1e-12);
}

TEST_CASE("node doubling changes the integral by at most abs_tol") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const double bound = 2.0 / 40 / kDelta12;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-bound, bound);
    QuadratureSpec fine;
    fine.nodes_per_cycle *= 2;
    fine.nodes_min *= 2;
    for (int i = 0; i < 200; ++i) {
        const double s = u(rng), t = u(rng);
        CHECK(std::abs(line_integral(g, s, t) - line_integral(g, s, t, fine)) <= QuadratureSpec{}.abs_tol);
    }
}

TEST_CASE("conjugation symmetry and trivial upper bound") {
    const auto g = build_profile(12, Rational(1, 4), 2);
    const double mass = support_mass(g).to_double();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-500, 500);
    for (int i = 0; i < 50; ++i) {
        const double s = u(rng), t = u(rng);
        const auto a = line_integral(g, s, t);
        const auto b = line_integral(g, -s, -t);
        CHECK(std::abs(a - std::conj(b)) < 1e-15);
        CHECK(std::abs(a) <= mass + 1e-12);
    }
}

TEST_CASE("solution is the product of line integrals") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const double mass = support_mass(g).to_double();
    const std::vector<double> zero{0, 0};
    CHECK(std::abs(solution_at(g, 3, zero, 0) - mass * mass) < 1e-18);
    const std::vector<double> eight{8};
    CHECK(solution_at(g, 2, eight, 0) == line_integral(g, 8, 0));
    const std::vector<double> x{8, 16};
    const double lower = 1.5 * std::pow(kDelta12, 0.75);
    CHECK(std::abs(solution_at(g, 3, x, 128)) >= lower * lower);
    CHECK_THROWS_AS(solution_at(g, 3, eight, 0), ValidationError);
}

TEST_CASE("phase deviation examples") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    CHECK(phase_deviation(g, 0, 0).theta == 0);
    CHECK(phase_deviation(g, 8, 0).theta == doctest::Approx(std::ldexp(1.0, -9)).epsilon(1e-12));
    CHECK(phase_deviation(g, 96, 0).theta == doctest::Approx(96 * kDelta12).epsilon(1e-12));
    CHECK(phase_deviation(g, 4, 0).theta == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("lattice pairs are recognized and reported") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const auto cert = phase_deviation(g, 8, 128);
    REQUIRE(cert.digits.has_value());
    CHECK(cert.digits->p == std::vector<std::int64_t>{1});
    CHECK(cert.digits->q == std::vector<std::int64_t>{1});
    CHECK_FALSE(cert.per_term_report.empty());
    CHECK_FALSE(phase_deviation(g, 8.5, 128).digits.has_value());

    const auto g2 = build_profile(12, Rational(1, 4), 2);
    const LatticeDigits dg{{3, 5}, {1, 1}};
    const double s = lattice_s(g2, dg.p), t = lattice_t(g2, dg.q);
    const auto rec = recognize_lattice_pair(g2, s, t);
    REQUIRE(rec.has_value());
    CHECK(rec->p == dg.p);
    CHECK(rec->q == dg.q);
}

TEST_CASE("theta never exceeds the small-term total") {
    for (int k = 1; k <= 2; ++k) {
        const auto g = build_profile(12, Rational(1, 4), k);
        const std::int64_t pmax = 12, qmax = 1;
        std::mt19937_64 rng(11 + k);
        std::uniform_int_distribution<std::int64_t> pd(0, pmax), qd(0, qmax);
        for (int i = 0; i < 40; ++i) {
            LatticeDigits dg;
            for (int m = 0; m < k; ++m) {
                dg.p.push_back(pd(rng));
                dg.q.push_back(qd(rng));
            }
            const auto cert = phase_deviation(g, dg);
            CHECK(cert.theta <= cert.small_term_total() + 1e-12);
            CHECK(cert.theta <= 0.5);
        }
    }
}

TEST_CASE("lower bound certificate") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    const double mass = support_mass(g).to_double();
    const std::vector<double> origin{0};
    const auto at0 = lower_bound_check(g, 2, origin, 0);
    CHECK(at0.holds);
    CHECK(at0.bound == doctest::Approx(mass));
    CHECK(at0.measured == doctest::Approx(mass).epsilon(1e-13));

    const std::vector<double> x{8};
    const auto lat = lower_bound_check(g, 2, x, 128);
    CHECK(lat.holds);
    CHECK(lat.bound >= std::cos(2 * std::numbers::pi * 0.1) * mass);
    CHECK(lat.bound / std::pow(kDelta12, 0.75) >= 1.618);

    const std::vector<double> off{4};
    CHECK_THROWS_AS(lower_bound_check(g, 2, off, 0), CertificateInapplicable);
    CHECK(std::abs(line_integral(g, 4, 0)) < 1e-3 * mass);
}

TEST_CASE("certificate soundness near the lattice") {
    const auto g = build_profile(12, Rational(1, 4), 1);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pd(0, 12), qd(0, 1);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    for (int i = 0; i < 60; ++i) {
        const std::vector<double> x{8.0 * pd(rng) + jitter(rng), 8.0 * pd(rng) + jitter(rng)};
        const double t = 128.0 * qd(rng) + jitter(rng);
        try {
            const auto res = lower_bound_check(g, 3, x, t);
            CHECK(res.holds);
        } catch (const CertificateInapplicable&) {
        }
    }
}
