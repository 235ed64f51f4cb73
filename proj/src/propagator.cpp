#include "schrlat/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace schrlat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Fractional part of s c - t c^2 / 2 relative to its nearest integer, in [-1/2, 1/2].
double center_phase_offset(double s, double t, double c) {
    const long double cl = c;
    const long double phase = static_cast<long double>(s) * cl - static_cast<long double>(t) * cl * cl / 2;
    return static_cast<double>(phase - std::nearbyint(phase));
}

/// Symmetric-pair factors exp(-pi i t eps_j^2) for one node count.
struct PanelTable {
    const GaussRule* rule = nullptr;
    std::vector<std::complex<double>> chirp;  // one entry per symmetric pair
    std::vector<double> offsets;              // |eps_j| for each pair
};

}  // namespace

std::complex<double> line_integral(const FrequencyProfile& profile, double s, double t, const QuadratureSpec& quad) {
    quad.validate();
    const auto centers = profile.centers();
    const double hw = profile.halfwidth();
    const double width = 2.0 * hw;

    std::vector<PanelTable> tables;
    auto table_for = [&](int m) -> const PanelTable& {
        if (tables.size() <= static_cast<std::size_t>(m)) tables.resize(static_cast<std::size_t>(m) + 1);
        PanelTable& tab = tables[static_cast<std::size_t>(m)];
        if (tab.rule == nullptr) {
            tab.rule = &gauss_legendre(m);
            const int pairs = m / 2;
            tab.chirp.resize(static_cast<std::size_t>(pairs));
            tab.offsets.resize(static_cast<std::size_t>(pairs));
            for (int j = 0; j < pairs; ++j) {
                const double eps = hw * std::abs(tab.rule->nodes[static_cast<std::size_t>(j)]);
                tab.offsets[static_cast<std::size_t>(j)] = eps;
                tab.chirp[static_cast<std::size_t>(j)] = std::polar(1.0, -std::numbers::pi * t * eps * eps);
            }
        }
        return tab;
    };

    std::vector<std::complex<double>> parts(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double c = centers[i];
        const double cycles = std::abs(t) * (std::abs(c) + hw) * width + std::abs(s) * width;
        const int m = quad.nodes_for(cycles);
        const PanelTable& tab = table_for(m);
        const double beta = s - t * c;
        std::complex<double> acc{};
        for (std::size_t j = 0; j < tab.offsets.size(); ++j) {
            acc += tab.rule->weights[j] * 2.0 * std::cos(kTwoPi * beta * tab.offsets[j]) * tab.chirp[j];
        }
        if (m % 2 == 1) acc += tab.rule->weights[static_cast<std::size_t>(m / 2)];
        parts[i] = hw * std::polar(1.0, kTwoPi * center_phase_offset(s, t, c)) * acc;
    }
    return pairwise_sum(std::span<const std::complex<double>>(parts));
}

std::complex<double> solution_at(const FrequencyProfile& profile, int n, std::span<const double> x, double t,
                                 const QuadratureSpec& quad) {
    if (n < 2) throw ValidationError("dimension n must be >= 2");
    if (x.size() != static_cast<std::size_t>(n - 1))
        throw ValidationError("solution_at expects n-1 spatial coordinates");
    std::complex<double> out{1.0, 0.0};
    for (const double xj : x) out *= line_integral(profile, xj, t, quad);
    return out;
}

namespace {

long double digit_sum(const FrequencyProfile& profile, std::span<const std::int64_t> digits) {
    if (digits.size() != static_cast<std::size_t>(profile.level()))
        throw ValidationError("lattice digits must have one entry per level");
    const long double inv_delta = 1.0L / profile.delta().to_long_double();
    long double sum = 0;
    long double scale = 1;
    for (const auto d : digits) {
        if (d < 0) throw ValidationError("lattice digits must be non-negative");
        sum += static_cast<long double>(d) * scale;
        scale *= inv_delta;
    }
    return sum;
}

}  // namespace

double lattice_s(const FrequencyProfile& profile, std::span<const std::int64_t> p) {
    return static_cast<double>(digit_sum(profile, p) / profile.unit());
}

double lattice_t(const FrequencyProfile& profile, std::span<const std::int64_t> q) {
    const long double h = profile.unit();
    return static_cast<double>(2.0L * digit_sum(profile, q) / (h * h));
}

double PhaseCertificate::small_term_total() const {
    double total = 0;
    for (const auto& term : per_term_report)
        if (!term.integer_valued) total += term.bound;
    return total;
}

namespace {

double theta_for(const FrequencyProfile& profile, double s, double t) {
    const auto centers = profile.centers();
    const double hw = profile.halfwidth();
    double theta = 0;
    for (const double c : centers) {
        const double offset = center_phase_offset(s, t, c);
        const double beta = s - t * c;
        auto dev = [&](double eps) { return std::abs(offset + beta * eps - t * eps * eps / 2.0); };
        double worst = std::max(dev(-hw), dev(hw));
        if (t != 0.0) {
            const double crit = beta / t;
            if (std::abs(crit) < hw) worst = std::max(worst, dev(crit));
        }
        theta = std::max(theta, worst);
    }
    return std::min(theta, 0.5);
}

std::string term_label(char kind, std::initializer_list<int> idx, int delta_power) {
    std::ostringstream os;
    os << kind << '[';
    bool first = true;
    for (int i : idx) {
        os << (first ? "" : ",") << i;
        first = false;
    }
    os << "] delta^" << delta_power;
    return os.str();
}

std::vector<PhaseTerm> term_report(const FrequencyProfile& profile, const LatticeDigits& dg) {
    const int k = profile.level();
    const long double delta = profile.delta().to_long_double();
    const long double h = profile.unit();
    const auto L = static_cast<long double>(profile.ell_count());
    const long double eps = std::pow(delta, k);
    auto dpow = [&](int e) { return std::pow(delta, static_cast<long double>(e)); };

    std::vector<PhaseTerm> out;
    auto push = [&](std::string label, long double bound, bool integer) {
        if (bound == 0) return;
        out.push_back(PhaseTerm{std::move(label), static_cast<double>(bound), integer});
    };
    // s xi: p_m l_r delta^(r-m) and eps p_m h^-1 delta^(1-m)
    for (int m = 1; m <= k; ++m) {
        const auto p = static_cast<long double>(dg.p[static_cast<std::size_t>(m - 1)]);
        for (int r = 1; r <= k; ++r) {
            const int e = r - m;
            push(term_label('A', {m, r}, e), p * L * dpow(e), e <= 0);
        }
        push(term_label('B', {m}, 1 - m), eps * p / h * dpow(1 - m), false);
    }
    // t xi^2 / 2: q_m l_r l_r' delta^(r+r'-m-1), 2 eps l_r q_m h^-1 delta^(r-m), eps^2 q_m h^-2 delta^(1-m)
    for (int m = 1; m <= k; ++m) {
        const auto q = static_cast<long double>(dg.q[static_cast<std::size_t>(m - 1)]);
        for (int r = 1; r <= k; ++r) {
            for (int rp = 1; rp <= k; ++rp) {
                const int e = r + rp - m - 1;
                push(term_label('C', {m, r, rp}, e), q * L * L * dpow(e), e <= 0);
            }
            push(term_label('D', {m, r}, r - m), 2 * eps * L * q / h * dpow(r - m), false);
        }
        push(term_label('E', {m}, 1 - m), eps * eps * q / (h * h) * dpow(1 - m), false);
    }
    return out;
}

}  // namespace

std::optional<LatticeDigits> recognize_lattice_pair(const FrequencyProfile& profile, double s, double t) {
    const int k = profile.level();
    const long double h = profile.unit();
    auto to_digits = [&](long double scaled) -> std::optional<std::vector<std::int64_t>> {
        const long double rounded = std::nearbyint(scaled);
        if (rounded < 0 || std::abs(scaled - rounded) > 1e-9L * std::max(1.0L, std::abs(scaled))) return std::nullopt;
        if (rounded > 9.0e18L) return std::nullopt;
        auto value = static_cast<std::int64_t>(rounded);
        std::vector<std::int64_t> digits(static_cast<std::size_t>(k), 0);
        if (k == 1) {
            digits[0] = value;
            return digits;
        }
        const int a = *profile.delta_log2();
        const std::int64_t base_mask = (std::int64_t{1} << a) - 1;
        for (int m = 0; m < k - 1; ++m) {
            digits[static_cast<std::size_t>(m)] = value & base_mask;
            value >>= a;
        }
        digits[static_cast<std::size_t>(k - 1)] = value;
        return digits;
    };
    auto p = to_digits(static_cast<long double>(s) * h);
    auto q = to_digits(static_cast<long double>(t) * h * h / 2.0L);
    if (!p || !q) return std::nullopt;
    return LatticeDigits{std::move(*p), std::move(*q)};
}

PhaseCertificate phase_deviation(const FrequencyProfile& profile, double s, double t) {
    PhaseCertificate cert;
    cert.theta = theta_for(profile, s, t);
    if (auto dg = recognize_lattice_pair(profile, s, t)) {
        cert.per_term_report = term_report(profile, *dg);
        cert.digits = std::move(dg);
    }
    return cert;
}

PhaseCertificate phase_deviation(const FrequencyProfile& profile, const LatticeDigits& digits) {
    PhaseCertificate cert;
    cert.theta = theta_for(profile, lattice_s(profile, digits.p), lattice_t(profile, digits.q));
    cert.per_term_report = term_report(profile, digits);
    cert.digits = digits;
    return cert;
}

LowerBoundCheck lower_bound_check(const FrequencyProfile& profile, int n, std::span<const double> x, double t,
                                  const QuadratureSpec& quad) {
    if (n < 2 || x.size() != static_cast<std::size_t>(n - 1))
        throw ValidationError("lower_bound_check expects n >= 2 and n-1 coordinates");
    LowerBoundCheck out;
    const double mass = support_mass(profile).to_double();
    out.bound = 1.0;
    for (const double xj : x) {
        const double theta = phase_deviation(profile, xj, t).theta;
        out.thetas.push_back(theta);
        if (theta >= 0.25) {
            std::ostringstream msg;
            msg << "phase certificate inapplicable: theta = " << theta << " >= 1/4 at s = " << xj << ", t = " << t;
            throw CertificateInapplicable(msg.str());
        }
        out.bound *= std::cos(kTwoPi * theta) * mass;
    }
    out.measured = std::abs(solution_at(profile, n, x, t, quad));
    out.holds = out.measured >= out.bound - quad.abs_tol * (n - 1);
    return out;
}

}  // namespace schrlat
