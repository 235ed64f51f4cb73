#include "schrlat/measures.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include "schrlat/exact.hpp"
#include "schrlat/parallel.hpp"
#include "schrlat/propagator.hpp"

namespace schrlat {

void SearchSpec::validate() const {
    if (!(radius_ratio > 1.0) || !(radius_ratio <= 4.0)) throw ValidationError("radius ratio must lie in (1, 4]");
}

NormQuery NormQuery::ball_mass(double eta, SearchSpec search) {
    NormQuery q;
    q.kind = Kind::ball_mass;
    q.eta = eta;
    q.search = search;
    return q;
}

NormQuery NormQuery::morrey(double alpha, double p, SearchSpec search) {
    NormQuery q;
    q.kind = Kind::morrey;
    q.alpha = alpha;
    q.p = p;
    q.search = search;
    return q;
}

double NormQuery::effective_eta(int n) const { return kind == Kind::ball_mass ? eta : n - alpha * p; }

double NormQuery::finish(double ball_value) const {
    return kind == Kind::ball_mass ? ball_value : std::pow(ball_value, 1.0 / p);
}

void NormQuery::validate(int n) const {
    search.validate();
    if (kind == Kind::ball_mass) {
        if (!(eta >= 0 && eta <= n)) throw ValidationError("eta must lie in [0, n]");
        return;
    }
    if (!(p > 0)) throw ValidationError("Morrey exponent p must be positive");
    if (!(alpha >= 0)) throw ValidationError("Morrey exponent alpha must be non-negative");
    if (alpha * p > n) {
        std::ostringstream msg;
        msg << "alpha p = " << alpha * p << " exceeds n = " << n << ": the norm of a bounded set is infinite";
        throw ValidationError(msg.str());
    }
}

namespace {

double overlap(double c1, double h1, double c2, double h2) {
    const double lo = std::max(c1 - h1, c2 - h2);
    const double hi = std::min(c1 + h1, c2 + h2);
    return hi > lo ? hi - lo : 0.0;
}

/// Length of the axis union inside [c - r, c + r].
double axis_mass(const AxisUnion& ax, double c, double r) {
    const auto& cs = ax.centers;
    const double hw = ax.halfwidth;
    const auto first = std::upper_bound(cs.begin(), cs.end(), c - r - hw);
    const auto last = std::lower_bound(first, cs.end(), c + r + hw);
    if (first == last) return 0.0;
    const auto count = last - first;
    if (count == 1) return overlap(*first, hw, c, r);
    return overlap(*first, hw, c, r) + overlap(*(last - 1), hw, c, r) + static_cast<double>(count - 2) * 2 * hw;
}

double box_overlap(const Box& b, std::span<const double> center, double r) {
    double v = 1;
    for (std::size_t d = 0; d < center.size() && v > 0; ++d) v *= overlap(b.center[d], b.halfwidths[d], center[d], r);
    return v;
}

/// r_min * ratio^j, bit-exact whenever ratio^j is a power of two.
double grid_radius(double r_min, double ratio, int j) {
    const double e = j * std::log2(ratio);
    const double rounded = std::nearbyint(e);
    if (std::abs(e - rounded) < 1e-9) return std::ldexp(r_min, static_cast<int>(rounded));
    return r_min * std::pow(ratio, j);
}

struct Candidate {
    double value = -1;
    std::vector<double> center;
    double r = 0;
};

/// Best candidate center at radius r, value = mass / r^eta.
Candidate best_at(const BoxUnionWeight& w, const std::vector<std::vector<double>>& centers, double eta, double r) {
    Candidate out;
    out.r = r;
    if (w.is_product()) {
        double mass = 1;
        out.center.resize(w.axes().size());
        for (std::size_t d = 0; d < w.axes().size(); ++d) {
            double best = -1;
            for (const double c : centers[d]) {
                const double m = axis_mass(w.axes()[d], c, r);
                if (m > best) {
                    best = m;
                    out.center[d] = c;
                }
            }
            mass *= best;
        }
        out.value = mass / std::pow(r, eta);
        return out;
    }
    for (const auto& c : centers) {
        const double v = box_mass(w, c, r) / std::pow(r, eta);
        if (v > out.value) {
            out.value = v;
            out.center = c;
        }
    }
    return out;
}

/// Per-axis candidate lists (product form) or full candidate points.
std::vector<std::vector<double>> candidate_centers(const BoxUnionWeight& w) {
    std::vector<std::vector<double>> out;
    if (w.is_product()) {
        for (const auto& ax : w.axes()) {
            std::vector<double> cs = ax.centers;
            double mean = 0;
            for (const double c : ax.centers) mean += c;
            cs.push_back(mean / static_cast<double>(ax.centers.size()));
            out.push_back(std::move(cs));
        }
        return out;
    }
    const auto n = static_cast<std::size_t>(w.dimension());
    std::vector<double> centroid(n, 0.0);
    double volume = 0;
    for (const auto& b : w.explicit_boxes()) {
        double bv = 1;
        for (const double hw : b.halfwidths) bv *= 2 * hw;
        for (std::size_t d = 0; d < n; ++d) centroid[d] += bv * b.center[d];
        volume += bv;
        out.push_back(b.center);
    }
    if (volume > 0) {
        for (double& c : centroid) c /= volume;
        out.push_back(std::move(centroid));
    }
    return out;
}

double bbox_side(const BoxUnionWeight& w) {
    const auto lo = w.bbox_lo();
    const auto hi = w.bbox_hi();
    double side = 0;
    for (std::size_t d = 0; d < lo.size(); ++d) side = std::max(side, hi[d] - lo[d]);
    return side;
}

}  // namespace

double box_mass(const BoxUnionWeight& w, std::span<const double> center, double r) {
    if (!(r > 0)) throw ValidationError("cube radius must be positive");
    if (center.size() != static_cast<std::size_t>(w.dimension()))
        throw ValidationError("center dimension does not match weight dimension");
    if (w.is_product()) {
        double v = 1;
        for (std::size_t d = 0; d < center.size() && v > 0; ++d) v *= axis_mass(w.axes()[d], center[d], r);
        return v;
    }
    double total = 0;
    for (const auto& b : w.explicit_boxes()) total += box_overlap(b, center, r);
    return total;
}

SupResult sup_ball_mass(const BoxUnionWeight& w, double eta, const SearchSpec& search) {
    NormQuery::ball_mass(eta, search).validate(w.dimension());
    const auto centers = candidate_centers(w);
    SupResult out;
    if (w.box_count() == 0) return out;

    const double r_min = w.min_halfwidth() / 2;
    const double r_max = bbox_side(w);
    std::vector<double> radii;
    for (int j = 0;; ++j) {
        const double r = grid_radius(r_min, search.radius_ratio, j);
        radii.push_back(r);
        if (r >= r_max) break;
    }
    std::vector<Candidate> grid(radii.size());
    parallel_for(radii.size(), [&](std::size_t j) { grid[j] = best_at(w, centers, eta, radii[j]); });

    // Ties go to the larger radius.
    auto better = [](const Candidate& a, const Candidate& b) {
        return a.value > b.value || (a.value == b.value && a.r > b.r);
    };
    Candidate best = grid.front();
    for (const auto& c : grid)
        if (better(c, best)) best = c;

    if (search.refine) {
        std::vector<std::size_t> order(grid.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return better(grid[a], grid[b]); });
        const int span = static_cast<int>(std::ceil(32 * std::log2(search.radius_ratio)));
        std::vector<double> fine;
        for (std::size_t k = 0; k < std::min<std::size_t>(3, order.size()); ++k)
            for (int i = -span; i <= span; ++i)
                if (i != 0) fine.push_back(radii[order[k]] * std::exp2(i / 32.0));
        std::vector<Candidate> refined(fine.size());
        parallel_for(fine.size(), [&](std::size_t j) { refined[j] = best_at(w, centers, eta, fine[j]); });
        for (const auto& c : refined)
            if (better(c, best)) best = c;
    }
    out.value = best.value;
    out.center = std::move(best.center);
    out.r = best.r;
    return out;
}

SupResult mc_norm(const BoxUnionWeight& w, double alpha, double p, const SearchSpec& search) {
    const NormQuery q = NormQuery::morrey(alpha, p, search);
    q.validate(w.dimension());
    SupResult out = sup_ball_mass(w, q.effective_eta(w.dimension()), search);
    out.value = q.finish(out.value);
    return out;
}

SupResult evaluate(const BoxUnionWeight& w, const NormQuery& query) {
    if (query.kind == NormQuery::Kind::ball_mass) return sup_ball_mass(w, query.eta, query.search);
    return mc_norm(w, query.alpha, query.p, query.search);
}

double brute_force_sup(const BoxUnionWeight& w, const NormQuery& query, double grid_step) {
    const int n = w.dimension();
    query.validate(n);
    if (!(grid_step > 0)) throw ValidationError("grid step must be positive");
    const auto lo = w.bbox_lo();
    const auto hi = w.bbox_hi();

    std::vector<std::vector<double>> axis_points(static_cast<std::size_t>(n));
    double center_count = 1;
    for (std::size_t d = 0; d < axis_points.size(); ++d) {
        const double mid = (lo[d] + hi[d]) / 2;
        const auto below = static_cast<long>(std::floor((mid - lo[d]) / grid_step));
        const auto above = static_cast<long>(std::floor((hi[d] - mid) / grid_step));
        for (long k = -below; k <= above; ++k) axis_points[d].push_back(mid + static_cast<double>(k) * grid_step);
        center_count *= static_cast<double>(axis_points[d].size());
    }
    const double r_min = w.min_halfwidth() / 2;
    const double r_max = bbox_side(w);
    std::vector<double> radii;
    for (int j = 0;; ++j) {
        const double r = std::ldexp(r_min, j / 8) * std::exp2((j % 8) / 8.0);
        radii.push_back(r);
        if (r >= r_max) break;
    }
    if (center_count * static_cast<double>(radii.size()) > 1e7)
        throw ValidationError("brute-force oracle instance exceeds 1e7 evaluations");

    const auto boxes = w.boxes();
    const double eta = query.effective_eta(n);
    const auto total = static_cast<std::size_t>(center_count);
    std::vector<double> best(radii.size(), 0.0);
    parallel_for(radii.size(), [&](std::size_t j) {
        std::vector<double> c(static_cast<std::size_t>(n));
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        double top = 0;
        for (std::size_t i = 0; i < total; ++i) {
            for (std::size_t d = 0; d < idx.size(); ++d) c[d] = axis_points[d][idx[d]];
            double mass = 0;
            for (const auto& b : boxes) mass += box_overlap(b, c, radii[j]);
            top = std::max(top, mass);
            for (std::size_t d = idx.size(); d-- > 0;) {
                if (++idx[d] < axis_points[d].size()) break;
                idx[d] = 0;
            }
        }
        best[j] = top / std::pow(radii[j], eta);
    });
    return query.finish(*std::max_element(best.begin(), best.end()));
}

namespace {

void require_lattice_match(const FrequencyProfile& profile, const LatticeSet& lattice) {
    if (!(profile.delta() == lattice.delta()) || !(profile.sigma() == lattice.sigma()) ||
        profile.level() != lattice.level())
        throw ValidationError("profile and lattice must share delta, sigma and level");
    if (!(lattice.dilation() == Rational(1))) throw ValidationError("lattice must be undilated");
}

/// Per x-center integrals of |I(y, t)|^2 over [x_i - rho, x_i + rho], summed.
/// `mod2` holds |I|^2 at (x_i + rho node_g, t) row-major in (i, g).
double x_section_sum(std::span<const double> mod2, const GaussRule& rule, double rho) {
    const std::size_t m = rule.nodes.size();
    std::vector<double> per(mod2.size() / m);
    for (std::size_t i = 0; i < per.size(); ++i) {
        double acc = 0;
        for (std::size_t g = 0; g < m; ++g) acc += rule.weights[g] * mod2[i * m + g];
        per[i] = rho * acc;
    }
    return pairwise_sum(std::span<const double>(per));
}

std::vector<double> shifted_nodes(std::span<const double> centers, const GaussRule& rule, double rho) {
    std::vector<double> out;
    out.reserve(centers.size() * rule.nodes.size());
    for (const double c : centers)
        for (const double g : rule.nodes) out.push_back(c + rho * g);
    return out;
}

}  // namespace

double omega_l2_mass(const FrequencyProfile& profile, const LatticeSet& lattice, double rho,
                     const QuadratureSpec& quad, int nodes) {
    require_lattice_match(profile, lattice);
    quad.validate();
    if (!(2 * rho < lattice.min_spacing())) throw ValidationError("thickening radius makes cubes overlap");
    if (nodes < 1) throw ValidationError("need at least one node per cube axis");
    const GaussRule& rule = gauss_legendre(nodes);
    const auto ys = shifted_nodes(lattice.x_values(), rule, rho);
    const auto taus = shifted_nodes(lattice.t_values(), rule, rho);

    std::vector<double> mod2(ys.size() * taus.size());
    parallel_for(mod2.size(), [&](std::size_t k) {
        mod2[k] = std::norm(line_integral(profile, ys[k % ys.size()], taus[k / ys.size()], quad));
    });
    const int n = lattice.dimension();
    std::vector<double> per_time(taus.size());
    for (std::size_t j = 0; j < taus.size(); ++j) {
        const double f = x_section_sum(std::span<const double>(mod2).subspan(j * ys.size(), ys.size()), rule, rho);
        per_time[j] = rho * rule.weights[j % rule.nodes.size()] * std::pow(f, n - 1);
    }
    return pairwise_sum(std::span<const double>(per_time));
}

SectionMass section_mass(const FrequencyProfile& profile, const LatticeSet& lattice, double t, double rho,
                         const QuadratureSpec& quad, int nodes) {
    require_lattice_match(profile, lattice);
    quad.validate();
    const auto ts = lattice.t_values();
    if (std::find(ts.begin(), ts.end(), t) == ts.end()) throw ValidationError("section time is not a lattice time");
    if (!(2 * rho < lattice.min_spacing())) throw ValidationError("thickening radius makes cubes overlap");
    if (nodes < 1) throw ValidationError("need at least one node per cube axis");
    const GaussRule& rule = gauss_legendre(nodes);
    const auto xs = lattice.x_values();
    const auto ys = shifted_nodes(xs, rule, rho);

    std::vector<double> mod2(ys.size());
    parallel_for(ys.size(), [&](std::size_t k) { mod2[k] = std::norm(line_integral(profile, ys[k], t, quad)); });
    std::vector<double> theta(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { theta[i] = phase_deviation(profile, xs[i], t).theta; });

    const int n = lattice.dimension();
    const double f = x_section_sum(mod2, rule, rho);
    const double mass = support_mass(profile).to_double();
    const double theta_max = *std::max_element(theta.begin(), theta.end());

    SectionMass out;
    out.cubes = static_cast<std::size_t>(std::pow(static_cast<double>(xs.size()), n - 1));
    out.mass = std::pow(f, n - 1);
    out.raw_ratio = out.mass / std::pow(mass, n - 1);
    const double amplitude = std::pow(std::cos(2 * std::numbers::pi * theta_max) * mass, n - 1);
    out.benchmark_ratio =
        out.mass / (static_cast<double>(out.cubes) * std::pow(2 * rho, n - 1) * amplitude * amplitude);
    return out;
}

}  // namespace schrlat
