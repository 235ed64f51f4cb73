#include "schrlat/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "schrlat/exact.hpp"

namespace schrlat {

void QuadratureSpec::validate() const {
    if (nodes_min < 2) throw ValidationError("quadrature nodes_min must be >= 2");
    if (!(nodes_per_cycle >= 2.0)) throw ValidationError("quadrature nodes_per_cycle must be >= 2");
    if (!(abs_tol > 0.0)) throw ValidationError("quadrature abs_tol must be positive");
}

int QuadratureSpec::nodes_for(double cycles) const {
    const double wanted = std::ceil(nodes_per_cycle * std::abs(cycles));
    if (!(wanted < 1e6)) throw ValidationError("quadrature panel needs more than 1e6 nodes");
    return std::max(nodes_min, static_cast<int>(wanted));
}

namespace {

GaussRule compute_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const long double pi = std::numbers::pi_v<long double>;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
        long double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            long double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        {
            long double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
        }
        const long double w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(-x);
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(x);
        rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(w);
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(w);
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw ValidationError("Gauss-Legendre rule needs n >= 1");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussRule>(compute_rule(n));
    return *slot;
}

namespace {

template <typename T>
T pairwise(std::span<const T> v) {
    if (v.size() <= 8) {
        T s{};
        for (const auto& x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise(v.first(half)) + pairwise(v.subspan(half));
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise(values); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> values) { return pairwise(values); }

}  // namespace schrlat
