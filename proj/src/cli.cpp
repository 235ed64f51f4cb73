#include "schrlat/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "schrlat/experiments.hpp"
#include "schrlat/extension.hpp"
#include "schrlat/io.hpp"
#include "schrlat/lattice.hpp"
#include "schrlat/measures.hpp"
#include "schrlat/parallel.hpp"
#include "schrlat/profile.hpp"
#include "schrlat/propagator.hpp"

namespace schrlat {

namespace {

struct Globals {
    std::string format;
    std::string output = "-";
    int threads = 0;
    QuadratureSpec quad;
};

struct Command {
    std::string format = "csv";  // default when --format is not given
    std::function<Report()> run;
    std::function<std::optional<std::string>(const Report&)> gate;
};

struct ProfileOpts {
    int delta_log2 = 12;
    std::string sigma = "1/4";
    int level = 1;
};

struct LatticeOpts : ProfileOpts {
    int n = 2;
    std::string c = "1/40";
};

void add_profile_opts(CLI::App* app, ProfileOpts& o) {
    app->add_option("--delta-log2", o.delta_log2, "delta = 2^-a")->check(CLI::Range(1, 62));
    app->add_option("--sigma", o.sigma, "sigma as p/q, 0 < sigma < 1/2");
    app->add_option("--level", o.level, "self-similar level k")->check(CLI::Range(1, 8));
}

void add_lattice_opts(CLI::App* app, LatticeOpts& o) {
    add_profile_opts(app, o);
    app->add_option("--n", o.n, "space-time dimension n")->check(CLI::Range(2, 12));
    app->add_option("--c", o.c, "lattice constant c as p/q");
}

FrequencyProfile make_profile(const ProfileOpts& o) {
    return build_profile(o.delta_log2, Rational::parse(o.sigma), o.level);
}

LatticeSet make_lattice(const LatticeOpts& o, int delta_log2) {
    return build_lattice(Dyadic::pow2(-delta_log2), Rational::parse(o.sigma), o.level, o.n, Rational::parse(o.c));
}

std::vector<int> require_list(const std::vector<int>& v, const char* flag) {
    if (v.empty()) throw ValidationError(std::string(flag) + " needs at least one value");
    return v;
}

std::string join(const std::vector<std::int64_t>& v, char sep = ' ') {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
    return s;
}

std::string fmt(double v) { return format_double(v); }

// profile ------------------------------------------------------------------

Command profile_command(const ProfileOpts& o, const std::string& save) {
    return {"csv", [&o, &save] {
                const auto p = make_profile(o);
                if (!save.empty()) write_atomic(save, to_json(p).dump(2) + "\n");
                Report r;
                r.kind = "profile";
                r.table.columns = {"index", "digits", "center_coef", "center", "halfwidth"};
                for (std::size_t i = 0; i < p.size(); ++i)
                    r.table.add_row({static_cast<std::int64_t>(i), join(p.digits(i)),
                                     p.intervals()[i].center_coef.str(), p.centers()[i],
                                     p.intervals()[i].halfwidth.str()});
                r.summary = {{"delta", p.delta().str()},   {"sigma", p.sigma().str()},
                             {"level", p.level()},         {"ell_count", p.ell_count()},
                             {"intervals", p.size()},      {"unit", static_cast<double>(p.unit())},
                             {"on_grid", p.on_grid()},     {"support_mass", support_mass(p).str()}};
                return r;
            },
            nullptr};
}

// solve --------------------------------------------------------------------

struct SolveOpts : ProfileOpts {
    int n = 2;
    std::vector<double> x;
    double t = 0;
};

Command solve_command(const SolveOpts& o, const Globals& g) {
    return {"csv", [&o, &g] {
                const auto p = make_profile(o);
                if (static_cast<int>(o.x.size()) != o.n - 1)
                    throw ValidationError("--x needs n-1 = " + std::to_string(o.n - 1) + " values");
                const auto u = solution_at(p, o.n, o.x, o.t, g.quad);
                const double mass = std::pow(support_mass(p).to_double(), o.n - 1);
                Report r;
                r.kind = "solve";
                r.table.columns = {"x", "t", "re", "im", "modulus", "mass", "max_theta", "lower_bound"};
                double theta = 0;
                for (const double xj : o.x) theta = std::max(theta, phase_deviation(p, xj, o.t).theta);
                Cell lower = std::string();
                try {
                    lower = lower_bound_check(p, o.n, o.x, o.t, g.quad).bound;
                } catch (const CertificateInapplicable&) {
                }
                std::string xs;
                for (std::size_t i = 0; i < o.x.size(); ++i) xs += (i ? " " : "") + fmt(o.x[i]);
                r.table.add_row({xs, o.t, u.real(), u.imag(), std::abs(u), mass, theta, lower});
                return r;
            },
            nullptr};
}

// lattice ------------------------------------------------------------------

struct LatticeCmdOpts : LatticeOpts {
    std::string dilation = "1";
    std::size_t limit = 1'000'000;
    std::string save;
};

Command lattice_command(const LatticeCmdOpts& o) {
    return {"csv", [&o] {
                auto L = make_lattice(o, o.delta_log2);
                const Rational d = Rational::parse(o.dilation);
                if (d != Rational(1)) L = scale(L, d);
                if (!o.save.empty()) write_atomic(o.save, to_json(L).dump(2) + "\n");
                if (L.size() > o.limit)
                    throw ValidationError("lattice has " + std::to_string(L.size()) + " points, above --limit");
                Report r;
                r.kind = "lattice";
                for (int j = 1; j < o.n; ++j) r.table.columns.push_back("x_" + std::to_string(j));
                r.table.columns.push_back("t");
                for (int j = 1; j < o.n; ++j) r.table.columns.push_back("x_" + std::to_string(j) + "_coef");
                r.table.columns.push_back("t_coef");
                for (std::uint64_t i = 0; i < L.size(); ++i) {
                    const auto idx = L.axis_indices(i);
                    std::vector<Cell> row;
                    for (int j = 0; j + 1 < o.n; ++j) row.emplace_back(L.x_values()[idx[j]]);
                    row.emplace_back(L.t_values()[idx.back()]);
                    for (int j = 0; j + 1 < o.n; ++j) row.emplace_back(L.x_coefs()[idx[j]]);
                    row.emplace_back(L.t_coefs()[idx.back()]);
                    r.table.add_row(std::move(row));
                }
                r.summary = to_json(L);
                r.summary["size"] = L.size();
                r.summary["min_spacing"] = L.min_spacing();
                return r;
            },
            nullptr};
}

// verify -------------------------------------------------------------------

struct ConcentrationOpts : LatticeOpts {
    std::vector<int> delta_list{12, 16, 20};
    double tol = -1;        // default 0.05 k
    double min_ratio = -1;  // default 1.5 for k = 1, 1.0 otherwise
    double max_ratio = 0;   // 0: no upper bound
};

Command concentration_command(const ConcentrationOpts& o, const Globals& g) {
    return {"csv",
            [&o, &g] {
                const Rational sigma = Rational::parse(o.sigma);
                const double expected = o.level * (o.n - 1) * (1 - sigma.to_double());
                Report r;
                r.kind = "verify-concentration";
                r.table.columns = {"delta_log2", "size", "min_modulus", "ratio", "max_theta", "argmin_index"};
                std::vector<double> xs, ys;
                double lo = INFINITY, hi = 0;
                for (const int a : require_list(o.delta_list, "--delta-log2")) {
                    const auto P = build_profile(a, sigma, o.level);
                    const auto L = make_lattice(o, a);
                    const auto m = min_modulus(P, L, g.quad);
                    const double ratio = m.value / std::pow(2.0, -a * expected);
                    lo = std::min(lo, ratio);
                    hi = std::max(hi, ratio);
                    xs.push_back(-a * std::log(2.0));
                    ys.push_back(std::log(m.value));
                    r.table.add_row({std::int64_t{a}, static_cast<std::int64_t>(L.size()), m.value, ratio,
                                     max_theta(P, L), static_cast<std::int64_t>(m.index)});
                }
                const double tol = o.tol >= 0 ? o.tol : 0.05 * o.level;
                const double min_ratio = o.min_ratio >= 0 ? o.min_ratio : (o.level == 1 ? 1.5 : 1.0);
                r.summary["expected_slope"] = expected;
                r.summary["slope_tolerance"] = tol;
                r.summary["min_ratio_bound"] = min_ratio;
                r.summary["min_ratio"] = lo;
                r.summary["max_ratio"] = hi;
                if (xs.size() >= 3) {
                    const auto fit = fit_exponent(xs, ys);
                    r.summary["slope"] = fit.slope;
                    r.summary["max_residual"] = fit.max_residual;
                }
                return r;
            },
            [&o](const Report& r) -> std::optional<std::string> {
                const auto& s = r.summary;
                if (s.contains("slope") &&
                    std::abs(s["slope"].get<double>() - s["expected_slope"].get<double>()) >
                        s["slope_tolerance"].get<double>())
                    return "slope " + fmt(s["slope"].get<double>()) + " outside expected " +
                           fmt(s["expected_slope"].get<double>()) + " +- " + fmt(s["slope_tolerance"].get<double>());
                if (s["min_ratio"].get<double>() < s["min_ratio_bound"].get<double>())
                    return "ratio " + fmt(s["min_ratio"].get<double>()) + " below " +
                           fmt(s["min_ratio_bound"].get<double>());
                if (o.max_ratio > 0 && s["max_ratio"].get<double>() > o.max_ratio)
                    return "ratio " + fmt(s["max_ratio"].get<double>()) + " above " + fmt(o.max_ratio);
                return std::nullopt;
            }};
}

struct SelfSimOpts : LatticeOpts {
    std::vector<int> levels{2, 3};
};

Command selfsim_command(const SelfSimOpts& o) {
    return {"csv",
            [&o] {
                const Rational sigma = Rational::parse(o.sigma);
                Report r;
                r.kind = "verify-self-similarity";
                r.table.columns = {"level", "profile_identity", "lattice_identity", "lattice_points", "detail"};
                bool all = true;
                for (const int k : require_list(o.levels, "--levels")) {
                    if (k < 2) throw ValidationError("self-similarity needs levels >= 2");
                    std::string detail;
                    bool profile_ok = true;
                    try {
                        self_similar_decomposition(build_profile(o.delta_log2, sigma, k));
                    } catch (const std::logic_error& e) {
                        if (dynamic_cast<const ValidationError*>(&e)) throw;
                        profile_ok = false;
                        detail = e.what();
                    }
                    const auto L = build_lattice(Dyadic::pow2(-o.delta_log2), sigma, k, o.n, Rational::parse(o.c));
                    const auto res = lattice_self_similarity(L);
                    if (!res.holds) detail += (detail.empty() ? "" : "; ") + res.detail;
                    all = all && profile_ok && res.holds;
                    r.table.add_row({std::int64_t{k}, profile_ok ? "pass" : "fail", res.holds ? "pass" : "fail",
                                     static_cast<std::int64_t>(L.size()), detail});
                }
                r.summary["all_hold"] = all;
                return r;
            },
            [](const Report& r) -> std::optional<std::string> {
                if (r.summary["all_hold"].get<bool>()) return std::nullopt;
                return std::string("a self-similarity identity failed");
            }};
}

// norm ---------------------------------------------------------------------

struct NormOpts : LatticeOpts {
    std::string weight_path;
    double rho = 0.02;
    int scale_log2 = 0;
    std::optional<double> eta, alpha, p;
    double radius_ratio = std::sqrt(2.0);
    bool no_refine = false;
    double grid_step = 0;
};

Command norm_command(const NormOpts& o) {
    return {"csv", [&o] {
                BoxUnionWeight w;
                if (!o.weight_path.empty()) {
                    std::ifstream in(o.weight_path);
                    if (!in) throw ValidationError("cannot read " + o.weight_path);
                    Json j;
                    try {
                        j = Json::parse(in);
                    } catch (const Json::exception& e) {
                        throw ValidationError(std::string("invalid JSON in weight file: ") + e.what());
                    }
                    w = weight_from_json(j);
                } else {
                    const auto L = make_lattice(o, o.delta_log2);
                    w = o.scale_log2 == 0
                            ? thicken(L, o.rho)
                            : thicken(scale(L, Rational(1, std::int64_t{1} << o.scale_log2)),
                                      std::ldexp(o.rho, -o.scale_log2));
                }
                SearchSpec search{o.radius_ratio, !o.no_refine};
                NormQuery q;
                if (o.eta && !o.alpha && !o.p) q = NormQuery::ball_mass(*o.eta, search);
                else if (!o.eta && o.alpha && o.p) q = NormQuery::morrey(*o.alpha, *o.p, search);
                else throw ValidationError("give either --eta or both --alpha and --p");
                const auto res = evaluate(w, q);
                const int n = w.dimension();
                const bool ball = q.kind == NormQuery::Kind::ball_mass;
                Report r;
                r.kind = "norm";
                r.table.columns = {"kind", "n", "eta_or_alpha", "p", "delta_log2", "value", "arg_r"};
                for (int i = 1; i <= n; ++i) r.table.columns.push_back("arg_center_" + std::to_string(i));
                r.table.columns.push_back("brute_force");
                std::vector<Cell> row{ball ? "ball_mass" : "morrey", std::int64_t{n}, ball ? q.eta : q.alpha,
                                      ball ? Cell(std::string()) : Cell(q.p),
                                      o.weight_path.empty() ? Cell(std::int64_t{o.delta_log2}) : Cell(std::string()),
                                      res.value, res.r};
                for (const double c : res.center) row.emplace_back(c);
                row.push_back(o.grid_step > 0 ? Cell(brute_force_sup(w, q, o.grid_step)) : Cell(std::string()));
                r.table.add_row(std::move(row));
                r.summary["boxes"] = w.box_count();
                r.summary["volume"] = w.volume();
                return r;
            },
            nullptr};
}

// experiment ---------------------------------------------------------------

struct ExperimentOpts {
    int n = 0;
    std::string eta;
    double eta_real = 0;
    std::vector<int> scales;
    std::string c;
    double rho = -1;
    std::string sigma;
    double alpha = 0, p = 0, c0 = 0;
    int sweep_den = 32;
    double tol = -1;
    double max_residual = 0.1;
};

std::optional<std::string> residual_gate(const Json& s, std::initializer_list<const char*> names, double limit) {
    for (const char* name : names) {
        const double res = s["components"][name]["max_residual"].get<double>();
        if (res > limit) return std::string(name) + " fit residual " + fmt(res) + " exceeds " + fmt(limit);
    }
    return std::nullopt;
}

std::optional<std::string> value_gate(const Json& s, const char* got, const char* want, double tol) {
    const auto& v = s["values"];
    if (v[got].is_null()) return std::string(got) + " could not be determined";
    const double a = v[got].get<double>(), b = v[want].get<double>();
    if (std::abs(a - b) > tol) return std::string(got) + " = " + fmt(a) + " differs from " + fmt(b) + " by more than " + fmt(tol);
    return std::nullopt;
}

std::optional<std::string> slope_gate(const Json& s, const char* name, double tol) {
    const auto& c = s["components"][name];
    const double a = c["slope"].get<double>(), b = c["expected_slope"].get<double>();
    if (std::abs(a - b) > tol) return std::string(name) + " slope " + fmt(a) + " differs from " + fmt(b) + " by more than " + fmt(tol);
    return std::nullopt;
}

template <typename... Gates>
std::optional<std::string> first_failure(Gates... gates) {
    std::optional<std::string> out;
    ((out = out ? out : gates()), ...);
    return out;
}

Command upperbound_command(const ExperimentOpts& o, const Globals& g) {
    return {"csv",
            [&o, &g] {
                UpperBoundConfig cfg;
                if (o.n) cfg.n = o.n;
                if (!o.eta.empty()) cfg.eta = Rational::parse(o.eta);
                if (!o.scales.empty()) cfg.r_log2 = o.scales;
                if (!o.c.empty()) cfg.c = Rational::parse(o.c);
                if (o.rho > 0) cfg.rho = o.rho;
                if (!o.sigma.empty()) cfg.sigma = Rational::parse(o.sigma);
                cfg.quad = g.quad;
                return to_report(run_upperbound(cfg));
            },
            [&o](const Report& r) {
                const double tol = o.tol >= 0 ? o.tol : 0.1;
                return first_failure([&] { return residual_gate(r.summary, {"ratio"}, o.max_residual); },
                                     [&] { return value_gate(r.summary, "implied_gamma", "expected_gamma", tol); });
            }};
}

Command ballmass_command(const ExperimentOpts& o) {
    return {"csv",
            [&o] {
                BallMassConfig cfg;
                if (o.n) cfg.n = o.n;
                if (!o.eta.empty()) cfg.eta = Rational::parse(o.eta).to_double();
                if (!o.scales.empty()) cfg.r_log2 = o.scales;
                if (!o.c.empty()) cfg.c = Rational::parse(o.c);
                if (o.rho > 0) cfg.rho = o.rho;
                if (!o.sigma.empty()) cfg.sigma = Rational::parse(o.sigma);
                return to_report(run_ballmass(cfg));
            },
            [&o](const Report& r) {
                const double tol = o.tol >= 0 ? o.tol : 0.1;
                return first_failure([&] { return residual_gate(r.summary, {"ball_mass"}, o.max_residual); },
                                     [&] { return slope_gate(r.summary, "ball_mass", tol); });
            }};
}

Command knapp_experiment_command(const ExperimentOpts& o, const Globals& g) {
    return {"csv",
            [&o, &g] {
                KnappConfig cfg;
                if (o.n) cfg.n = o.n;
                if (o.alpha > 0) cfg.alpha = o.alpha;
                if (o.p > 0) cfg.p = o.p;
                if (!o.scales.empty()) cfg.delta_log2 = o.scales;
                cfg.c0 = o.c0;
                cfg.quad = g.quad;
                return to_report(run_knapp(cfg));
            },
            [&o](const Report& r) {
                const double tol = o.tol >= 0 ? o.tol : 0.1;
                return first_failure(
                    [&] { return residual_gate(r.summary, {"norm", "ratio"}, o.max_residual); },
                    [&] { return slope_gate(r.summary, "norm", tol); },
                    [&] { return value_gate(r.summary, "implied_inv_p_max", "expected_inv_p_max", tol); },
                    [&]() -> std::optional<std::string> {
                        if (r.summary["warnings"].empty()) return std::nullopt;
                        return r.summary["warnings"][0].get<std::string>();
                    });
            }};
}

Command morrey_command(const ExperimentOpts& o, const Globals& g) {
    return {"csv",
            [&o, &g] {
                MorreyConfig cfg;
                if (o.n) cfg.n = o.n;
                if (o.alpha > 0) cfg.alpha = o.alpha;
                if (o.p > 0) cfg.p = o.p;
                if (!o.sigma.empty()) cfg.sigma = Rational::parse(o.sigma);
                if (!o.scales.empty()) cfg.delta_log2 = o.scales;
                if (!o.c.empty()) cfg.c = Rational::parse(o.c);
                if (o.rho > 0) cfg.rho = o.rho;
                cfg.sweep_den = o.sweep_den;
                cfg.quad = g.quad;
                return to_report(run_morrey(cfg));
            },
            [&o](const Report& r) {
                const double tol = o.tol >= 0 ? o.tol : 0.05;
                return first_failure(
                    [&] { return residual_gate(r.summary, {"lhs", "f_hat"}, o.max_residual); },
                    [&] { return slope_gate(r.summary, "lhs", tol); },
                    [&] { return value_gate(r.summary, "sweep_inv_p_max", "expected_inv_p_max", tol); });
            }};
}

// region -------------------------------------------------------------------

struct RegionOpts {
    int n = 4;
    std::vector<std::string> alphas;
};

Command region_command(const RegionOpts& o) {
    return {"json", [&o] {
                const auto region = region_report(o.n);
                std::vector<Rational> alphas;
                if (o.alphas.empty()) {
                    std::set<Rational> set{Rational(1), Rational(3, 2), Rational(2), region.positive_alpha_min,
                                           Rational(o.n + 1, 2), Rational(o.n)};
                    for (const auto& a : set)
                        if (a <= Rational(o.n)) alphas.push_back(a);
                } else {
                    for (const auto& s : o.alphas) {
                        const auto a = Rational::parse(s);
                        if (!(Rational(0) < a)) throw ValidationError("--alpha values must be positive");
                        alphas.push_back(a);
                    }
                }
                return to_report(region, alphas);
            },
            nullptr};
}

// extension ----------------------------------------------------------------

struct CheckRedOpts : ProfileOpts {
    int n = 2;
    std::uint64_t seed = 0;
    int points = 100;
    double range = 0;  // 0: 2^delta_log2
    std::string convention = "propagator";
    double tol = 1e-6;
};

ExtensionConvention parse_convention(const std::string& s) {
    if (s == "propagator") return ExtensionConvention::propagator;
    if (s == "standard") return ExtensionConvention::standard;
    throw ValidationError("--convention must be propagator or standard");
}

Command check_red_command(const CheckRedOpts& o, const Globals& g) {
    return {"csv",
            [&o, &g] {
                const auto P = make_profile(o);
                const auto conv = parse_convention(o.convention);
                if (o.points < 1) throw ValidationError("--points must be positive");
                if (o.n > 4) throw ValidationError("extension check supports n <= 4");
                const double range = o.range > 0 ? o.range : std::ldexp(1.0, o.delta_log2);
                std::mt19937_64 rng(o.seed);
                std::uniform_real_distribution<double> u(-range, range);
                Report r;
                r.kind = "extension-check-red";
                r.table.columns = {"index", "x", "extension_modulus", "solution_modulus", "relative_difference"};
                double worst = 0;
                for (int i = 0; i < o.points; ++i) {
                    std::vector<double> x(static_cast<std::size_t>(o.n));
                    for (auto& v : x) v = u(rng);
                    std::vector<double> xp(x.begin(), x.end() - 1);
                    if (conv == ExtensionConvention::standard)
                        for (auto& v : xp) v = -v;
                    const double e = std::abs(surface_extension(P, o.n, x, g.quad, conv));
                    const double s = std::abs(solution_at(P, o.n, xp, x.back(), g.quad));
                    const double rel = std::abs(e - s) / std::max(s, 1e-300);
                    worst = std::max(worst, rel);
                    std::string xs;
                    for (std::size_t j = 0; j < x.size(); ++j) xs += (j ? " " : "") + fmt(x[j]);
                    r.table.add_row({std::int64_t{i}, xs, e, s, rel});
                }
                r.summary["max_relative_difference"] = worst;
                r.summary["tolerance"] = o.tol;
                r.summary["seed"] = o.seed;
                return r;
            },
            [](const Report& r) -> std::optional<std::string> {
                const double w = r.summary["max_relative_difference"].get<double>();
                if (w <= r.summary["tolerance"].get<double>()) return std::nullopt;
                return "max relative difference " + fmt(w) + " exceeds tolerance";
            }};
}

struct KnappCmdOpts {
    int n = 2;
    std::vector<int> delta_list{3, 4, 5, 6, 7};
    double c0 = 0;
    int per_axis = 5;
    double min_ratio = 0.8;
    std::string convention = "propagator";
};

Command knapp_cell_command(const KnappCmdOpts& o, const Globals& g) {
    return {"csv",
            [&o, &g] {
                Report r;
                r.kind = "extension-knapp";
                r.table.columns = {"delta_log2", "min_modulus", "cell_mass", "ratio", "tube_volume", "phase_variation"};
                double worst = INFINITY;
                for (const int a : require_list(o.delta_list, "--delta-log2")) {
                    if (a < 2 || a > 30) throw ValidationError("log2(1/delta) must lie in [2, 30]");
                    const auto cell = KnappCell::make(std::ldexp(1.0, -a), o.n,
                                                      o.c0 > 0 ? o.c0 : KnappCell::default_c0(),
                                                      parse_convention(o.convention));
                    const auto kb = knapp_lower_bound(cell, g.quad, o.per_axis);
                    worst = std::min(worst, kb.ratio());
                    r.table.add_row({std::int64_t{a}, kb.min_modulus, kb.reference, kb.ratio(), cell.tube().volume(),
                                     cell.phase_variation()});
                }
                r.summary["min_ratio"] = worst;
                r.summary["min_ratio_bound"] = o.min_ratio;
                return r;
            },
            [](const Report& r) -> std::optional<std::string> {
                const double w = r.summary["min_ratio"].get<double>();
                if (w >= r.summary["min_ratio_bound"].get<double>()) return std::nullopt;
                return "tube ratio " + fmt(w) + " below bound";
            }};
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-similar Schroedinger solutions, lattice concentration and weighted extension experiments",
                 "schrlat"};
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);

    Globals g;
    app.add_option("--format", g.format, "csv or json (default depends on the command)");
    app.add_option("--output,-o", g.output, "output path, - for stdout");
    app.add_option("--threads", g.threads, "worker threads (default SCHRLAT_THREADS or all cores)")
        ->check(CLI::Range(1, 1024));
    app.add_option("--quad-nodes-min", g.quad.nodes_min, "minimum Gauss-Legendre nodes per panel");
    app.add_option("--quad-nodes-per-cycle", g.quad.nodes_per_cycle, "nodes per phase cycle");
    app.add_option("--quad-abs-tol", g.quad.abs_tol, "absolute tolerance of line integrals");

    Command selected;
    auto bind = [&](CLI::App* sub, auto make) { sub->callback([&selected, make] { selected = make(); }); };

    ProfileOpts prof;
    std::string prof_save;
    auto* c_profile = app.add_subcommand("profile", "support intervals of g_k");
    add_profile_opts(c_profile, prof);
    c_profile->add_option("--save", prof_save, "also write the profile as JSON");
    bind(c_profile, [&] { return profile_command(prof, prof_save); });

    SolveOpts solve;
    auto* c_solve = app.add_subcommand("solve", "evaluate e^{it Delta} f at one point");
    add_profile_opts(c_solve, solve);
    c_solve->add_option("--n", solve.n, "space-time dimension")->check(CLI::Range(2, 12));
    c_solve->add_option("--x", solve.x, "spatial point, n-1 comma separated values")->delimiter(',')->required();
    c_solve->add_option("--t", solve.t, "time")->required();
    bind(c_solve, [&] { return solve_command(solve, g); });

    LatticeCmdOpts lat;
    auto* c_lattice = app.add_subcommand("lattice", "enumerate the concentration lattice");
    add_lattice_opts(c_lattice, lat);
    c_lattice->add_option("--dilation", lat.dilation, "exact dilation factor p/q");
    c_lattice->add_option("--limit", lat.limit, "maximum number of rows");
    c_lattice->add_option("--save", lat.save, "also write the lattice as JSON");
    bind(c_lattice, [&] { return lattice_command(lat); });

    auto* c_verify = app.add_subcommand("verify", "certified checks with acceptance gates");
    c_verify->require_subcommand(1);
    ConcentrationOpts conc;
    auto* c_conc = c_verify->add_subcommand("concentration", "min |u| over the lattice across delta");
    add_lattice_opts(c_conc, conc);
    c_conc->remove_option(c_conc->get_option("--delta-log2"));
    c_conc->add_option("--delta-log2", conc.delta_list, "comma separated list")->delimiter(',');
    c_conc->add_option("--tol", conc.tol, "slope tolerance (default 0.05 k)");
    c_conc->add_option("--min-ratio", conc.min_ratio, "lower bound on min |u| / delta^{k(n-1)(1-sigma)}");
    c_conc->add_option("--max-ratio", conc.max_ratio, "upper bound on the same ratio (0 disables)");
    bind(c_conc, [&] { return concentration_command(conc, g); });

    SelfSimOpts ss;
    auto* c_ss = c_verify->add_subcommand("self-similarity", "exact self-similarity of g_k and the lattice");
    add_lattice_opts(c_ss, ss);
    c_ss->add_option("--levels", ss.levels, "comma separated levels >= 2")->delimiter(',');
    bind(c_ss, [&] { return selfsim_command(ss); });

    NormOpts norm;
    auto* c_norm = app.add_subcommand("norm", "ball-mass or Morrey-Campanato norm of a weight");
    add_lattice_opts(c_norm, norm);
    c_norm->add_option("--weight", norm.weight_path, "weight JSON file instead of lattice parameters");
    c_norm->add_option("--rho", norm.rho, "cube half-side");
    c_norm->add_option("--scale-log2", norm.scale_log2, "use Omega / 2^m")->check(CLI::Range(0, 40));
    c_norm->add_option("--eta", norm.eta, "ball-mass exponent");
    c_norm->add_option("--alpha", norm.alpha, "Morrey exponent alpha");
    c_norm->add_option("--p", norm.p, "Morrey exponent p");
    c_norm->add_option("--radius-ratio", norm.radius_ratio, "radius grid ratio");
    c_norm->add_flag("--no-refine", norm.no_refine, "skip the fine radius pass");
    c_norm->add_option("--grid-step", norm.grid_step, "also run the brute-force grid oracle with this step");
    bind(c_norm, [&] { return norm_command(norm); });

    auto* c_exp = app.add_subcommand("experiment", "scaling experiments");
    c_exp->require_subcommand(1);
    ExperimentOpts ub, bm, kn, mo;
    auto common = [](CLI::App* sub, ExperimentOpts& o, const char* scale_flag) {
        sub->add_option("--n", o.n, "dimension")->check(CLI::Range(2, 12));
        sub->add_option(scale_flag, o.scales, "comma separated log2 scale list")->delimiter(',');
        sub->add_option("--tol", o.tol, "gate tolerance");
        sub->add_option("--max-residual", o.max_residual, "largest accepted fit residual");
    };
    auto* c_ub = c_exp->add_subcommand("upperbound", "implied bound on gamma(eta)");
    common(c_ub, ub, "--r-log2");
    c_ub->add_option("--eta", ub.eta, "eta as p/q");
    c_ub->add_option("--c", ub.c, "lattice constant");
    c_ub->add_option("--rho", ub.rho, "cube half-side");
    c_ub->add_option("--sigma", ub.sigma, "override sigma = (n - eta)/(n + 1)");
    bind(c_ub, [&] { return upperbound_command(ub, g); });

    auto* c_bm = c_exp->add_subcommand("ballmass", "ball-mass regimes of Omega~");
    common(c_bm, bm, "--r-log2");
    c_bm->add_option("--eta", bm.eta, "eta");
    c_bm->add_option("--c", bm.c, "lattice constant");
    c_bm->add_option("--rho", bm.rho, "cube half-side");
    c_bm->add_option("--sigma", bm.sigma, "sigma as p/q");
    bind(c_bm, [&] { return ballmass_command(bm); });

    auto* c_kn = c_exp->add_subcommand("knapp", "Knapp cell and tube");
    common(c_kn, kn, "--delta-log2");
    c_kn->add_option("--alpha", kn.alpha, "alpha < 2");
    c_kn->add_option("--p", kn.p, "p");
    c_kn->add_option("--c0", kn.c0, "tube constant");
    bind(c_kn, [&] { return knapp_experiment_command(kn, g); });

    auto* c_mo = c_exp->add_subcommand("morrey", "paraboloid weight V = chi_Omega");
    common(c_mo, mo, "--delta-log2");
    c_mo->add_option("--alpha", mo.alpha, "alpha >= 2");
    c_mo->add_option("--p", mo.p, "p");
    c_mo->add_option("--sigma", mo.sigma, "sigma as p/q");
    c_mo->add_option("--c", mo.c, "lattice constant");
    c_mo->add_option("--rho", mo.rho, "cube half-side");
    c_mo->add_option("--sweep-den", mo.sweep_den, "sigma sweep over i/den");
    bind(c_mo, [&] { return morrey_command(mo, g); });

    RegionOpts region;
    auto* c_region = app.add_subcommand("region", "necessary and sufficient regions in the (alpha, 1/p) plane");
    c_region->add_option("--n", region.n, "dimension")->check(CLI::Range(2, 1000));
    c_region->add_option("--alpha", region.alphas, "comma separated alpha values p/q")->delimiter(',');
    bind(c_region, [&] { return region_command(region); });

    auto* c_ext = app.add_subcommand("extension", "extension operator checks");
    c_ext->require_subcommand(1);
    CheckRedOpts red;
    auto* c_red = c_ext->add_subcommand("check-red", "extension of the profile product against the propagator");
    add_profile_opts(c_red, red);
    c_red->add_option("--n", red.n, "dimension")->check(CLI::Range(2, 4));
    c_red->add_option("--seed", red.seed, "RNG seed for the sample points");
    c_red->add_option("--points", red.points, "number of sample points");
    c_red->add_option("--range", red.range, "coordinates drawn from [-range, range]");
    c_red->add_option("--convention", red.convention, "propagator or standard");
    c_red->add_option("--tol", red.tol, "largest accepted relative difference");
    bind(c_red, [&] { return check_red_command(red, g); });

    KnappCmdOpts kc;
    auto* c_kc = c_ext->add_subcommand("knapp", "lower bound of the cell extension on its tube");
    c_kc->add_option("--n", kc.n, "dimension")->check(CLI::Range(2, 4));
    c_kc->add_option("--delta-log2", kc.delta_list, "comma separated list")->delimiter(',');
    c_kc->add_option("--c0", kc.c0, "tube constant");
    c_kc->add_option("--per-axis", kc.per_axis, "tube samples per axis");
    c_kc->add_option("--min-ratio", kc.min_ratio, "gate on min |extension| / cell mass");
    c_kc->add_option("--convention", kc.convention, "propagator or standard");
    bind(c_kc, [&] { return knapp_cell_command(kc, g); });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_validation;
    }

    try {
        if (g.threads > 0) {
            set_thread_count(static_cast<unsigned>(g.threads));
        } else if (const char* env = std::getenv("SCHRLAT_THREADS"); env && *env) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (*end != '\0' || v < 1) throw ValidationError("SCHRLAT_THREADS must be a positive integer");
            set_thread_count(static_cast<unsigned>(v));
        }
        g.quad.validate();
        const Format format = parse_format(g.format.empty() ? selected.format : g.format);
        const Report report = selected.run();
        const std::string text = render(report, format);
        if (g.output == "-") out << text << std::flush;
        else write_atomic(g.output, text);
        if (selected.gate) {
            if (const auto failure = selected.gate(report)) {
                err << "gate failed: " << *failure << "\n";
                return exit_gate_failed;
            }
        }
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime_error;
    }
}

int parse_and_dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return parse_and_dispatch(args, std::cout, std::cerr);
}

}  // namespace schrlat
