#include "schrlat/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace schrlat {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the table columns");
    rows.push_back(std::move(row));
}

Format parse_format(std::string_view text) {
    if (text == "csv") return Format::csv;
    if (text == "json") return Format::json;
    throw ValidationError("unknown format '" + std::string(text) + "' (expected csv or json)");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) return v;
            else if constexpr (std::is_same_v<T, double>) return format_double(v);
            else return std::to_string(v);
        },
        cell);
}

Json cell_json(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) return v.empty() ? Json(nullptr) : Json(v);
            else if constexpr (std::is_same_v<T, double>) return std::isfinite(v) ? Json(v) : Json(format_double(v));
            else return Json(v);
        },
        cell);
}

}  // namespace

std::string render_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_field(table.columns[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cell_text(row[i]));
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Report& report) {
    Json j;
    j["kind"] = report.kind;
    j["columns"] = report.table.columns;
    Json rows = Json::array();
    for (const auto& row : report.table.rows) {
        Json r = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[report.table.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["summary"] = report.summary;
    return j.dump(2) + "\n";
}

std::string render(const Report& report, Format format) {
    return format == Format::csv ? render_csv(report.table) : render_json(report);
}

void write_atomic(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content << std::flush;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
    }
}

void emit_report(const Report& report, Format format, const std::string& path) {
    write_atomic(path, render(report, format));
}

// Exact values ---------------------------------------------------------------

Json to_json(const Dyadic& d) { return Json{{"mantissa", d.mantissa()}, {"exponent", d.exponent()}}; }

Json to_json(const Rational& r) { return r.str(); }

Dyadic dyadic_from_json(const Json& j) {
    try {
        return Dyadic(j.at("mantissa").get<std::int64_t>(), j.at("exponent").get<int>());
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed dyadic: ") + e.what());
    }
}

Rational rational_from_json(const Json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    throw ValidationError("rational must be a \"p/q\" string or an integer");
}

namespace {

template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed ") + what + ": " + e.what());
    }
}

void expect_kind(const Json& j, const char* kind) {
    if (!j.is_object() || j.value("kind", std::string()) != kind)
        throw ValidationError(std::string("expected a JSON object with kind \"") + kind + "\"");
}

}  // namespace

// Profile --------------------------------------------------------------------

Json to_json(const FrequencyProfile& profile) {
    Json j;
    j["kind"] = "profile";
    if (profile.delta_log2()) j["delta_log2"] = *profile.delta_log2();
    else j["delta"] = to_json(profile.delta());
    j["sigma"] = to_json(profile.sigma());
    if (profile.sigma_num()) j["sigma_num"] = *profile.sigma_num();
    j["level"] = profile.level();
    // On the grid centers are absolute; otherwise they are coefficients of h.
    j["center_unit"] = profile.on_grid() ? "absolute" : "h";
    Json intervals = Json::array();
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto& iv = profile.intervals()[i];
        const Dyadic c = profile.on_grid() ? *profile.exact_center(i) : iv.center_coef;
        intervals.push_back({c.numerator(), c.denominator(), iv.halfwidth.numerator(), iv.halfwidth.denominator()});
    }
    j["intervals"] = std::move(intervals);
    return j;
}

namespace {

Dyadic dyadic_fraction(std::int64_t num, std::int64_t den) {
    if (den <= 0 || (den & (den - 1)) != 0) throw ValidationError("interval denominators must be powers of two");
    return Dyadic(num, -std::countr_zero(static_cast<std::uint64_t>(den)));
}

}  // namespace

FrequencyProfile profile_from_json(const Json& j) {
    expect_kind(j, "profile");
    return guarded("profile", [&] {
        const Dyadic delta =
            j.contains("delta_log2") ? Dyadic::pow2(-j.at("delta_log2").get<int>()) : dyadic_from_json(j.at("delta"));
        auto profile = build_profile(delta, rational_from_json(j.at("sigma")), j.at("level").get<int>());
        if (j.contains("sigma_num") && profile.sigma_num() != j.at("sigma_num").get<int>())
            throw ValidationError("sigma_num does not match delta and sigma");
        if (j.contains("intervals")) {
            const bool absolute = j.value("center_unit", std::string("absolute")) == "absolute";
            if (absolute && !profile.on_grid()) throw ValidationError("absolute centers need an on-grid profile");
            const auto& stored = j.at("intervals");
            bool same = stored.size() == profile.size();
            for (std::size_t i = 0; same && i < profile.size(); ++i) {
                const auto v = stored[i].get<std::vector<std::int64_t>>();
                if (v.size() != 4) throw ValidationError("interval entries need four integers");
                const Dyadic want = absolute ? *profile.exact_center(i) : profile.intervals()[i].center_coef;
                same = dyadic_fraction(v[0], v[1]) == want &&
                       dyadic_fraction(v[2], v[3]) == profile.intervals()[i].halfwidth;
            }
            if (!same) throw ValidationError("stored intervals do not match the profile parameters");
        }
        return profile;
    });
}

// Lattice --------------------------------------------------------------------

Json to_json(const LatticeSet& lattice) {
    Json j;
    j["kind"] = "lattice";
    j["delta"] = to_json(lattice.delta());
    j["sigma"] = to_json(lattice.sigma());
    j["level"] = lattice.level();
    j["n"] = lattice.dimension();
    j["c"] = to_json(lattice.c());
    j["dilation"] = to_json(lattice.dilation());
    j["x_coefs"] = std::vector<std::int64_t>(lattice.x_coefs().begin(), lattice.x_coefs().end());
    j["t_coefs"] = std::vector<std::int64_t>(lattice.t_coefs().begin(), lattice.t_coefs().end());
    return j;
}

LatticeSet lattice_from_json(const Json& j) {
    expect_kind(j, "lattice");
    return guarded("lattice", [&] {
        auto lattice = build_lattice(dyadic_from_json(j.at("delta")), rational_from_json(j.at("sigma")),
                                     j.at("level").get<int>(), j.at("n").get<int>(), rational_from_json(j.at("c")));
        if (j.contains("dilation")) {
            const Rational d = rational_from_json(j.at("dilation"));
            if (d != Rational(1)) lattice = scale(lattice, d);
        }
        auto check = [&](const char* key, std::span<const std::int64_t> axis) {
            if (!j.contains(key)) return;
            const auto stored = j.at(key).get<std::vector<std::int64_t>>();
            if (!std::equal(stored.begin(), stored.end(), axis.begin(), axis.end()))
                throw ValidationError(std::string("stored ") + key + " do not match the lattice parameters");
        };
        check("x_coefs", lattice.x_coefs());
        check("t_coefs", lattice.t_coefs());
        return lattice;
    });
}

// Weight ---------------------------------------------------------------------

Json to_json(const BoxUnionWeight& weight) {
    Json j;
    j["kind"] = "weight";
    j["n"] = weight.dimension();
    if (weight.is_product()) {
        j["form"] = "product";
        Json axes = Json::array();
        for (const auto& a : weight.axes()) axes.push_back({{"centers", a.centers}, {"halfwidth", a.halfwidth}});
        j["axes"] = std::move(axes);
    } else {
        j["form"] = "explicit";
        Json boxes = Json::array();
        for (const auto& b : weight.explicit_boxes())
            boxes.push_back({{"center", b.center}, {"halfwidths", b.halfwidths}});
        j["boxes"] = std::move(boxes);
    }
    return j;
}

BoxUnionWeight weight_from_json(const Json& j) {
    expect_kind(j, "weight");
    return guarded("weight", [&] {
        const auto form = j.at("form").get<std::string>();
        if (form == "product") {
            std::vector<AxisUnion> axes;
            for (const auto& a : j.at("axes"))
                axes.push_back(AxisUnion{a.at("centers").get<std::vector<double>>(), a.at("halfwidth").get<double>()});
            auto w = BoxUnionWeight::product(std::move(axes));
            if (j.contains("n") && j.at("n").get<int>() != w.dimension())
                throw ValidationError("weight dimension does not match its axes");
            return w;
        }
        if (form == "explicit") {
            std::vector<Box> boxes;
            for (const auto& b : j.at("boxes"))
                boxes.push_back(
                    Box{b.at("center").get<std::vector<double>>(), b.at("halfwidths").get<std::vector<double>>()});
            return BoxUnionWeight::from_boxes(j.at("n").get<int>(), std::move(boxes));
        }
        throw ValidationError("weight form must be product or explicit");
    });
}

// Reports --------------------------------------------------------------------

namespace {

const char* implied_key(const std::string& experiment) {
    if (experiment == "upperbound") return "implied_gamma";
    if (experiment == "knapp") return "implied_inv_p_max";
    if (experiment == "morrey") return "sweep_inv_p_max";
    return nullptr;
}

Cell optional_rational(bool present, const Rational& r) { return present ? Cell(r.str()) : Cell(std::string()); }

}  // namespace

Report to_report(const ExperimentReport& rep) {
    Report out;
    out.kind = "experiment";
    out.table.columns = {"experiment", "n", "scale_log2", "component", "value", "slope", "residual", "implied_bound"};
    const char* key = implied_key(rep.experiment);
    const Cell implied = key && rep.has_value(key) ? Cell(rep.value(key)) : Cell(std::string());
    for (const auto& comp : rep.components)
        for (std::size_t i = 0; i < comp.values.size(); ++i)
            out.table.add_row({rep.experiment, std::int64_t{rep.n}, std::int64_t{rep.scale_log2[i]}, comp.name,
                               comp.values[i], comp.fit.slope, comp.fit.max_residual, implied});

    Json& s = out.summary;
    s["experiment"] = rep.experiment;
    s["n"] = rep.n;
    s["scale"] = rep.scale_name;
    s["scale_log2"] = rep.scale_log2;
    Json comps = Json::object();
    for (const auto& comp : rep.components) {
        Json c;
        c["slope"] = comp.fit.slope;
        c["intercept"] = comp.fit.intercept;
        c["max_residual"] = comp.fit.max_residual;
        c["expected_slope"] = comp.expected_slope ? Json(*comp.expected_slope) : Json(nullptr);
        comps[comp.name] = std::move(c);
    }
    s["components"] = std::move(comps);
    Json values = Json::object();
    for (const auto& [k, v] : rep.summary) values[k] = std::isfinite(v) ? Json(v) : Json(nullptr);
    s["values"] = std::move(values);
    s["sample_notes"] = rep.sample_notes;
    s["warnings"] = rep.warnings;
    return out;
}

Report to_report(const RegionReport& region, const std::vector<Rational>& alphas) {
    Report out;
    out.kind = "region";
    out.table.columns = {"alpha",           "positive_lower", "positive_upper", "knapp_boundary",
                         "paraboloid_boundary", "open_lower",     "open_upper"};
    const Rational one(1), two(2), n(region.n);
    for (const auto& alpha : alphas) {
        const bool positive = region.positive_alpha_min < alpha && alpha <= n;
        const bool knapp = alpha < two;
        const bool parab = region.paraboloid_applies && two <= alpha;
        Rational lo = positive ? region.positive_upper(alpha) : region.positive_lower(alpha);
        Rational hi = knapp ? region.knapp_boundary(alpha) : parab ? region.paraboloid_boundary(alpha) : one;
        if (one < hi) hi = one;
        const bool open = lo < hi;
        out.table.add_row({alpha.str(), region.positive_lower(alpha).str(),
                           optional_rational(positive, region.positive_upper(alpha)),
                           optional_rational(knapp, region.knapp_boundary(alpha)),
                           optional_rational(parab, region.paraboloid_boundary(alpha)), optional_rational(open, lo),
                           optional_rational(open, hi)});
    }
    Json& s = out.summary;
    s["n"] = region.n;
    s["positive"] = {{"alpha_range", "(" + region.positive_alpha_min.str() + ", " + std::to_string(region.n) + "]"},
                     {"inv_p", "alpha/n <= 1/p < 2(alpha-1)/(n-1)"}};
    s["false_knapp"] = {{"alpha_range", "alpha < 2"}, {"inv_p", "1/p > 2(alpha-1)/(n-1)"}};
    s["false_paraboloid"] = region.paraboloid_applies
                                ? Json{{"alpha_range", "alpha >= 2"}, {"inv_p", "1/p > 2 alpha/(n+1)"}}
                                : Json(nullptr);
    Json endpoints = Json::object();
    for (const auto& [name, pt] : region.endpoints) endpoints[name] = {pt.first.str(), pt.second.str()};
    s["endpoints"] = std::move(endpoints);
    s["notes"] = region.notes;
    return out;
}

}  // namespace schrlat
