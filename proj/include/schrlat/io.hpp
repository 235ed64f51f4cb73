#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "schrlat/exact.hpp"
#include "schrlat/experiments.hpp"
#include "schrlat/lattice.hpp"
#include "schrlat/profile.hpp"
#include "schrlat/weight.hpp"

namespace schrlat {

using Json = nlohmann::ordered_json;

/// Empty string cells render as empty CSV fields and JSON null.
using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    /// Throws std::logic_error when the row width differs from columns.
    void add_row(std::vector<Cell> row);
};

/// A result set: one table plus a summary object. CSV carries the table only.
struct Report {
    std::string kind;
    Table table;
    Json summary = Json::object();
};

enum class Format { csv, json };

Format parse_format(std::string_view text);

/// %.17g; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

std::string render_csv(const Table& table);
std::string render_json(const Report& report);
std::string render(const Report& report, Format format);

/// Writes via a temporary file in the target directory and a rename.
/// Path "-" writes to stdout. Throws std::runtime_error on I/O failure.
void write_atomic(const std::string& path, const std::string& content);
void emit_report(const Report& report, Format format, const std::string& path);

Json to_json(const Dyadic& d);
Json to_json(const Rational& r);
Dyadic dyadic_from_json(const Json& j);
Rational rational_from_json(const Json& j);

/// Parameters plus the interval list. Reloading rebuilds from the
/// parameters and requires the stored intervals to match exactly.
Json to_json(const FrequencyProfile& profile);
FrequencyProfile profile_from_json(const Json& j);

/// Parameters, dilation and both coefficient axes; reload is checked the
/// same way.
Json to_json(const LatticeSet& lattice);
LatticeSet lattice_from_json(const Json& j);

Json to_json(const BoxUnionWeight& weight);
BoxUnionWeight weight_from_json(const Json& j);

/// Long form: one row per (component, sample) with columns experiment, n,
/// scale_log2, component, value, slope, residual, implied_bound.
Report to_report(const ExperimentReport& report);

/// One row per alpha with the boundary values that apply there.
Report to_report(const RegionReport& region, const std::vector<Rational>& alphas);

}  // namespace schrlat
