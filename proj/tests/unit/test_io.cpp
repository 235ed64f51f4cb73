#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "schrlat/io.hpp"

using namespace schrlat;

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    return out;
}

}  // namespace

TEST_CASE("profile JSON round trip is exact") {
    for (const auto& [a, level] : std::vector<std::pair<int, int>>{{12, 1}, {8, 2}}) {
        const auto p = build_profile(a, Rational(1, 4), level);
        const auto text = to_json(p).dump();
        const auto q = profile_from_json(Json::parse(text));
        CHECK(q.delta() == p.delta());
        CHECK(q.sigma() == p.sigma());
        CHECK(q.level() == p.level());
        CHECK(std::equal(q.intervals().begin(), q.intervals().end(), p.intervals().begin(), p.intervals().end()));
    }
    const auto off_grid = build_profile(Dyadic::pow2(-10), Rational(1, 4), 1);
    CHECK(to_json(off_grid)["center_unit"] == "h");
    CHECK(profile_from_json(to_json(off_grid)).intervals().size() == off_grid.size());
    const auto j = to_json(build_profile(8, Rational(1, 4), 1));
    CHECK(j["delta_log2"] == 8);
    CHECK(j["sigma_num"] == 2);
    CHECK(j["intervals"][0] == Json::array({1, 4, 1, 256}));
}

TEST_CASE("profile JSON with tampered intervals is rejected") {
    auto j = to_json(build_profile(12, Rational(1, 4), 1));
    j["intervals"][3][0] = 99;
    CHECK_THROWS_AS(profile_from_json(j), ValidationError);
    j = to_json(build_profile(12, Rational(1, 4), 1));
    j["kind"] = "lattice";
    CHECK_THROWS_AS(profile_from_json(j), ValidationError);
    CHECK_THROWS_AS(profile_from_json(Json{{"kind", "profile"}}), ValidationError);
}

TEST_CASE("lattice JSON round trip is exact, dilation included") {
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 3, Rational(1, 40));
    CHECK(lattice_from_json(Json::parse(to_json(L).dump())) == L);
    const auto S = scale(L, Rational(1, 4096));
    CHECK(lattice_from_json(Json::parse(to_json(S).dump())) == S);
    const auto K = build_lattice(Dyadic::pow2(-8), Rational(1, 4), 2, 2, Rational(1, 40));
    CHECK(lattice_from_json(to_json(K)) == K);
    auto j = to_json(L);
    j["t_coefs"].push_back(1000);
    CHECK_THROWS_AS(lattice_from_json(j), ValidationError);
}

TEST_CASE("weight JSON round trip is exact in both forms") {
    const auto L = build_lattice(Dyadic::pow2(-12), Rational(1, 4), 1, 3, Rational(1, 40));
    const auto product = scale(thicken(L, 0.02), 1.0 / 3);
    CHECK(weight_from_json(Json::parse(to_json(product).dump())) == product);
    const auto boxes = BoxUnionWeight::from_boxes(
        2, {Box{{0.1, 1.0 / 3}, {0.25, 0.125}}, Box{{3, 1}, {0.2, std::nextafter(0.3, 1.0)}}});
    CHECK(weight_from_json(Json::parse(to_json(boxes).dump())) == boxes);
    auto j = to_json(boxes);
    j["boxes"][1]["center"] = {0.1, 0.5};
    CHECK_THROWS_AS(weight_from_json(j), ValidationError);
}

TEST_CASE("CSV rendering") {
    Table t;
    t.columns = {"a", "b", "c"};
    CHECK(render_csv(t) == "a,b,c\n");
    t.add_row({std::int64_t{3}, 0.1, std::string("x,y")});
    CHECK(render_csv(t) == "a,b,c\n3,0.10000000000000001,\"x,y\"\n");
    CHECK_THROWS_AS(t.add_row({std::int64_t{1}}), std::logic_error);
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK_THROWS_AS(parse_format("xml"), ValidationError);
}

TEST_CASE("CSV and JSON encode the same experiment values") {
    KnappConfig cfg;
    cfg.delta_log2 = {3, 4, 5};
    const auto rep = to_report(run_knapp(cfg));
    const auto csv = render(rep, Format::csv);
    const auto json = Json::parse(render(rep, Format::json));
    std::stringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "experiment,n,scale_log2,component,value,slope,residual,implied_bound");
    std::size_t row = 0;
    while (std::getline(ss, line)) {
        const auto f = split(line);
        REQUIRE(f.size() == 8);
        const auto& jr = json["rows"][row++];
        CHECK(f[3] == jr["component"].get<std::string>());
        CHECK(std::strtod(f[4].c_str(), nullptr) == jr["value"].get<double>());
        CHECK(std::strtod(f[5].c_str(), nullptr) == jr["slope"].get<double>());
        CHECK(std::strtod(f[7].c_str(), nullptr) == jr["implied_bound"].get<double>());
    }
    CHECK(row == json["rows"].size());
    CHECK(render(rep, Format::json) == render(to_report(run_knapp(cfg)), Format::json));
}

TEST_CASE("region report rows") {
    const auto rep = to_report(region_report(4), {Rational(3, 2), Rational(2), Rational(4)});
    const auto j = Json::parse(render_json(rep));
    const auto& at2 = j["rows"][1];
    CHECK(at2["positive_upper"] == "2/3");
    CHECK(at2["paraboloid_boundary"] == "4/5");
    CHECK(at2["knapp_boundary"].is_null());
    CHECK(at2["open_lower"] == "2/3");
    CHECK(at2["open_upper"] == "4/5");
    CHECK(j["rows"][0]["open_lower"].is_null());
    CHECK(j["rows"][2]["positive_upper"] == "2");
    CHECK(j["rows"][2]["open_lower"].is_null());
}

TEST_CASE("atomic writes replace the target") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "schrlat_io_test";
    fs::create_directories(dir);
    const auto path = (dir / "out.csv").string();
    write_atomic(path, "first\n");
    write_atomic(path, "second\n");
    std::ifstream in(path);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(content.str() == "second\n");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);
    fs::remove_all(dir);
    CHECK_THROWS(write_atomic((dir / "missing" / "x.csv").string(), "x"));
}
