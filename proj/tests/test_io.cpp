#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "arbo/errors.hpp"
#include "arbo/io.hpp"

using namespace arbo;

namespace {

RunConfig config(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is, "test.cfg");
}

std::string config_error(const std::string& text) {
    try {
        config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

bool balanced_svg(const std::string& s) {
    return s.find("<svg") != std::string::npos && s.find("</svg>") != std::string::npos &&
           s.find("NaN") == std::string::npos && s.find("nan") == std::string::npos;
}

}  // namespace

TEST_CASE("numbers round-trip through text") {
    for (double x : {0.0, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, std::numeric_limits<double>::denorm_min()}) {
        const auto y = parse_number(fmt17(x));
        REQUIRE(y);
        CHECK(*y == x);
    }
    CHECK(parse_number("+0.5") == 0.5);
    CHECK_FALSE(parse_number("0.5x"));
    CHECK_FALSE(parse_number(""));
    CHECK_FALSE(parse_number("abc"));
}

TEST_CASE("CSV round-trips with quoting") {
    CsvTable t{{"name", "value"}, {}};
    t.add({"plain", fmt17(0.1)});
    t.add({"comma, inside", "say \"hi\""});
    t.add({"line\nbreak", ""});
    std::stringstream ss;
    write_csv(ss, t);
    const CsvTable back = read_csv(ss);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("plain") == "plain");
}

TEST_CASE("empty table writes the header only") {
    std::ostringstream os;
    write_csv(os, CsvTable{{"a", "b"}, {}});
    CHECK(os.str() == "a,b\n");
}

TEST_CASE("SHA-256 of a known message") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("manifest round-trip keeps order") {
    RunManifest m;
    m.set("tool", "arbo");
    m.set("param.theta", "0.080000000000000002");
    m.set("flag.init", "1,2,3");
    m.set("tool", "arbo2");
    std::istringstream is(m.text());
    const RunManifest back = RunManifest::parse(is);
    CHECK(back.entries() == m.entries());
    CHECK(back.get("tool") == "arbo2");
    CHECK_FALSE(back.get("missing"));
    std::istringstream bad("no equals sign\n");
    CHECK_THROWS_AS(RunManifest::parse(bad), IoError);
}

TEST_CASE("empty config uses every default") {
    const RunConfig c = config("# nothing here\n\n");
    CHECK(c.params == ModelParams{});
    CHECK(c.defaulted.size() == kParamCount);
    CHECK(c.variant == ModelVariant{});
    CHECK(c.schedule.entries.empty());
}

TEST_CASE("single override leaves the rest defaulted") {
    const RunConfig c = config("beta_hv = 0.3  # transmission\nvariant = no-vaccination\n");
    CHECK(c.params.beta_hv == 0.3);
    CHECK(c.params.theta == ModelParams{}.theta);
    CHECK(c.defaulted.size() == kParamCount - 1);
    CHECK(std::find(c.defaulted.begin(), c.defaulted.end(), "beta_hv") == c.defaulted.end());
    CHECK_FALSE(c.variant.vaccination);
}

TEST_CASE("config errors carry the line number") {
    CHECK(config_error("theta = 0.1\nalpha_1 = 1.5\n").find("test.cfg:2:") == 0);
    CHECK(config_error("theta = 0.1\nalpha_1 = 1.5\n").find("[0, 1)") != std::string::npos);
    CHECK(config_error("\nbeta = 1\n").find("test.cfg:2: unknown key") == 0);
    CHECK(config_error("theta 0.1\n").find("test.cfg:1:") == 0);
    CHECK(config_error("theta = fast\n").find("test.cfg:1:") == 0);
    CHECK(config_error("theta = 0.1\ntheta = 0.2\n").find("duplicate") != std::string::npos);
    CHECK(config_error("pulse = c_m 0.5 7 1 0\n").find("test.cfg:1:") == 0);
    CHECK(config_error("pulse = c_m 0.5 7 9 0 100\n").find("test.cfg:1:") == 0);
    CHECK(config_error("variant = nope\n").find("test.cfg:1:") == 0);
}

TEST_CASE("pulse lines") {
    const RunConfig c = config("pulse = c_m 0.5 7 1 0 100\npulse = eta_1 0.2 15 1 0 100\n");
    REQUIRE(c.schedule.entries.size() == 2);
    CHECK(c.schedule.entries[0].control == Control::Cm);
    CHECK(c.schedule.entries[1].period == 15.0);
}

TEST_CASE("ranges files") {
    std::istringstream is("theta = 0.05, 0.1\nmu_v = 0.02 0.04\n");
    const auto r = parse_ranges(is, baseline());
    CHECK(r.size() == kParamCount);
    for (const auto& pr : r) {
        if (pr.parameter == "theta") {
            CHECK(pr.lo == 0.05);
            CHECK(pr.hi == 0.1);
        }
    }
    std::istringstream bad("theta = 0.1\n");
    CHECK_THROWS_AS(parse_ranges(bad, baseline()), ValidationError);
}

TEST_CASE("SVG output is well formed") {
    Series s{"a", {0, 1, 2, 3}, {1, NAN, 2, 3}, true, "#000"};
    const std::string lines = svg_lines({"t", "x", "y"}, {s});
    CHECK(balanced_svg(lines));
    CHECK(lines.find("stroke-dasharray") != std::string::npos);
    CHECK(balanced_svg(svg_tornado({"t", "x", ""}, {"p", "q"}, {0.5, -0.25})));
    CHECK(balanced_svg(svg_histogram({"h", "x", "n"}, {0.1, 0.2, 0.2, 0.9}, 5)));
    CHECK(balanced_svg(svg_histogram({"h", "x", "n"}, {}, 5)));

    std::vector<SweepRow> rows{{0.1, 0.8, "dfe", 0.0, 0.0, 0.0, "stable", true},
                               {0.1, 0.8, "endemic-1", 0.1, 5.0, 2.0, "unstable", true},
                               {0.1, 0.8, "endemic-2", 0.3, 50.0, 20.0, "stable", true},
                               {0.2, 1.1, "dfe", 0.0, 0.0, 0.0, "unstable", true},
                               {0.2, 1.1, "endemic-1", 0.4, 70.0, 30.0, "stable", true}};
    const std::string bif = svg_bifurcation(rows);
    CHECK(balanced_svg(bif));
    CHECK(bif.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("missing files raise IO errors") {
    CHECK_THROWS_AS(read_file("/nonexistent/dir/file.txt"), IoError);
    CHECK_THROWS_AS(write_file("/nonexistent/dir/file.txt", "x"), IoError);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/dir/file.cfg"), IoError);
}
