#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arbo/params.hpp"
#include "arbo/sensitivity.hpp"
#include "arbo/simulate.hpp"
#include "arbo/stability.hpp"

namespace arbo {

// %.17g, the shortest format that round-trips every double.
std::string fmt17(double x);
// Strict decimal parse of the whole token; nullopt on trailing junk.
std::optional<double> parse_number(std::string_view s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string csv_quote(std::string_view field);
void write_csv(std::ostream& os, const CsvTable& t);
CsvTable read_csv(std::istream& is);

void write_file(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

// --- SVG ---

struct Series {
    std::string label;
    std::vector<double> x, y;  // NaN in y breaks the polyline
    bool dashed = false;
    std::string color = "#1f77b4";
};

struct Chart {
    std::string title, xlabel, ylabel;
    int width = 720, height = 480;
};

std::string svg_lines(const Chart& c, const std::vector<Series>& series);
// Horizontal bars centred on zero, in the given order.
std::string svg_tornado(const Chart& c, const std::vector<std::string>& names, const std::vector<double>& values);
std::string svg_histogram(const Chart& c, const std::vector<double>& values, int bins);

// Equilibrium E_h against R0: solid where stable, dashed otherwise.
std::string svg_bifurcation(const std::vector<SweepRow>& rows);

// --- manifests ---

std::string sha256_hex(std::string_view data);

// Flat key=value record; insertion order is preserved in text().
class RunManifest {
public:
    void set(const std::string& key, const std::string& value);
    std::optional<std::string> get(const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    std::string text() const;
    static RunManifest parse(std::istream& is);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// --- config files ---

struct RunConfig {
    ModelParams params;
    ModelVariant variant;
    PulseSchedule schedule;
    std::vector<std::string> defaulted;  // parameter keys not present in the file
};

// `key = value` lines, `#` comments. Keys: any parameter, `variant`, and
// `pulse = control level period duration start end` (repeatable).
// Errors are ValidationError with a "source:line:" prefix.
RunConfig parse_config(std::istream& is, const std::string& source = "config");
RunConfig parse_config_file(const std::string& path);

// `key = lo hi` lines (a comma between the bounds is allowed). Parameters
// not listed keep their default range.
std::vector<ParamRange> parse_ranges(std::istream& is, const ModelParams& base, const std::string& source = "ranges");

}  // namespace arbo
