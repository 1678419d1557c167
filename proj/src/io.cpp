#include "arbo/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "arbo/errors.hpp"

namespace arbo {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(x) < 1e-12 ? 0.0 : x);
    return buf;
}

// Roughly five round tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(t);
    return out;
}

struct Frame {
    Chart c;
    double x0, x1, y0, y1;
    double left = 70, right = 20, top = 40, bottom = 50;

    double px(double x) const { return left + (x - x0) / (x1 - x0) * (c.width - left - right); }
    double py(double y) const { return c.height - bottom - (y - y0) / (y1 - y0) * (c.height - top - bottom); }
};

void widen(double& lo, double& hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) lo = 0.0, hi = 1.0;
    if (hi - lo <= 0.0) {
        const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
        lo -= pad;
        hi += pad;
    }
}

std::string open_svg(const Frame& f, bool xticks = true) {
    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << f.c.width << "\" height=\""
      << f.c.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << f.c.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(f.c.title) << "</text>\n";
    const double bx = f.left, by = f.top, bw = f.c.width - f.left - f.right, bh = f.c.height - f.top - f.bottom;
    o << "<rect x=\"" << num(bx) << "\" y=\"" << num(by) << "\" width=\"" << num(bw) << "\" height=\"" << num(bh)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (xticks)
        for (double t : ticks(f.x0, f.x1))
            o << "<line x1=\"" << num(f.px(t)) << "\" y1=\"" << num(by + bh) << "\" x2=\"" << num(f.px(t))
              << "\" y2=\"" << num(by + bh + 5) << "\" stroke=\"black\"/>"
              << "<text x=\"" << num(f.px(t)) << "\" y=\"" << num(by + bh + 18) << "\" text-anchor=\"middle\">"
              << tick_label(t) << "</text>\n";
    o << "<text x=\"" << num(bx + bw / 2) << "\" y=\"" << f.c.height - 10 << "\" text-anchor=\"middle\">"
      << xml_escape(f.c.xlabel) << "</text>\n";
    o << "<text x=\"15\" y=\"" << num(by + bh / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << num(by + bh / 2) << ")\">" << xml_escape(f.c.ylabel) << "</text>\n";
    return o.str();
}

std::string yticks(const Frame& f) {
    std::ostringstream o;
    for (double t : ticks(f.y0, f.y1))
        o << "<line x1=\"" << num(f.left - 5) << "\" y1=\"" << num(f.py(t)) << "\" x2=\"" << num(f.left)
          << "\" y2=\"" << num(f.py(t)) << "\" stroke=\"black\"/>"
          << "<text x=\"" << num(f.left - 8) << "\" y=\"" << num(f.py(t) + 4) << "\" text-anchor=\"end\">"
          << tick_label(t) << "</text>\n";
    return o.str();
}

}  // namespace

std::string csv_quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

void write_csv(std::ostream& os, const CsvTable& t) {
    auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_quote(row[i]);
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

CsvTable read_csv(std::istream& is) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    char c;
    while (is.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (is.peek() == '"') {
                    is.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            row.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw IoError("unterminated quoted CSV field");
    if (any) {
        row.push_back(std::move(field));
        records.push_back(std::move(row));
    }
    CsvTable t;
    if (records.empty()) return t;
    t.header = std::move(records.front());
    t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return t;
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string svg_lines(const Chart& c, const std::vector<Series>& series) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    widen(x0, x1);
    widen(y0, y1);
    const double pad = 0.05 * (y1 - y0);
    Frame f{c, x0, x1, y0 - pad, y1 + pad};
    std::string out = open_svg(f) + yticks(f);
    int legend = 0;
    for (const auto& s : series) {
        std::string pts;
        auto flush = [&] {
            if (pts.empty()) return;
            out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"" +
                   (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + " points=\"" + pts + "\"/>\n";
            pts.clear();
        };
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                flush();
                continue;
            }
            pts += (pts.empty() ? "" : " ") + num(f.px(s.x[i])) + "," + num(f.py(s.y[i]));
        }
        flush();
        if (!s.label.empty()) {
            const double ly = f.top + 15 + 16 * legend++;
            const double lx = c.width - f.right - 190;
            out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 25) + "\" y2=\"" +
                   num(ly - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"" +
                   (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/><text x=\"" + num(lx + 30) + "\" y=\"" +
                   num(ly) + "\">" + xml_escape(s.label) + "</text>\n";
        }
    }
    return out + "</svg>\n";
}

std::string svg_tornado(const Chart& c, const std::vector<std::string>& names, const std::vector<double>& values) {
    double m = 0.0;
    for (double v : values)
        if (std::isfinite(v)) m = std::max(m, std::abs(v));
    if (m == 0.0) m = 1.0;
    Frame f{c, -m, m, 0.0, 1.0};
    f.left = 100;
    std::string out = open_svg(f);
    const double bh = (c.height - f.top - f.bottom) / std::max<std::size_t>(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double y = f.top + bh * static_cast<double>(i);
        out += "<text x=\"" + num(f.left - 6) + "\" y=\"" + num(y + 0.7 * bh) + "\" text-anchor=\"end\">" +
               xml_escape(i < names.size() ? names[i] : "") + "</text>";
        if (std::isfinite(values[i])) {
            const double a = f.px(std::min(0.0, values[i])), b = f.px(std::max(0.0, values[i]));
            out += "<rect x=\"" + num(a) + "\" y=\"" + num(y + 0.15 * bh) + "\" width=\"" + num(b - a) +
                   "\" height=\"" + num(0.7 * bh) + "\" fill=\"" + (values[i] < 0 ? "#d62728" : "#1f77b4") + "\"/>";
        }
        out += "\n";
    }
    out += "<line x1=\"" + num(f.px(0)) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.px(0)) + "\" y2=\"" +
           num(c.height - f.bottom) + "\" stroke=\"black\"/>\n";
    return out + "</svg>\n";
}

std::string svg_histogram(const Chart& c, const std::vector<double>& values, int bins) {
    if (bins < 1) throw ValidationError("bins", "histogram needs at least one bin");
    double lo = INFINITY, hi = -INFINITY;
    for (double v : values)
        if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    widen(lo, hi);
    std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        auto k = static_cast<std::size_t>((v - lo) / (hi - lo) * bins);
        count[std::min(k, count.size() - 1)] += 1.0;
    }
    const double top = std::max(1.0, *std::max_element(count.begin(), count.end()));
    Frame f{c, lo, hi, 0.0, top * 1.05};
    std::string out = open_svg(f) + yticks(f);
    const double w = (hi - lo) / bins;
    for (int k = 0; k < bins; ++k) {
        const double a = f.px(lo + w * k), b = f.px(lo + w * (k + 1)), y = f.py(count[static_cast<std::size_t>(k)]);
        out += "<rect x=\"" + num(a) + "\" y=\"" + num(y) + "\" width=\"" + num(b - a) + "\" height=\"" +
               num(f.py(0) - y) + "\" fill=\"#1f77b4\" stroke=\"white\"/>\n";
    }
    return out + "</svg>\n";
}

std::string svg_bifurcation(const std::vector<SweepRow>& rows) {
    // One series per (branch family, stability); consecutive sweep points join.
    struct Key {
        bool endemic;
        bool stable;
        bool operator<(const Key& o) const { return std::tie(endemic, stable) < std::tie(o.endemic, o.stable); }
    };
    std::vector<double> betas;
    for (const auto& r : rows) betas.push_back(r.beta_hv);
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
    auto step = [&](double b) { return std::lower_bound(betas.begin(), betas.end(), b) - betas.begin(); };

    std::map<Key, Series> groups;
    std::map<Key, std::ptrdiff_t> last;
    for (const auto& r : rows) {
        if (!r.ok || r.stable == "marginal") continue;
        Key k{r.branch != "dfe", r.stable == "stable"};
        auto& s = groups[k];
        const auto i = step(r.beta_hv);
        auto it = last.find(k);
        if (it != last.end() && i != it->second + 1) {
            s.x.push_back(NAN);
            s.y.push_back(NAN);
        }
        s.x.push_back(r.R0);
        s.y.push_back(r.E_h);
        last[k] = i;
    }
    std::vector<Series> series;
    for (auto& [k, s] : groups) {
        s.label = std::string(k.endemic ? "endemic" : "disease-free") + (k.stable ? ", stable" : ", unstable");
        s.dashed = !k.stable;
        s.color = k.endemic ? "#d62728" : "#1f77b4";
        series.push_back(std::move(s));
    }
    return svg_lines({"Equilibria against R0", "R0", "E_h at equilibrium"}, series);
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

void RunManifest::set(const std::string& key, const std::string& value) {
    if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos)
        throw IoError("manifest entry '" + key + "' contains a reserved character");
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = value;
            return;
        }
    entries_.emplace_back(key, value);
}

std::optional<std::string> RunManifest::get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    return std::nullopt;
}

std::string RunManifest::text() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
    return out;
}

RunManifest RunManifest::parse(std::istream& is) {
    RunManifest m;
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("manifest line " + std::to_string(n) + ": missing '='");
        m.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return m;
}

RunConfig parse_config(std::istream& is, const std::string& source) {
    RunConfig cfg;
    std::map<std::string, int> key_line;
    auto fail = [&](int line, const std::string& field, const std::string& msg) -> void {
        throw ValidationError(field, source + ":" + std::to_string(line) + ": " + msg);
    };
    std::string raw;
    int n = 0;
    while (std::getline(is, raw)) {
        ++n;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(n, "line", "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail(n, "line", "missing key");

        if (key == "variant") {
            try {
                cfg.variant = parse_variant(value);
            } catch (const ValidationError& e) {
                fail(n, "variant", e.what());
            }
        } else if (key == "pulse") {
            std::istringstream ss{std::string(value)};
            std::string control;
            ss >> control;
            std::vector<double> f;
            std::string tok;
            while (ss >> tok) {
                auto x = parse_number(tok);
                if (!x) fail(n, "pulse", "non-numeric pulse field '" + tok + "'");
                f.push_back(*x);
            }
            if (f.size() != 5) fail(n, "pulse", "expected 'pulse = control level period duration start end'");
            try {
                PulseEntry e{parse_control(control), f[0], f[1], f[2], f[3], f[4]};
                PulseSchedule{{e}}.validate(std::numeric_limits<double>::infinity());
                cfg.schedule.entries.push_back(e);
            } catch (const ValidationError& e) {
                fail(n, e.field(), e.what());
            }
        } else {
            if (!find_param(key)) fail(n, key, "unknown key '" + key + "'");
            if (key_line.count(key)) fail(n, key, "duplicate key '" + key + "'");
            const auto x = parse_number(value);
            if (!x || !std::isfinite(*x)) fail(n, key, "value for " + key + " is not a finite number");
            set_param(cfg.params, key, *x);
            key_line[key] = n;
        }
    }
    for (const auto& s : param_specs())
        if (!key_line.count(s.key)) cfg.defaulted.emplace_back(s.key);
    try {
        validate(cfg.params);
    } catch (const ValidationError& e) {
        auto it = key_line.find(e.field());
        throw ValidationError(e.field(), source + (it != key_line.end() ? ":" + std::to_string(it->second) : "") +
                                             ": " + e.what());
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config '" + path + "'");
    return parse_config(f, path);
}

std::vector<ParamRange> parse_ranges(std::istream& is, const ModelParams& base, const std::string& source) {
    auto ranges = default_ranges(base);
    std::string raw;
    int n = 0;
    while (std::getline(is, raw)) {
        ++n;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto where = [&](const std::string& msg) { return source + ":" + std::to_string(n) + ": " + msg; };
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ValidationError("line", where("expected 'key = lo hi'"));
        const std::string key(trim(line.substr(0, eq)));
        std::string rest(line.substr(eq + 1));
        std::replace(rest.begin(), rest.end(), ',', ' ');
        std::istringstream ss(rest);
        std::string a, b, extra;
        ss >> a >> b;
        const auto lo = parse_number(a), hi = parse_number(b);
        if (!lo || !hi || (ss >> extra)) throw ValidationError(key, where("expected two numeric bounds"));
        auto it = std::find_if(ranges.begin(), ranges.end(), [&](const ParamRange& r) { return r.parameter == key; });
        if (it == ranges.end()) throw ValidationError(key, where("unknown parameter '" + key + "'"));
        it->lo = *lo;
        it->hi = *hi;
        try {
            validate_ranges({*it}, base);
        } catch (const ValidationError& e) {
            throw ValidationError(key, where(e.what()));
        }
    }
    return ranges;
}

}  // namespace arbo
