#include "arbo/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arbo/equilibria.hpp"
#include "arbo/errors.hpp"
#include "arbo/selfcheck.hpp"
#include "arbo/stability.hpp"
#include "arbo/thresholds.hpp"

namespace arbo {

void Request::set_flag(const std::string& name, const std::string& value) {
    for (auto& [k, v] : flags)
        if (k == name) {
            v = value;
            return;
        }
    flags.emplace_back(name, value);
}

const std::string* Request::flag(const std::string& name) const {
    for (const auto& [k, v] : flags)
        if (k == name) return &v;
    return nullptr;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"thresholds",        "equilibria",         "bifurcation",
                                                "simulate",          "strategy",           "sensitivity-local",
                                                "sensitivity-global", "selfcheck"};
    return names;
}

namespace {

std::string tf(bool b) { return b ? "true" : "false"; }

double number_flag(const Request& r, const std::string& name) {
    const std::string* s = r.flag(name);
    if (!s) throw ValidationError(name, "missing flag --" + name);
    const auto x = parse_number(*s);
    if (!x || !std::isfinite(*x)) throw ValidationError(name, "--" + name + " expects a number, got '" + *s + "'");
    return *x;
}

int int_flag(const Request& r, const std::string& name) {
    const double x = number_flag(r, name);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw ValidationError(name, "--" + name + " expects an integer");
    return static_cast<int>(x);
}

std::vector<double> list_flag(const Request& r, const std::string& name) {
    std::vector<double> out;
    const std::string* s = r.flag(name);
    if (!s) throw ValidationError(name, "missing flag --" + name);
    std::stringstream ss(*s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto x = parse_number(tok);
        if (!x || !std::isfinite(*x)) throw ValidationError(name, "--" + name + " has a non-numeric entry '" + tok + "'");
        out.push_back(*x);
    }
    if (out.empty()) throw ValidationError(name, "--" + name + " is empty");
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt17(xs[i]);
    return out;
}

std::string csv_text(const CsvTable& t) {
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

std::vector<std::string> state_header(const char* first) {
    std::vector<std::string> h{first};
    for (const char* n : state_names()) h.emplace_back(n);
    return h;
}

void default_flag(Request& r, const std::string& name, const std::string& value) {
    if (!r.flag(name)) r.set_flag(name, value);
}

Tolerances tolerances(const Request& r) { return {number_flag(r, "rtol"), number_flag(r, "atol")}; }

State initial_state(const Request& r) {
    const auto v = list_flag(r, "init");
    if (v.size() != kStateDim) throw ValidationError("init", "--init needs 11 comma-separated values");
    State x;
    std::copy(v.begin(), v.end(), x.begin());
    return x;
}

// --- subcommands ---

RunOutput run_thresholds(const Request& r) {
    const auto rep = threshold_report(r.params, r.variant);
    CsvTable t{{"name", "value", "applicable"}, {}};
    for (const auto& e : rep.entries) t.add({e.name, fmt17(e.value), tf(e.applicable)});
    RunOutput out{{{"thresholds.csv", csv_text(t)}}, {}, 0};
    if (rep.no_vectors) out.summary = "net reproductive number <= 1: reproduction numbers reported as 0\n";
    return out;
}

void add_equilibrium(CsvTable& t, const Equilibrium& e) {
    std::vector<std::string> row{kind_name(e.kind)};
    for (double c : e.state) row.push_back(fmt17(c));
    row.push_back(fmt17(e.residual));
    row.emplace_back(stability_name(e.stability));
    t.add(row);
}

RunOutput run_equilibria(const Request& r) {
    auto h = state_header("kind");
    h.emplace_back("residual");
    h.emplace_back("stability");
    CsvTable t{h, {}};
    const auto dfs = disease_free_states(r.params, r.variant);
    add_equilibrium(t, dfs.trivial);
    if (dfs.dfe) add_equilibrium(t, *dfs.dfe);
    std::string summary;
    if (dfs.dfe) {
        const auto sol = solve_endemic(r.params, r.variant);
        for (const auto& e : sol.equilibria) add_equilibrium(t, e);
        summary = std::string("endemic polynomial (") + poly_form_name(sol.poly.form) +
                  "): " + poly_text(sol.poly.governing()) + "\n";
        if (sol.at_threshold) summary += "reproduction number within 1e-8 of 1\n";
    }
    return {{{"equilibria.csv", csv_text(t)}}, summary, 0};
}

RunOutput run_bifurcation(const Request& r) {
    const auto rows = bifurcation_sweep(r.params, r.variant, number_flag(r, "beta-min"), number_flag(r, "beta-max"),
                                        int_flag(r, "points"), int_flag(r, "threads"));
    CsvTable t{{"beta_hv", "R0", "branch", "lambda_root", "E_h", "E_v", "stable"}, {}};
    int errors = 0;
    for (const auto& row : rows) {
        t.add({fmt17(row.beta_hv), fmt17(row.R0), row.branch, fmt17(row.lambda_root), fmt17(row.E_h), fmt17(row.E_v),
               row.stable});
        errors += !row.ok;
    }
    RunOutput out{{{"bifurcation.csv", csv_text(t)}, {"bifurcation.svg", svg_bifurcation(rows)}}, {}, 0};
    if (errors) out.summary = std::to_string(errors) + " sweep points failed; see rows with branch 'error'\n";
    return out;
}

void add_trajectory(CsvTable& t, const Trajectory& tr, const std::string* level) {
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        std::vector<std::string> row;
        if (level) row.push_back(*level);
        row.push_back(fmt17(tr.times[i]));
        for (double c : tr.states[i]) row.push_back(fmt17(c));
        row.push_back(fmt17(tr.cumulative_infections[i]));
        t.add(row);
    }
}

Series infected_series(const Trajectory& tr, bool humans, const std::string& label, const std::string& color) {
    Series s{label, tr.times, {}, false, color};
    for (const auto& x : tr.states) s.y.push_back(humans ? x[Eh] + x[Ih] : x[Ev] + x[Iv]);
    return s;
}

RunOutput run_simulate(const Request& r) {
    const double t_end = number_flag(r, "t-end"), dt = number_flag(r, "dt");
    if (!(dt > 0.0)) throw ValidationError("dt", "--dt must be positive");
    IntegrateOptions opts{tolerances(r), sample_grid(0.0, t_end, dt)};
    const auto tr = integrate(r.params, r.variant, initial_state(r), 0.0, t_end, r.schedule, opts);
    auto h = state_header("t");
    h.emplace_back("cumulative_infections");
    CsvTable t{h, {}};
    add_trajectory(t, tr, nullptr);
    RunOutput out{{{"trajectory.csv", csv_text(t)}}, {}, 0};
    out.files.push_back({"infected_humans.svg", svg_lines({"Infected humans", "days", "E_h + I_h"},
                                                          {infected_series(tr, true, "", "#d62728")})});
    out.files.push_back({"infected_vectors.svg", svg_lines({"Infected vectors", "days", "E_v + I_v"},
                                                           {infected_series(tr, false, "", "#1f77b4")})});
    if (!tr.events.empty()) out.summary = std::to_string(tr.events.size()) + " control switches\n";
    return out;
}

RunOutput run_strategy_cmd(const Request& r) {
    const std::string* tag = r.flag("tag");
    const Strategy s = parse_strategy(*tag);
    const double horizon = number_flag(r, "horizon");
    const auto levels = list_flag(r, "levels");
    const State init = initial_state(r);
    CsvTable summary{{"level", "cumulative_infections", "peak_infected_humans", "final_infected_humans",
                      "final_infected_vectors", "final_eggs", "final_larvae"},
                     {}};
    auto h = state_header("t");
    h.insert(h.begin(), "level");
    h.emplace_back("cumulative_infections");
    CsvTable traj{h, {}};
    std::vector<Series> series;
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto run = run_strategy(s, r.params, levels[i], init, horizon, tolerances(r));
        const auto& m = run.summary;
        const std::string lv = fmt17(levels[i]);
        summary.add({lv, fmt17(m.cumulative_infections), fmt17(m.peak_infected_humans), fmt17(m.final_infected_humans),
                     fmt17(m.final_infected_vectors), fmt17(m.final_eggs), fmt17(m.final_larvae)});
        add_trajectory(traj, run.trajectory, &lv);
        char label[64];
        std::snprintf(label, sizeof label, "level %.3g", levels[i]);
        series.push_back(infected_series(run.trajectory, true, label, colors[i % 7]));
    }
    const std::string title = std::string("Strategy ") + strategy_tag(s) + ": " + strategy_description(s);
    return {{{"strategy.csv", csv_text(summary)},
             {"strategy_trajectories.csv", csv_text(traj)},
             {"strategy.svg", svg_lines({title, "days", "E_h + I_h"}, series)}},
            {},
            0};
}

RunOutput run_local(const Request& r) {
    const auto idx = local_indices(effective(r.params, r.variant));
    CsvTable t{{"parameter", "index"}, {}};
    std::vector<std::pair<double, std::string>> order;
    for (const auto& li : idx) {
        t.add({li.parameter, fmt17(li.index)});
        order.emplace_back(li.index, li.parameter);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return std::abs(a.first) > std::abs(b.first); });
    std::vector<std::string> names;
    std::vector<double> values;
    for (const auto& [v, n] : order) names.push_back(n), values.push_back(v);
    return {{{"sensitivity_local.csv", csv_text(t)},
             {"sensitivity_local.svg", svg_tornado({"Local sensitivity of R0", "index", ""}, names, values)}},
            {},
            0};
}

RunOutput run_global(const Request& r) {
    LhsConfig cfg;
    cfg.samples = int_flag(r, "n");
    const double seed = number_flag(r, "seed");
    if (seed < 0 || seed != std::floor(seed) || seed > 9007199254740992.0)
        throw ValidationError("seed", "--seed expects a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.ranges = r.ranges;
    const auto rep = global_analysis(r.params, cfg, int_flag(r, "threads"));
    CsvTable t{{"parameter", "prcc"}, {}};
    std::vector<std::pair<double, std::string>> order;
    for (const auto& e : rep.prcc) {
        t.add({e.parameter, e.applicable ? fmt17(e.prcc) : "NA"});
        if (e.applicable) order.emplace_back(e.prcc, e.parameter);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return std::abs(a.first) > std::abs(b.first); });
    std::vector<std::string> names;
    std::vector<double> values;
    for (const auto& [v, n] : order) names.push_back(n), values.push_back(v);
    CsvTable stats{{"mean", "std", "p_gt_1"}, {{fmt17(rep.stats.mean), fmt17(rep.stats.std), fmt17(rep.stats.p_gt_1)}}};
    std::vector<double> r0(rep.r0.data(), rep.r0.data() + rep.r0.size());
    char line[160];
    std::snprintf(line, sizeof line, "mean,std,p_gt_1\n%.6g,%.6g,%.6g\n", rep.stats.mean, rep.stats.std,
                  rep.stats.p_gt_1);
    return {{{"sensitivity_global.csv", csv_text(t)},
             {"sensitivity_stats.csv", csv_text(stats)},
             {"prcc.svg", svg_tornado({"PRCC with R0", "PRCC", ""}, names, values)},
             {"r0_histogram.svg", svg_histogram({"Sampled R0", "R0", "count"}, r0, 40)}},
            line,
            0};
}

RunOutput run_selfcheck(const Request&) {
    CsvTable t{{"criterion", "name", "status", "detail"}, {}};
    CsvTable d{{"criterion", "diagnostic"}, {}};
    RunOutput out;
    for (int n : in_process_criteria()) {
        const auto res = run_criterion(n);
        t.add({std::to_string(n), res.name, res.pass ? "PASS" : "FAIL", res.detail});
        for (const auto& line : res.diagnostics) d.add({std::to_string(n), line});
        out.failures += !res.pass;
        char buf[96];
        std::snprintf(buf, sizeof buf, "criterion %d %s (%.2f s)\n", n, res.pass ? "PASS" : "FAIL", res.seconds);
        out.summary += buf;
    }
    out.files = {{"selfcheck.csv", csv_text(t)}, {"selfcheck_diagnostics.csv", csv_text(d)}};
    return out;
}

}  // namespace

Request resolve(const Request& req) {
    Request r = req;
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), r.command) == names.end())
        throw ValidationError("command", "unknown command '" + r.command + "'");
    validate(r.params);
    const State start = strategy_initial_state();
    const std::string init = join(std::vector<double>(start.begin(), start.end()));
    if (r.command == "bifurcation") {
        default_flag(r, "beta-min", "0");
        if (!r.flag("beta-max")) {
            // the reproduction number grows like sqrt(beta_hv); aim for 1.5
            const double rep = variant_reproduction_number(r.params, r.variant);
            const double hi = rep > 0.0 ? std::min(1.0, r.params.beta_hv * (1.5 / rep) * (1.5 / rep)) : 1.0;
            r.set_flag("beta-max", fmt17(hi));
        }
        default_flag(r, "points", "200");
        default_flag(r, "threads", "0");
    } else if (r.command == "simulate") {
        default_flag(r, "t-end", "500");
        default_flag(r, "dt", "1");
        default_flag(r, "rtol", "1e-08");
        default_flag(r, "atol", "1e-10");
        default_flag(r, "init", init);
    } else if (r.command == "strategy") {
        if (!r.flag("tag")) throw ValidationError("tag", "strategy needs a tag A-F");
        const Strategy s = parse_strategy(*r.flag("tag"));
        default_flag(r, "levels", join(default_levels(s)));
        default_flag(r, "horizon", fmt17(kStrategyHorizon));
        default_flag(r, "rtol", "1e-08");
        default_flag(r, "atol", "1e-10");
        default_flag(r, "init", init);
    } else if (r.command == "sensitivity-global") {
        default_flag(r, "n", "5000");
        default_flag(r, "seed", "1");
        default_flag(r, "threads", "0");
        if (r.ranges.empty()) r.ranges = default_ranges(r.params);
    }
    return r;
}

RunOutput execute(const Request& req) {
    const Request r = resolve(req);
    if (r.command == "thresholds") return run_thresholds(r);
    if (r.command == "equilibria") return run_equilibria(r);
    if (r.command == "bifurcation") return run_bifurcation(r);
    if (r.command == "simulate") return run_simulate(r);
    if (r.command == "strategy") return run_strategy_cmd(r);
    if (r.command == "sensitivity-local") return run_local(r);
    if (r.command == "sensitivity-global") return run_global(r);
    return run_selfcheck(r);
}

RunManifest make_manifest(const Request& r, const RunOutput& out) {
    RunManifest m;
    m.set("tool", "arbo");
    m.set("tool_version", kToolVersion);
    m.set("command", r.command);
    m.set("variant", variant_name(r.variant));
    for (const auto& s : param_specs()) m.set(std::string("param.") + s.key, fmt17(r.params.*s.field));
    std::string defaulted;
    for (const auto& k : r.defaulted) defaulted += (defaulted.empty() ? "" : ",") + k;
    m.set("defaulted", defaulted);
    for (std::size_t i = 0; i < r.schedule.entries.size(); ++i) {
        const auto& e = r.schedule.entries[i];
        m.set("pulse." + std::to_string(i), std::string(control_name(e.control)) + " " + fmt17(e.level) + " " +
                                                fmt17(e.period) + " " + fmt17(e.duration) + " " + fmt17(e.start) +
                                                " " + fmt17(e.end));
    }
    for (const auto& [k, v] : r.flags) m.set("flag." + k, v);
    for (const auto& rg : r.ranges) m.set("range." + rg.parameter, fmt17(rg.lo) + " " + fmt17(rg.hi));
    for (const auto& f : out.files) m.set("output." + f.name, sha256_hex(f.content));
    return m;
}

Request request_from_manifest(const RunManifest& m) {
    Request r;
    const auto cmd = m.get("command");
    if (!cmd) throw IoError("manifest has no command");
    r.command = *cmd;
    if (const auto v = m.get("variant")) r.variant = parse_variant(*v);
    for (const auto& [k, v] : m.entries()) {
        auto rest = [&](const char* prefix) -> std::optional<std::string> {
            const std::string p(prefix);
            if (k.compare(0, p.size(), p) == 0) return k.substr(p.size());
            return std::nullopt;
        };
        if (auto key = rest("param.")) {
            const auto x = parse_number(v);
            if (!x) throw IoError("manifest: bad value for " + k);
            set_param(r.params, *key, *x);
        } else if (auto name = rest("flag.")) {
            r.set_flag(*name, v);
        } else if (rest("pulse.")) {
            std::istringstream ss(v);
            std::string control;
            PulseEntry e{};
            ss >> control >> e.level >> e.period >> e.duration >> e.start >> e.end;
            if (!ss) throw IoError("manifest: bad pulse entry " + k);
            e.control = parse_control(control);
            r.schedule.entries.push_back(e);
        } else if (auto key = rest("range.")) {
            std::istringstream ss(v);
            ParamRange pr{*key, 0.0, 0.0};
            ss >> pr.lo >> pr.hi;
            if (!ss) throw IoError("manifest: bad range entry " + k);
            r.ranges.push_back(pr);
        }
    }
    if (const auto d = m.get("defaulted")) {
        std::stringstream ss(*d);
        std::string k;
        while (std::getline(ss, k, ','))
            if (!k.empty()) r.defaulted.push_back(k);
    }
    return r;
}

void write_outputs(const std::string& dir, const Request& r, const RunOutput& out) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
    for (const auto& f : out.files) write_file((std::filesystem::path(dir) / f.name).string(), f.content);
    write_file((std::filesystem::path(dir) / "manifest.txt").string(), make_manifest(r, out).text());
}

ReplayReport replay(const std::string& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f) throw IoError("cannot open manifest '" + manifest_path + "'");
    const RunManifest m = RunManifest::parse(f);
    ReplayReport rep;
    rep.request = resolve(request_from_manifest(m));
    rep.output = execute(rep.request);
    for (const auto& file : rep.output.files) {
        const auto want = m.get("output." + file.name);
        if (!want || *want != sha256_hex(file.content)) {
            rep.identical = false;
            rep.mismatched.push_back(file.name);
        }
    }
    for (const auto& [k, v] : m.entries())
        if (k.rfind("output.", 0) == 0) {
            const std::string name = k.substr(7);
            const bool produced = std::any_of(rep.output.files.begin(), rep.output.files.end(),
                                              [&](const Artifact& a) { return a.name == name; });
            if (!produced) {
                rep.identical = false;
                rep.mismatched.push_back(name);
            }
        }
    return rep;
}

}  // namespace arbo
