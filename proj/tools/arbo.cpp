#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "arbo.h"

namespace {

struct Common {
    std::string config, preset, variant, out;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config, "key = value parameter file")->check(CLI::ExistingFile);
    sub->add_option("--preset", c.preset,
                    "baseline | backward-figure | forward-figure | no-vaccination-illustration | "
                    "no-vaccination-reconstructed");
    sub->add_option("--set", c.sets, "override a parameter, key=value (repeatable)");
    sub->add_option("--variant", c.variant, "full | no-vaccination | mass-action, optionally +delta-zero");
    sub->add_option("-o,--out", c.out, "write CSV, SVG and manifest.txt into this directory");
}

using RequestPtr = std::unique_ptr<arbo_request, decltype(&arbo_request_destroy)>;
using ResultPtr = std::unique_ptr<arbo_result, decltype(&arbo_result_destroy)>;

int report(arbo_status s) {
    std::fprintf(stderr, "error: %s\n", arbo_last_error());
    return s == ARBO_ERR_INTERNAL || s == ARBO_ERR_ARGUMENT ? 2 : static_cast<int>(s);
}

#define CHECK(call)                                \
    do {                                           \
        const arbo_status status_ = (call);        \
        if (status_ != ARBO_OK) return report(status_); \
    } while (0)

int emit(const arbo_result* res, const std::string& out) {
    if (out.empty()) {
        if (arbo_result_file_count(res) > 0) std::fputs(arbo_result_file_content(res, 0), stdout);
    } else {
        CHECK(arbo_result_write(res, out.c_str()));
        for (std::size_t i = 0; i < arbo_result_file_count(res); ++i)
            std::fprintf(stderr, "wrote %s/%s\n", out.c_str(), arbo_result_file_name(res, i));
        std::fprintf(stderr, "wrote %s/manifest.txt\n", out.c_str());
    }
    std::fputs(arbo_result_summary(res), stderr);
    return 0;
}

int run(const std::string& command, const Common& c, const std::vector<std::pair<std::string, std::string>>& flags,
        const std::string& schedule = {}, const std::string& ranges = {}) {
    arbo_request* raw = nullptr;
    CHECK(arbo_request_create(command.c_str(), &raw));
    RequestPtr req(raw, arbo_request_destroy);
    if (!c.preset.empty()) CHECK(arbo_request_preset(req.get(), c.preset.c_str()));
    if (!c.config.empty()) CHECK(arbo_request_load_config(req.get(), c.config.c_str()));
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
            return 2;
        }
        char* end = nullptr;
        const std::string value = kv.substr(eq + 1);
        const double x = std::strtod(value.c_str(), &end);
        if (value.empty() || *end != '\0') {
            std::fprintf(stderr, "error: --set %s: '%s' is not a number\n", kv.substr(0, eq).c_str(), value.c_str());
            return 2;
        }
        CHECK(arbo_request_set_param(req.get(), kv.substr(0, eq).c_str(), x));
    }
    if (!c.variant.empty()) CHECK(arbo_request_set_variant(req.get(), c.variant.c_str()));
    if (!schedule.empty()) CHECK(arbo_request_load_schedule(req.get(), schedule.c_str()));
    if (!ranges.empty()) CHECK(arbo_request_load_ranges(req.get(), ranges.c_str()));
    for (const auto& [k, v] : flags)
        if (!v.empty()) CHECK(arbo_request_set_flag(req.get(), k.c_str(), v.c_str()));

    arbo_result* res_raw = nullptr;
    CHECK(arbo_run(req.get(), &res_raw));
    ResultPtr res(res_raw, arbo_result_destroy);
    if (const int rc = emit(res.get(), c.out); rc != 0) return rc;
    return arbo_result_failures(res.get()) > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arboviral transmission model toolkit: thresholds, equilibria, bifurcation, simulation, sensitivity"};
    app.set_version_flag("--version", arbo_version());
    app.require_subcommand(1);

    Common thr, eq, bif, sim, strat, loc, glob, chk;

    auto* c_thr = app.add_subcommand("thresholds", "reproduction numbers and thresholds as CSV");
    add_common(c_thr, thr);

    auto* c_eq = app.add_subcommand("equilibria", "all equilibria with residual and stability");
    add_common(c_eq, eq);

    std::string beta_min, beta_max, points, threads;
    auto* c_bif = app.add_subcommand("bifurcation", "equilibrium branches over beta_hv");
    add_common(c_bif, bif);
    c_bif->add_option("--beta-min", beta_min, "lower end of the sweep (default 0)");
    c_bif->add_option("--beta-max", beta_max, "upper end (default: where the reproduction number reaches 1.5)");
    c_bif->add_option("--points", points, "sweep points (default 200)");
    c_bif->add_option("--threads", threads, "worker threads, 0 = all cores");

    std::string t_end, dt, rtol, atol, init, schedule;
    auto* c_sim = app.add_subcommand("simulate", "integrate the model, optionally with pulse controls");
    add_common(c_sim, sim);
    c_sim->add_option("--t-end", t_end, "horizon in days (default 500)");
    c_sim->add_option("--dt", dt, "output spacing in days (default 1)");
    c_sim->add_option("--rtol", rtol, "relative tolerance (default 1e-8)");
    c_sim->add_option("--atol", atol, "absolute tolerance (default 1e-10)");
    c_sim->add_option("--init", init, "11 comma-separated initial values S_h,V_h,E_h,I_h,R_h,S_v,E_v,I_v,E,L,P");
    c_sim->add_option("--schedule", schedule, "file with pulse = control level period duration start end lines")
        ->check(CLI::ExistingFile);

    std::string tag, levels, horizon, s_rtol, s_atol, s_init;
    auto* c_strat = app.add_subcommand("strategy", "control strategy A-F over a grid of levels");
    add_common(c_strat, strat);
    c_strat->add_option("tag", tag, "strategy tag A-F")->required();
    c_strat->add_option("--levels", levels, "comma-separated control levels");
    c_strat->add_option("--horizon", horizon, "days (default 500)");
    c_strat->add_option("--rtol", s_rtol, "relative tolerance (default 1e-8)");
    c_strat->add_option("--atol", s_atol, "absolute tolerance (default 1e-10)");
    c_strat->add_option("--init", s_init, "11 comma-separated initial values");

    auto* c_sens = app.add_subcommand("sensitivity", "local or global sensitivity of R0");
    c_sens->require_subcommand(1);
    auto* c_loc = c_sens->add_subcommand("local", "normalized sensitivity indices");
    add_common(c_loc, loc);
    std::string n, seed, ranges, g_threads;
    auto* c_glob = c_sens->add_subcommand("global", "Latin hypercube sample and partial rank correlations");
    add_common(c_glob, glob);
    c_glob->add_option("--n", n, "samples (default 5000)");
    c_glob->add_option("--seed", seed, "64-bit seed (default 1)");
    c_glob->add_option("--ranges", ranges, "file of key = lo hi lines")->check(CLI::ExistingFile);
    c_glob->add_option("--threads", g_threads, "worker threads, 0 = all cores");

    auto* c_chk = app.add_subcommand("selfcheck", "run the built-in reproduction checks");
    c_chk->add_option("-o,--out", chk.out, "write CSV and manifest.txt into this directory");

    std::string manifest, replay_out;
    auto* c_rep = app.add_subcommand("replay", "re-run a manifest and compare output digests");
    c_rep->add_option("manifest", manifest, "manifest.txt of an earlier run")->required()->check(CLI::ExistingFile);
    c_rep->add_option("-o,--out", replay_out, "write the regenerated outputs here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*c_thr) return run("thresholds", thr, {});
    if (*c_eq) return run("equilibria", eq, {});
    if (*c_bif)
        return run("bifurcation", bif, {{"beta-min", beta_min}, {"beta-max", beta_max}, {"points", points},
                                        {"threads", threads}});
    if (*c_sim)
        return run("simulate", sim, {{"t-end", t_end}, {"dt", dt}, {"rtol", rtol}, {"atol", atol}, {"init", init}},
                   schedule);
    if (*c_strat)
        return run("strategy", strat, {{"tag", tag}, {"levels", levels}, {"horizon", horizon}, {"rtol", s_rtol},
                                       {"atol", s_atol}, {"init", s_init}});
    if (*c_loc) return run("sensitivity-local", loc, {});
    if (*c_glob) return run("sensitivity-global", glob, {{"n", n}, {"seed", seed}, {"threads", g_threads}}, {}, ranges);
    if (*c_chk) return run("selfcheck", chk, {});

    arbo_result* raw = nullptr;
    int identical = 0;
    CHECK(arbo_replay(manifest.c_str(), &raw, &identical));
    ResultPtr res(raw, arbo_result_destroy);
    if (!replay_out.empty()) CHECK(arbo_result_write(res.get(), replay_out.c_str()));
    std::fputs(arbo_result_summary(res.get()), stderr);
    std::fprintf(stderr, "%s\n", identical ? "replay identical" : "replay differs");
    return identical ? 0 : 1;
}
