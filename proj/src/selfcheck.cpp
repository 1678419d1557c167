#include "arbo/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>

#include "arbo/equilibria.hpp"
#include "arbo/errors.hpp"
#include "arbo/rng.hpp"
#include "arbo/sensitivity.hpp"
#include "arbo/simulate.hpp"
#include "arbo/stability.hpp"
#include "arbo/thresholds.hpp"

namespace arbo {

namespace {

std::string format(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

CheckResult begin(int n, std::string name) {
    CheckResult r;
    r.criterion = n;
    r.name = std::move(name);
    return r;
}

bool within_rel(double x, double target, double rel) { return std::abs(x - target) <= rel * std::abs(target); }

// Draw every parameter uniformly from its default range around the baseline.
ModelParams random_params(CounterRng& rng) {
    static const auto ranges = default_ranges(baseline());
    ModelParams p;
    for (const auto& r : ranges) set_param(p, r.parameter, r.lo + (r.hi - r.lo) * rng.uniform());
    return p;
}

const ModelVariant kNoVaccination{Incidence::Standard, false, false};

// --- 1 ---

CheckResult threshold_oracle() {
    CheckResult r = begin(1, "threshold oracle equivalence");
    CounterRng rng(20240601, 1);
    int tested = 0, bad = 0;
    double worst = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    while (tested < 200) {
        const ModelParams p = random_params(rng);
        if (net_reproductive_number(p) <= 1.0) continue;
        ++tested;
        const double a = basic_reproduction_number(p), b = r0_via_ngm(p);
        const double rel = std::abs(a - b) / a;
        worst = std::max(worst, rel);
        if (rel > 1e-10) ++bad;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = bad == 0 && secs < 5.0;
    r.detail = format("200 draws, %d outside 1e-10 relative, worst %.3g", bad, worst);
    if (secs >= 5.0) r.diagnostics.push_back("runtime limit of 5 s exceeded");
    return r;
}

// --- 2 ---

struct NvCoefficients {
    double d2, d1, d0, disc, r_nv, sub;
};

NvCoefficients nv_coefficients(const ModelParams& p) {
    const auto poly = endemic_polynomial(p, kNoVaccination).coeffs;
    const ModelParams e = effective(p, kNoVaccination);
    return {poly[0], poly[1], poly[2], poly[1] * poly[1] - 4.0 * poly[0] * poly[2], r_nv(e), r_nv_subthreshold(e)};
}

CheckResult no_vaccination_coefficients() {
    CheckResult r = begin(2, "no-vaccination coefficients");
    const NvCoefficients want{-0.0263, 4.8763e-4, -3.5031e-7, 2.0093e-7, 0.2725, 0.0216};
    auto line = [&](const char* label, const NvCoefficients& c) {
        return format("%s d2=%.5g d1=%.5g d0=%.5g disc=%.5g R_nv=%.5g R_nv_subthreshold=%.5g", label, c.d2, c.d1,
                      c.d0, c.disc, c.r_nv, c.sub);
    };
    const auto got = nv_coefficients(no_vaccination_illustration());
    const double g[] = {got.d2, got.d1, got.d0, got.disc, got.r_nv, got.sub};
    const double w[] = {want.d2, want.d1, want.d0, want.disc, want.r_nv, want.sub};
    const char* names[] = {"d2", "d1", "d0", "disc", "R_nv", "R_nv_subthreshold"};
    std::string off;
    for (int i = 0; i < 6; ++i)
        if (!within_rel(g[i], w[i], 0.01)) off += std::string(off.empty() ? "" : " ") + names[i];
    r.pass = off.empty();
    r.detail = line("stated set:", got) + (off.empty() ? "" : "; outside 1%: " + off);
    r.diagnostics.push_back(line("reconstructed set:", nv_coefficients(no_vaccination_reconstructed())));
    return r;
}

// --- 3 ---

std::string compare_printed(const Equilibrium& e, const std::array<double, 10>& printed, int& misses) {
    static const std::size_t idx[] = {Sh, Eh, Ih, Rh, Sv, Ev, Iv, Egg, Lar, Pup};
    std::string out;
    for (int i = 0; i < 10; ++i) {
        const double v = std::round(e.state[idx[i]]);
        if (std::abs(v - printed[static_cast<std::size_t>(i)]) > 1.0) {
            ++misses;
            out += format(" %s=%.0f(printed %.0f)", state_names()[idx[i]], v, printed[static_cast<std::size_t>(i)]);
        }
    }
    return out;
}

CheckResult no_vaccination_equilibria() {
    CheckResult r = begin(3, "no-vaccination endemic equilibria");
    const std::array<double, 10> stable{281, 70, 5, 1207, 5739, 182, 44, 22180, 10201, 9977};
    const std::array<double, 10> unstable{6333, 67, 4, 1147, 5936, 37, 2, 22180, 10201, 9977};
    auto assess = [&](const ModelParams& p, std::string& text) {
        const auto sol = solve_endemic(p, kNoVaccination);
        if (sol.equilibria.size() != 2) {
            text = format("%zu endemic equilibria (expected 2)", sol.equilibria.size());
            return false;
        }
        // ascending lambda: the first is the low-prevalence one
        const auto& lo = sol.equilibria[0];
        const auto& hi = sol.equilibria[1];
        int misses = 0;
        const std::string d1 = compare_printed(hi, stable, misses);
        const std::string d2 = compare_printed(lo, unstable, misses);
        const bool verdicts = hi.stability == Stability::Stable && lo.stability == Stability::Unstable;
        text = format("high-prevalence %s, low-prevalence %s, %d components off by >1", stability_name(hi.stability),
                      stability_name(lo.stability), misses);
        if (!d1.empty()) text += ";" + d1;
        if (!d2.empty()) text += ";" + d2;
        return verdicts && misses == 0;
    };
    std::string text;
    r.pass = assess(no_vaccination_illustration(), text);
    r.detail = "stated set: " + text;
    assess(no_vaccination_reconstructed(), text);
    r.diagnostics.push_back("reconstructed set: " + text);
    return r;
}

// --- 4 ---

CheckResult bifurcation_coefficient_values() {
    CheckResult r = begin(4, "bifurcation coefficients");
    const auto b = bifurcation_coefficients(backward_figure());
    const auto f = bifurcation_coefficients(forward_figure());
    const bool ok_b = std::abs(b.A1 - 0.0114) <= 1e-3 && std::abs(b.A2 - 1.1393) <= 1e-2;
    const bool ok_f = std::abs(f.A1 + 2.4223) <= 1e-2 && std::abs(f.A2 - 0.8333) <= 1e-2;
    r.pass = ok_b && ok_f;
    r.detail = format("backward set: A1=%.4g A2=%.4g (%s); forward set: A1=%.4g A2=%.4g (%s)", b.A1, b.A2,
                      direction_name(b.direction), f.A1, f.A2, direction_name(f.direction));
    r.diagnostics.push_back(format("backward set: beta*=%.6g, finite-difference A1=%.4g A2=%.4g", b.beta_critical,
                                   b.A1_fd, b.A2_fd));
    r.diagnostics.push_back(format("forward set: beta*=%.6g, finite-difference A1=%.4g A2=%.4g", f.beta_critical,
                                   f.A1_fd, f.A2_fd));
    for (const auto* rep : {&b, &f})
        if (rep->gamma_mismatch)
            r.diagnostics.push_back(format("%s set: transcribed Gamma1-Gamma2=%.4g disagrees with A1=%.4g by >5%%; "
                                           "derivative value governs",
                                           rep == &b ? "backward" : "forward", rep->gamma_diff_printed, rep->A1));
    return r;
}

// --- 5 ---

double beta_for_reproduction(const ModelParams& p, const ModelVariant& v, double target) {
    // the reproduction number scales with sqrt(beta_hv)
    const double r = variant_reproduction_number(p, v);
    return r > 0.0 ? std::min(1.0, p.beta_hv * (target / r) * (target / r)) : 1.0;
}

CheckResult bifurcation_window() {
    CheckResult r = begin(5, "bifurcation window");
    const auto t0 = std::chrono::steady_clock::now();
    const auto w = coexistence_window(backward_figure(), {}, 0.0, 0.2810, 200);
    const bool ok2 = w.found && std::abs(w.R_lo - 0.2894) <= 0.01 && std::abs(w.R_hi - 1.0) <= 0.01 &&
                     std::abs(w.beta_lo - 0.0105) <= 5e-4 && std::abs(w.beta_hi - 0.1249) <= 5e-4;
    const ModelParams nv = no_vaccination_illustration();
    const auto w5 = coexistence_window(nv, kNoVaccination, 0.0, beta_for_reproduction(nv, kNoVaccination, 1.5), 200);
    const bool ok5 = w5.found && std::abs(w5.R_lo - 0.2286) <= 0.01 && std::abs(w5.R_hi - 1.0) <= 0.01;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = ok2 && ok5 && secs < 60.0;
    r.detail = format("full model: beta in (%.5f, %.5f), R0 in (%.4f, %.4f); no vaccination: ", w.beta_lo, w.beta_hi,
                      w.R_lo, w.R_hi);
    r.detail += w5.found ? format("R_nv in (%.4f, %.4f)", w5.R_lo, w5.R_hi) : std::string("no coexistence");
    const ModelParams rec = no_vaccination_reconstructed();
    const auto wr = coexistence_window(rec, kNoVaccination, 0.0, beta_for_reproduction(rec, kNoVaccination, 1.5), 200);
    if (wr.found)
        r.diagnostics.push_back(format("no vaccination, reconstructed set: R_nv in (%.4f, %.4f), beta_hv in (%.5f, %.5f)",
                                       wr.R_lo, wr.R_hi, wr.beta_lo, wr.beta_hi));
    if (secs >= 60.0) r.diagnostics.push_back("runtime limit of 60 s exceeded");
    return r;
}

// --- 6 ---

State figure_start(double susceptible_humans) {
    return {susceptible_humans, 10, 220, 100, 60, 3000, 400, 120, 10000, 5000, 3000};
}

State end_state(const ModelParams& p, const State& init, double horizon) {
    IntegrateOptions opts;
    opts.samples = {horizon};
    return integrate(p, {}, init, 0.0, horizon, {}, opts).states.back();
}

CheckResult bistability() {
    CheckResult r = begin(6, "bistability dynamics");
    const ModelParams p = backward_figure(0.0105);
    const auto sol = solve_endemic(p, {});
    const Equilibrium* endemic = nullptr;
    for (const auto& e : sol.equilibria)
        if (e.stability == Stability::Stable) endemic = &e;
    if (!endemic) {
        r.detail = "no stable endemic equilibrium at beta_hv = 0.0105";
        return r;
    }
    const State dfe = dfe_state(p);
    const State ic1 = figure_start(700), ic2 = figure_start(489100);
    State ic2_projected = ic2;
    const double scale = p.Lambda_h / p.mu_h / human_total(ic2);
    for (std::size_t i = Sh; i <= Rh; ++i) ic2_projected[i] *= scale;

    const double d1 = state_distance(end_state(p, ic1, 5000), endemic->state);
    const double d2 = state_distance(end_state(p, ic2, 5000), dfe);
    const double d2p = state_distance(end_state(p, ic2_projected, 5000), dfe);
    r.pass = d1 <= 1e-3 && d2 <= 1e-3;
    r.detail = format("t=5000: start 1 to endemic %.3g, start 2 to disease-free %.3g", d1, d2);
    r.diagnostics.push_back(format("start 2 projected into the feasible region: distance %.3g at t=5000", d2p));
    const double l1 = state_distance(end_state(p, ic1, 5e5), endemic->state);
    const double l2 = state_distance(end_state(p, ic2, 5e5), dfe);
    r.diagnostics.push_back(format("t=5e5: start 1 to endemic %.3g, start 2 to disease-free %.3g", l1, l2));
    return r;
}

// --- 7 ---

CheckResult local_sensitivity() {
    CheckResult r = begin(7, "local sensitivity table");
    const std::map<std::string, double> printed{
        {"a", 1.0},         {"sigma", -0.2911},   {"xi", -0.0566},       {"mu_v", -0.9190},   {"c_m", -0.2757},
        {"omega", 0.0565},  {"epsilon", -0.6223}, {"alpha_1", -0.25},    {"mu_E", -0.0171},   {"s", 0.5172},
        {"eta_h", 0.2067},  {"delta", -0.0020},   {"Lambda_h", -0.5},    {"gamma_h", -0.2064}, {"eta_1", -0.0000858},
        {"beta_hv", 0.5},   {"beta_vh", 0.5},     {"Gamma_E", 0.5},      {"Gamma_L", 0.5},    {"alpha_2", 0.5},
        {"eta_v", 0.1207},  {"mu_h", 0.4996},     {"gamma_v", 0.1174},   {"mu_P", -0.4810},   {"mu_L", -0.1026},
        {"theta", 0.4810},  {"mu_b", 0.0772},     {"l", 0.4489},         {"eta_2", -0.0770}};
    const auto got = local_indices(baseline());
    int misses = 0;
    std::string off;
    bool exact = true;
    for (const auto& li : got) {
        const double want = printed.at(li.parameter);
        if (std::abs(li.index - want) > 1e-3) {
            ++misses;
            off += format(" %s=%+.4f(printed %+.4f)", li.parameter.c_str(), li.index, want);
        }
        if (li.parameter == "a") exact = exact && li.analytic && li.index == 1.0;
        if (li.parameter == "beta_hv" || li.parameter == "beta_vh") exact = exact && li.analytic && li.index == 0.5;
    }
    r.pass = misses == 0 && exact;
    r.detail = format("%zu indices, %d outside 1e-3, structural indices %s", got.size(), misses,
                      exact ? "exact" : "NOT exact");
    if (!off.empty()) r.diagnostics.push_back("outside tolerance:" + off);
    return r;
}

// --- 8 ---

CheckResult global_sensitivity() {
    CheckResult r = begin(8, "global sensitivity");
    const std::vector<std::pair<std::string, int>> top8{{"alpha_1", -1}, {"alpha_2", 1}, {"beta_hv", 1},
                                                         {"beta_vh", 1},  {"theta", 1},   {"a", 1},
                                                         {"Gamma_L", 1},  {"mu_v", -1}};
    const ModelParams base = baseline();
    int alpha_min = 0, strong = 0, signs = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        LhsConfig cfg;
        cfg.seed = seed;
        cfg.ranges = default_ranges(base);
        const auto rep = global_analysis(base, cfg);
        std::map<std::string, double> v;
        std::string most_negative;
        double lowest = 2.0;
        for (const auto& e : rep.prcc) {
            v[e.parameter] = e.prcc;
            if (e.applicable && e.prcc < lowest) lowest = e.prcc, most_negative = e.parameter;
        }
        alpha_min += most_negative == "alpha_1";
        strong += v["alpha_2"] > 0.4 && v["beta_hv"] > 0.4 && v["beta_vh"] > 0.4 && v["theta"] > 0.4;
        bool pattern = true;
        for (const auto& [name, sign] : top8) pattern = pattern && v[name] * sign > 0.0;
        signs += pattern;
        if (seed == 1) {
            r.diagnostics.push_back(format("seed 1: mean R0 %.4f, std %.4f, P(R0>1) %.4f", rep.stats.mean,
                                           rep.stats.std, rep.stats.p_gt_1));
            r.diagnostics.push_back(format("seed 1: most negative %s (%.4f), alpha_1 %.4f, alpha_2 %.4f, beta_hv %.4f, "
                                           "beta_vh %.4f, theta %.4f",
                                           most_negative.c_str(), lowest, v["alpha_1"], v["alpha_2"], v["beta_hv"],
                                           v["beta_vh"], v["theta"]));
        }
    }
    r.pass = alpha_min == 10 && strong == 10 && signs == 10;
    r.detail = format("10 seeds x 5000: alpha_1 most negative in %d, {alpha_2, beta_hv, beta_vh, theta} > 0.4 in %d, "
                      "top-8 sign pattern in %d",
                      alpha_min, strong, signs);
    return r;
}

// --- 9 ---

// Random parameters with N <= 1, obtained by lowering the egg-laying rate.
ModelParams vector_free_params(CounterRng& rng) {
    ModelParams p = random_params(rng);
    const double target = 0.2 + 0.79 * rng.uniform();
    while (net_reproductive_number(p) > target) p.theta *= target / net_reproductive_number(p) * 0.999;
    return p;
}

State random_feasible_state(const ModelParams& p, CounterRng& rng) {
    const auto b = feasible_bounds(p);
    State x{};
    double w[5], sum = 0.0;
    for (double& wi : w) sum += (wi = rng.uniform() + 1e-3);
    const double humans = b.humans * rng.uniform();
    for (std::size_t i = 0; i < 5; ++i) x[i] = humans * w[i] / sum;
    double wv[3], sv = 0.0;
    for (double& wi : wv) sv += (wi = rng.uniform() + 1e-3);
    const double vectors = b.vectors * rng.uniform();
    for (std::size_t i = 0; i < 3; ++i) x[Sv + i] = vectors * wv[i] / sv;
    x[Egg] = b.eggs * rng.uniform();
    x[Lar] = b.larvae * rng.uniform();
    x[Pup] = b.pupae * rng.uniform();
    return x;
}

bool same_sets(const std::vector<Equilibrium>& a, const std::vector<Equilibrium>& b) {
    if (a.size() != b.size()) return false;
    for (const auto& e : a) {
        bool hit = false;
        for (const auto& f : b) hit = hit || state_distance(e.state, f.state) <= 1e-6;
        if (!hit) return false;
    }
    return true;
}

CheckResult dynamical_properties() {
    CheckResult r = begin(9, "dynamical-systems property suite");

    // Lyapunov function at the trivial equilibrium.
    CounterRng rng(20240602, 9);
    int lyap_bad = 0, part_bad = 0;
    double worst_rise = 0.0;
    for (int k = 0; k < 20; ++k) {
        const ModelParams p = vector_free_params(rng);
        const State x0 = random_feasible_state(p, rng);
        IntegrateOptions opts;
        opts.samples = sample_grid(0.0, 2000.0, 5.0);
        const auto tr = integrate(p, {}, x0, 0.0, 2000.0, {}, opts);
        const auto g = lyapunov_weights(p);
        bool mono = true, part_mono = true;
        double prev = lyapunov_trivial(tr.states[0], p), prev_part = 0.0;
        for (std::size_t i = Sv; i < kStateDim; ++i) prev_part += g[i] * tr.states[0][i];
        for (std::size_t s = 1; s < tr.states.size(); ++s) {
            const double cur = lyapunov_trivial(tr.states[s], p);
            double part = 0.0;
            for (std::size_t i = Sv; i < kStateDim; ++i) part += g[i] * tr.states[s][i];
            if (cur > prev + 1e-8 * std::max(1.0, std::abs(prev))) {
                mono = false;
                worst_rise = std::max(worst_rise, (cur - prev) / std::max(1.0, std::abs(prev)));
            }
            if (part > prev_part + 1e-8 * std::max(1.0, std::abs(prev_part))) part_mono = false;
            prev = cur;
            prev_part = part;
        }
        lyap_bad += !mono;
        part_bad += !part_mono;
    }

    // Routh-Hurwitz verdict against the roots of the same polynomial.
    int rh_bad = 0, rh_stable = 0;
    for (int k = 0; k < 100; ++k) {
        ModelParams p = random_params(rng);
        p.theta *= std::pow(10.0, -2.0 * rng.uniform());
        const auto rh = routh_hurwitz_phi2(p);
        double top = -INFINITY;
        for (const auto& z : poly_roots(phi2(p))) top = std::max(top, z.real());
        rh_bad += rh.satisfied != (top < 0.0);
        rh_stable += rh.satisfied;
    }

    // Endemic solutions against the Newton search.
    std::vector<std::pair<ModelParams, ModelVariant>> cases{
        {backward_figure(0.0105), {}},
        {backward_figure(0.05), {}},
        {backward_figure(0.2), {}},
        {forward_figure(), {}},
        {baseline(), {}},
        {baseline(), {Incidence::MassAction, true, false}},
        {backward_figure(0.05), {Incidence::Standard, true, true}},
        {no_vaccination_reconstructed(), kNoVaccination},
    };
    {
        ModelParams f = forward_figure();
        f.beta_hv = 0.3;
        cases.push_back({f, {}});
    }
    for (int k = 0; k < 6; ++k) cases.push_back({random_params(rng), {}});
    int residual_bad = 0, set_bad = 0, found = 0;
    double worst_residual = 0.0;
    for (const auto& [p, v] : cases) {
        const auto sol = solve_endemic(p, v);
        for (const auto& e : sol.equilibria) {
            worst_residual = std::max(worst_residual, e.residual);
            residual_bad += e.residual > 1e-6;
        }
        found += static_cast<int>(sol.equilibria.size());
        set_bad += !same_sets(sol.equilibria, newton_steady_states(p, v));
    }

    r.pass = lyap_bad == 0 && rh_bad == 0 && residual_bad == 0 && set_bad == 0;
    r.detail = format("Lyapunov rises in %d/20 runs; Routh-Hurwitz mismatches %d/100; endemic residual failures %d, "
                      "set mismatches %d/%zu",
                      lyap_bad, rh_bad, residual_bad, set_bad, cases.size());
    r.diagnostics.push_back(format("Lyapunov worst relative rise %.3g; vector/aquatic part rises in %d/20 runs",
                                   worst_rise, part_bad));
    r.diagnostics.push_back(format("Routh-Hurwitz: %d of 100 draws satisfied", rh_stable));
    r.diagnostics.push_back(
        format("%d endemic equilibria over %zu cases, worst residual %.3g", found, cases.size(), worst_residual));
    return r;
}

}  // namespace

std::vector<int> in_process_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9}; }

CheckResult run_criterion(int n) {
    using Fn = CheckResult (*)();
    static const Fn table[] = {threshold_oracle,   no_vaccination_coefficients, no_vaccination_equilibria,
                               bifurcation_coefficient_values, bifurcation_window, bistability,
                               local_sensitivity,  global_sensitivity,          dynamical_properties};
    if (n < 1 || n > 9) throw ValidationError("criterion", "criterion " + std::to_string(n) + " is not run in-process");
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = table[n - 1]();
    } catch (const std::exception& e) {
        r = begin(n, "criterion " + std::to_string(n));
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace arbo
