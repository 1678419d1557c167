#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "arbo/params.hpp"
#include "arbo/state.hpp"

namespace arbo {

enum class Control { Alpha1, Cm, Eta1, Eta2, Alpha2 };

const char* control_name(Control c);
Control parse_control(std::string_view name);

// The control takes `level` during [start + kT, start + kT + duration) for
// every k with the window start + kT < end, and its baseline otherwise.
struct PulseEntry {
    Control control;
    double level;
    double period;
    double duration;
    double start;
    double end;
};

struct PulseSchedule {
    std::vector<PulseEntry> entries;

    // Later entries win when several cover the same control at time t.
    ControlOverrides active(const ControlOverrides& baseline, double t) const;
    // Pulse window edges in (t0, t1), ascending.
    std::vector<double> switch_times(double t0, double t1) const;
    // Throws ValidationError for bad durations, windows or levels.
    void validate(double horizon) const;
};

struct Tolerances {
    double rel = 1e-8;
    double abs = 1e-10;
};

constexpr double kPositivityTol = 1e-6;  // larger negative excursions are errors

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> cumulative_infections;
    std::vector<double> events;  // instants where the active controls change
};

struct IntegrateOptions {
    Tolerances tol;
    // Output instants within [t0, t1]; empty means every accepted step.
    std::vector<double> samples;
};

Trajectory integrate(const ModelParams& p, const ModelVariant& v, const State& init, double t0, double t1,
                     const PulseSchedule& schedule, const IntegrateOptions& opts = {});

// Evenly spaced instants t0, t0 + dt, ..., t1.
std::vector<double> sample_grid(double t0, double t1, double dt);

enum class Strategy { A, B, C, D, E, F };

State strategy_initial_state();
constexpr double kStrategyHorizon = 500.0;

Strategy parse_strategy(std::string_view tag);
char strategy_tag(Strategy s);
std::string strategy_description(Strategy s);
std::vector<double> default_levels(Strategy s);


struct StrategySummary {
    double cumulative_infections;
    double peak_infected_humans;   // max of E_h + I_h over samples
    double final_infected_humans;
    double final_infected_vectors;
    double final_eggs;
    double final_larvae;
};

// Parameters and schedule a strategy uses at a given level.
struct StrategySetup {
    ModelParams params;
    PulseSchedule schedule;
};

StrategySetup strategy_setup(Strategy s, const ModelParams& p, double level, double horizon = kStrategyHorizon);

struct StrategyRun {
    double level;
    Trajectory trajectory;
    StrategySummary summary;
};

StrategyRun run_strategy(Strategy s, const ModelParams& p, double level, const State& init = strategy_initial_state(),
                         double horizon = kStrategyHorizon, const Tolerances& tol = {});

StrategySummary summarize(const Trajectory& tr);

}  // namespace arbo
