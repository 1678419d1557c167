#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "arbo/errors.hpp"
#include "arbo/equilibria.hpp"
#include "arbo/rng.hpp"
#include "arbo/simulate.hpp"
#include "arbo/thresholds.hpp"

using namespace arbo;

namespace {

const ModelVariant kFull{};

IntegrateOptions grid(double t1, double dt, Tolerances tol = {}) { return {tol, sample_grid(0.0, t1, dt)}; }

double infected_vectors(const State& x) { return x[Ev] + x[Iv]; }

}  // namespace

TEST_CASE("trivial equilibrium is left unchanged, even under pulses") {
    const ModelParams p = baseline();
    const State e0 = trivial_state(p);
    PulseSchedule sched;
    sched.entries.push_back({Control::Cm, 0.5, 7.0, 1.0, 0.0, 100.0});
    sched.entries.push_back({Control::Eta1, 0.5, 15.0, 1.0, 0.0, 100.0});
    const auto tr = integrate(p, kFull, e0, 0.0, 200.0, sched, grid(200.0, 10.0));
    for (const auto& x : tr.states) CHECK(state_distance(x, e0) < 1e-12);
}

TEST_CASE("vectors die out when the net reproductive number is at most 1") {
    CounterRng rng(31, 0);
    for (int i = 0; i < 5; ++i) {
        ModelParams p = baseline();
        p.theta = 0.005 * (0.2 + rng.uniform());
        REQUIRE(net_reproductive_number(p) <= 1.0);
        const State x0 = strategy_initial_state();
        const auto tr = integrate(p, kFull, x0, 0.0, 2000.0, {}, grid(2000.0, 2000.0));
        const State& end = tr.states.back();
        CHECK(vector_total(end) <= 1e-3 * vector_total(x0));
        CHECK(end[Egg] <= 1e-3 * x0[Egg]);
    }
}

TEST_CASE("tighter tolerance converges") {
    const ModelParams p = baseline();
    const State x0 = strategy_initial_state();
    const auto a = integrate(p, kFull, x0, 0.0, 300.0, {}, grid(300.0, 50.0, {1e-8, 1e-10}));
    const auto b = integrate(p, kFull, x0, 0.0, 300.0, {}, grid(300.0, 50.0, {1e-10, 1e-12}));
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(state_distance(a.states[i], b.states[i]) < 1e-5);
}

TEST_CASE("identical inputs give bit-identical trajectories") {
    const auto setup = strategy_setup(Strategy::C, baseline(), 0.5);
    const auto a = integrate(setup.params, kFull, strategy_initial_state(), 0.0, 200.0, setup.schedule, grid(200.0, 1.0));
    const auto b = integrate(setup.params, kFull, strategy_initial_state(), 0.0, 200.0, setup.schedule, grid(200.0, 1.0));
    REQUIRE(a.states.size() == b.states.size());
    CHECK(std::memcmp(a.states.data(), b.states.data(), a.states.size() * sizeof(State)) == 0);
    CHECK(a.cumulative_infections == b.cumulative_infections);
}

TEST_CASE("states stay nonnegative and cumulative infections never decrease") {
    for (Strategy s : {Strategy::A, Strategy::B, Strategy::C, Strategy::D, Strategy::E, Strategy::F}) {
        for (double level : default_levels(s)) {
            const auto run = run_strategy(s, baseline(), level, strategy_initial_state(), 200.0);
            const auto& tr = run.trajectory;
            for (const auto& x : tr.states)
                for (double c : x) CHECK(c >= -kPositivityTol);
            for (std::size_t i = 1; i < tr.cumulative_infections.size(); ++i)
                CHECK(tr.cumulative_infections[i] >= tr.cumulative_infections[i - 1]);
        }
    }
}

TEST_CASE("personal protection lowers infections and leaves the aquatic stages alone") {
    double prev = INFINITY;
    double eggs = -1.0, larvae = -1.0;
    for (double level : default_levels(Strategy::A)) {
        const auto m = run_strategy(Strategy::A, baseline(), level).summary;
        CHECK(m.cumulative_infections < prev);
        prev = m.cumulative_infections;
        if (eggs < 0.0) {
            eggs = m.final_eggs;
            larvae = m.final_larvae;
        }
        CHECK(m.final_eggs == doctest::Approx(eggs).epsilon(1e-6));
        CHECK(m.final_larvae == doctest::Approx(larvae).epsilon(1e-6));
    }
}

TEST_CASE("a zero-level pulse is the same as no control") {
    const auto run = run_strategy(Strategy::B, baseline(), 0.0);
    const auto setup = strategy_setup(Strategy::B, baseline(), 0.0);
    const auto plain = integrate(setup.params, kFull, strategy_initial_state(), 0.0, kStrategyHorizon, {},
                                 grid(kStrategyHorizon, 1.0));
    REQUIRE(run.trajectory.states.size() == plain.states.size());
    for (std::size_t i = 0; i < plain.states.size(); ++i)
        CHECK(state_distance(run.trajectory.states[i], plain.states[i]) < 1e-10);
}

TEST_CASE("stronger adulticide leaves fewer infected vectors") {
    double prev = INFINITY;
    for (double level : {0.0, 0.1, 0.3, 0.6, 1.0}) {
        ModelParams p = baseline();
        p.c_m = level;
        const auto tr = integrate(p, kFull, strategy_initial_state(), 0.0, 100.0, {}, grid(100.0, 100.0));
        const double v = infected_vectors(tr.states.back());
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("splitting a pulse window does not change the result") {
    const ModelParams p = baseline();
    PulseSchedule one, two;
    one.entries.push_back({Control::Cm, 0.4, 7.0, 1.0, 0.0, 98.0});
    two.entries.push_back({Control::Cm, 0.4, 7.0, 1.0, 0.0, 49.0});
    two.entries.push_back({Control::Cm, 0.4, 7.0, 1.0, 49.0, 98.0});
    const auto a = integrate(p, kFull, strategy_initial_state(), 0.0, 150.0, one, grid(150.0, 10.0));
    const auto b = integrate(p, kFull, strategy_initial_state(), 0.0, 150.0, two, grid(150.0, 10.0));
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(state_distance(a.states[i], b.states[i]) < 1e-6);
}

TEST_CASE("switch instants are recorded and appear in step output") {
    PulseSchedule sched;
    sched.entries.push_back({Control::Cm, 0.5, 7.0, 1.0, 0.0, 30.0});
    const auto switches = sched.switch_times(0.0, 40.0);
    CHECK(switches == std::vector<double>{1.0, 7.0, 8.0, 14.0, 15.0, 21.0, 22.0, 28.0, 29.0});
    const auto tr = integrate(baseline(), kFull, strategy_initial_state(), 0.0, 40.0, sched, {});
    CHECK(tr.events == switches);
    for (double t : switches) CHECK(std::find(tr.times.begin(), tr.times.end(), t) != tr.times.end());

    const auto c = sched.active(controls_of(baseline()), 7.5);
    CHECK(c.c_m == 0.5);
    CHECK(sched.active(controls_of(baseline()), 8.0).c_m == baseline().c_m);
}

TEST_CASE("later schedule entries win") {
    PulseSchedule sched;
    sched.entries.push_back({Control::Cm, 0.5, 10.0, 5.0, 0.0, 50.0});
    sched.entries.push_back({Control::Cm, 0.9, 10.0, 2.0, 0.0, 50.0});
    CHECK(sched.active(controls_of(baseline()), 1.0).c_m == 0.9);
    CHECK(sched.active(controls_of(baseline()), 3.0).c_m == 0.5);
}

TEST_CASE("pulse validation") {
    auto bad = [](PulseEntry e) {
        PulseSchedule s;
        s.entries.push_back(e);
        CHECK_THROWS_AS(s.validate(100.0), ValidationError);
    };
    bad({Control::Cm, 0.5, 0.0, 1.0, 0.0, 50.0});
    bad({Control::Cm, 0.5, 7.0, 8.0, 0.0, 50.0});
    bad({Control::Cm, 0.5, 7.0, 0.0, 0.0, 50.0});
    bad({Control::Cm, 0.5, 7.0, 1.0, 50.0, 50.0});
    bad({Control::Cm, 0.5, 7.0, 1.0, 0.0, 150.0});
    bad({Control::Cm, -0.5, 7.0, 1.0, 0.0, 50.0});
    bad({Control::Alpha1, 1.0, 7.0, 1.0, 0.0, 50.0});
    bad({Control::Alpha2, 0.0, 7.0, 1.0, 0.0, 50.0});
    CHECK_THROWS_AS(parse_control("c_x"), ValidationError);
    CHECK_THROWS_AS(parse_strategy("G"), ValidationError);
}

TEST_CASE("sample grid") {
    CHECK(sample_grid(0.0, 1.0, 0.25) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(sample_grid(0.0, 1.0, 0.3).back() == 1.0);
}
