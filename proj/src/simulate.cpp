#include "arbo/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "arbo/errors.hpp"
#include "arbo/model.hpp"

namespace arbo {

const char* control_name(Control c) {
    switch (c) {
        case Control::Alpha1: return "alpha_1";
        case Control::Cm: return "c_m";
        case Control::Eta1: return "eta_1";
        case Control::Eta2: return "eta_2";
        case Control::Alpha2: return "alpha_2";
    }
    return "";
}

Control parse_control(std::string_view name) {
    for (Control c : {Control::Alpha1, Control::Cm, Control::Eta1, Control::Eta2, Control::Alpha2})
        if (name == control_name(c)) return c;
    throw ValidationError("control", "unknown control '" + std::string(name) + "'");
}

namespace {

double& slot(ControlOverrides& c, Control k) {
    switch (k) {
        case Control::Alpha1: return c.alpha_1;
        case Control::Cm: return c.c_m;
        case Control::Eta1: return c.eta_1;
        case Control::Eta2: return c.eta_2;
        case Control::Alpha2: return c.alpha_2;
    }
    return c.alpha_1;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

ControlOverrides PulseSchedule::active(const ControlOverrides& baseline, double t) const {
    ControlOverrides c = baseline;
    for (const auto& e : entries) {
        if (t < e.start || t >= e.end) continue;
        const double phase = t - e.start - std::floor((t - e.start) / e.period) * e.period;
        if (phase < e.duration) slot(c, e.control) = e.level;
    }
    return c;
}

std::vector<double> PulseSchedule::switch_times(double t0, double t1) const {
    std::vector<double> out;
    auto add = [&](double t) {
        if (t > t0 && t < t1) out.push_back(t);
    };
    for (const auto& e : entries) {
        for (double on = e.start; on < e.end; on += e.period) {
            add(on);
            add(std::min(on + e.duration, e.end));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void PulseSchedule::validate(double horizon) const {
    for (const auto& e : entries) {
        const std::string name = control_name(e.control);
        if (!(e.period > 0.0) || !std::isfinite(e.period))
            throw ValidationError("period", name + " pulse period must be positive");
        if (!(e.duration > 0.0 && e.duration <= e.period))
            throw ValidationError("duration", name + " pulse duration " + num(e.duration) + " outside (0, period]");
        if (!(e.start >= 0.0 && e.start < e.end && e.end <= horizon))
            throw ValidationError("window", name + " pulse window [" + num(e.start) + ", " + num(e.end) +
                                                ") not inside [0, " + num(horizon) + "]");
        bool ok = std::isfinite(e.level) && e.level >= 0.0;
        if (e.control == Control::Alpha1) ok = ok && e.level < 1.0;
        if (e.control == Control::Alpha2) ok = ok && e.level > 0.0 && e.level <= 1.0;
        if (!ok) throw ValidationError(name, name + " pulse level " + num(e.level) + " outside admissible range");
    }
}

std::vector<double> sample_grid(double t0, double t1, double dt) {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((t1 - t0) / dt + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(t0 + dt * static_cast<double>(i));
    if (out.back() < t1) out.push_back(t1);
    return out;
}

namespace {

constexpr std::size_t kDim = kStateDim + 1;  // states plus cumulative infections
using Y = std::array<double, kDim>;

// Dormand-Prince 5(4) tableau (autonomous within a segment) with Hairer's
// dense-output weights.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0;
constexpr long kMaxSteps = 50'000'000;

struct System {
    const ModelParams& p;
    const ModelVariant& v;
    ControlOverrides active;

    Y operator()(const Y& y) const {
        State x;
        std::copy_n(y.begin(), kStateDim, x.begin());
        const State dx = rhs(x, p, v, active);
        Y out;
        std::copy(dx.begin(), dx.end(), out.begin());
        out[kStateDim] = incidence(x, p, v, active);
        return out;
    }
};

Y lin(const Y& y, double h, std::initializer_list<std::pair<double, const Y*>> terms) {
    Y out = y;
    for (std::size_t i = 0; i < kDim; ++i) {
        double s = 0.0;
        for (const auto& [c, k] : terms) s += c * (*k)[i];
        out[i] += h * s;
    }
    return out;
}

double err_norm(const Y& e, const Y& y0, const Y& y1, const Tolerances& tol) {
    double s = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
        const double sc = tol.abs + tol.rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
        s += (e[i] / sc) * (e[i] / sc);
    }
    return std::sqrt(s / kDim);
}

double initial_step(const System& f, const Y& y, const Y& f0, double span, const Tolerances& tol) {
    double dn0 = 0.0, dn1 = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
        const double sc = tol.abs + tol.rel * std::abs(y[i]);
        dn0 += (y[i] / sc) * (y[i] / sc);
        dn1 += (f0[i] / sc) * (f0[i] / sc);
    }
    dn0 = std::sqrt(dn0 / kDim);
    dn1 = std::sqrt(dn1 / kDim);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, span);
    const Y y1 = lin(y, h0, {{1.0, &f0}});
    const Y f1 = f(y1);
    double dn2 = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
        const double sc = tol.abs + tol.rel * std::abs(y[i]);
        dn2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
    }
    dn2 = std::sqrt(dn2 / kDim) / h0;
    const double m = std::max(dn1, dn2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    return std::min({100.0 * h0, h1, span});
}

// Clamps tiny negatives to zero; larger excursions are errors.
void enforce_positivity(Y& y, double t) {
    for (std::size_t i = 0; i < kStateDim; ++i) {
        if (y[i] < -kPositivityTol)
            throw PositivityError(std::string(state_names()[i]) + " = " + num(y[i]) + " at t = " + num(t));
        if (y[i] < 0.0) y[i] = 0.0;
    }
}

struct Recorder {
    Trajectory& tr;
    std::size_t next = 0;

    void push(double t, Y y) {
        enforce_positivity(y, t);
        State x;
        std::copy_n(y.begin(), kStateDim, x.begin());
        tr.times.push_back(t);
        tr.states.push_back(x);
        tr.cumulative_infections.push_back(y[kStateDim]);
    }
};

}  // namespace

Trajectory integrate(const ModelParams& p, const ModelVariant& v, const State& init, double t0, double t1,
                     const PulseSchedule& schedule, const IntegrateOptions& opts) {
    validate(p);
    if (!(t1 > t0)) throw ValidationError("t_end", "integration interval is empty");
    if (!(opts.tol.rel >= 1e-12 && opts.tol.rel <= 1e-3))
        throw ValidationError("rtol", "relative tolerance " + num(opts.tol.rel) + " outside [1e-12, 1e-3]");
    if (!(opts.tol.abs > 0.0)) throw ValidationError("atol", "absolute tolerance must be positive");
    for (std::size_t i = 0; i < kStateDim; ++i)
        if (!(init[i] >= 0.0) || !std::isfinite(init[i]))
            throw ValidationError(state_names()[i], std::string("initial ") + state_names()[i] + " must be finite and >= 0");
    for (double s : opts.samples)
        if (s < t0 || s > t1) throw ValidationError("samples", "sample time " + num(s) + " outside the interval");
    if (!std::is_sorted(opts.samples.begin(), opts.samples.end()))
        throw ValidationError("samples", "sample times must be ascending");

    schedule.validate(t1);

    const ModelParams q = effective(p, v);
    const ControlOverrides base = controls_of(q);
    Trajectory tr;
    // Keep only instants where the active controls really change; a pulse at
    // the baseline level must not perturb the step sequence.
    {
        const auto raw = schedule.switch_times(t0, t1);
        auto same = [](const ControlOverrides& a, const ControlOverrides& b) {
            return a.alpha_1 == b.alpha_1 && a.c_m == b.c_m && a.eta_1 == b.eta_1 && a.eta_2 == b.eta_2 &&
                   a.alpha_2 == b.alpha_2;
        };
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const double before = 0.5 * ((i ? raw[i - 1] : t0) + raw[i]);
            const double after = 0.5 * (raw[i] + (i + 1 < raw.size() ? raw[i + 1] : t1));
            if (!same(schedule.active(base, before), schedule.active(base, after))) tr.events.push_back(raw[i]);
        }
    }
    Recorder rec{tr};
    const bool every_step = opts.samples.empty();

    Y y{};
    std::copy(init.begin(), init.end(), y.begin());
    if (!v.vaccination) y[Vh] = 0.0;
    double t = t0;
    if (every_step) rec.push(t, y);
    while (rec.next < opts.samples.size() && opts.samples[rec.next] <= t0) rec.push(opts.samples[rec.next++], y);

    std::vector<double> bounds = tr.events;
    bounds.push_back(t1);
    long steps = 0;
    for (double seg_end : bounds) {
        const System f{q, v, schedule.active(base, 0.5 * (t + seg_end))};
        Y k1 = f(y);
        double h = initial_step(f, y, k1, seg_end - t, opts.tol);
        while (t < seg_end) {
            if (++steps > kMaxSteps) {
                State last_state;
                std::copy_n(y.begin(), kStateDim, last_state.begin());
                throw StiffnessError("step limit exceeded at t = " + num(t), t, last_state);
            }
            const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
            bool last = false;
            if (t + h >= seg_end || seg_end - (t + h) < hmin) {
                h = seg_end - t;
                last = true;
            }
            const Y k2 = f(lin(y, h, {{a21, &k1}}));
            const Y k3 = f(lin(y, h, {{a31, &k1}, {a32, &k2}}));
            const Y k4 = f(lin(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            const Y k5 = f(lin(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            const Y k6 = f(lin(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            const Y yn = lin(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
            const Y k7 = f(yn);
            const Y e = lin(Y{}, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
            const double err = err_norm(e, y, yn, opts.tol);

            if (err <= 1.0) {
                const double tn = last ? seg_end : t + h;
                while (rec.next < opts.samples.size() && opts.samples[rec.next] <= tn) {
                    const double s = opts.samples[rec.next++];
                    if (s == tn) {
                        rec.push(s, yn);
                        continue;
                    }
                    const double th = (s - t) / h, th1 = 1.0 - th;
                    Y ys;
                    for (std::size_t i = 0; i < kDim; ++i) {
                        const double ydiff = yn[i] - y[i];
                        const double bspl = h * k1[i] - ydiff;
                        const double r4 = ydiff - h * k7[i] - bspl;
                        const double r5 = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                        ys[i] = y[i] + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5)));
                    }
                    rec.push(s, ys);
                }
                Y ynew = yn;
                enforce_positivity(ynew, tn);
                const bool clamped = ynew != yn;
                t = tn;
                y = ynew;
                k1 = clamped ? f(y) : k7;
                if (every_step) rec.push(t, y);
                const double fac = err == 0.0 ? kMaxFactor : kSafety * std::pow(err, -0.2);
                h *= std::clamp(fac, kMinFactor, kMaxFactor);
            } else {
                h *= std::max(kMinFactor, kSafety * std::pow(err, -0.2));
            }
            if (t < seg_end && h < hmin) {
                State last_state;
                std::copy_n(y.begin(), kStateDim, last_state.begin());
                throw StiffnessError("step size underflow at t = " + num(t), t, last_state);
            }
        }
    }
    return tr;
}

Strategy parse_strategy(std::string_view tag) {
    if (tag.size() == 1 && tag[0] >= 'A' && tag[0] <= 'F') return static_cast<Strategy>(tag[0] - 'A');
    throw ValidationError("strategy", "unknown strategy '" + std::string(tag) + "' (expected A-F)");
}

char strategy_tag(Strategy s) { return static_cast<char>('A' + static_cast<int>(s)); }

std::string strategy_description(Strategy s) {
    switch (s) {
        case Strategy::A: return "individual protection alpha_1 = level";
        case Strategy::B: return "adulticide c_m = level, 1 day every 7 days for 100 days";
        case Strategy::C: return "larvicide eta_1 = eta_2 = level, 1 day every 15 days for 100 days";
        case Strategy::D: return "mechanical control alpha_2 = level";
        case Strategy::E: return "protection and adulticide alpha_1 = c_m = level";
        case Strategy::F: return "protection alpha_1 = level, mechanical control alpha_2 = max(1 - level, 0.05)";
    }
    return "";
}

std::vector<double> default_levels(Strategy s) {
    switch (s) {
        case Strategy::A:
        case Strategy::E:
        case Strategy::F: return {0.0, 0.2, 0.4, 0.6, 0.8};
        case Strategy::B:
        case Strategy::C: return {0.0, 0.25, 0.5, 0.75, 1.0};
        case Strategy::D: return {1.0, 0.8, 0.6, 0.4, 0.2};
    }
    return {};
}

State strategy_initial_state() { return {700, 10, 220, 100, 60, 3000, 400, 120, 10000, 5000, 3000}; }

StrategySetup strategy_setup(Strategy s, const ModelParams& p, double level, double horizon) {
    const double kWindow = std::min(100.0, horizon);
    StrategySetup out{p, {}};
    ModelParams& q = out.params;
    q.alpha_1 = 0.0;
    q.c_m = 0.0;
    q.eta_1 = 0.0;
    q.eta_2 = 0.0;
    q.alpha_2 = 1.0;
    switch (s) {
        case Strategy::A: q.alpha_1 = level; break;
        case Strategy::B: out.schedule.entries.push_back({Control::Cm, level, 7.0, 1.0, 0.0, kWindow}); break;
        case Strategy::C:
            out.schedule.entries.push_back({Control::Eta1, level, 15.0, 1.0, 0.0, kWindow});
            out.schedule.entries.push_back({Control::Eta2, level, 15.0, 1.0, 0.0, kWindow});
            break;
        case Strategy::D: q.alpha_2 = level; break;
        case Strategy::E:
            q.alpha_1 = level;
            q.c_m = level;
            break;
        case Strategy::F:
            q.alpha_1 = level;
            q.alpha_2 = std::max(1.0 - level, 0.05);
            break;
    }
    validate(q);
    out.schedule.validate(horizon);
    return out;
}

StrategySummary summarize(const Trajectory& tr) {
    StrategySummary s{};
    if (tr.states.empty()) return s;
    for (const auto& x : tr.states) s.peak_infected_humans = std::max(s.peak_infected_humans, x[Eh] + x[Ih]);
    const State& f = tr.states.back();
    s.cumulative_infections = tr.cumulative_infections.back();
    s.final_infected_humans = f[Eh] + f[Ih];
    s.final_infected_vectors = f[Ev] + f[Iv];
    s.final_eggs = f[Egg];
    s.final_larvae = f[Lar];
    return s;
}

StrategyRun run_strategy(Strategy s, const ModelParams& p, double level, const State& init, double horizon,
                         const Tolerances& tol) {
    const auto setup = strategy_setup(s, p, level, horizon);
    IntegrateOptions opts{tol, sample_grid(0.0, horizon, 1.0)};
    StrategyRun run{level, integrate(setup.params, {}, init, 0.0, horizon, setup.schedule, opts), {}};
    run.summary = summarize(run.trajectory);
    return run;
}

}  // namespace arbo
