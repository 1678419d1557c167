#include "arbo/params.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "arbo/errors.hpp"

namespace arbo {

namespace {

constexpr std::array<ParamSpec, kParamCount> kSpecs{{
    {"Lambda_h", &ModelParams::Lambda_h, Bound::NonNegative, "human recruitment (humans/day)"},
    {"mu_h", &ModelParams::mu_h, Bound::Positive, "human natural mortality"},
    {"xi", &ModelParams::xi, Bound::NonNegative, "vaccine coverage rate"},
    {"omega", &ModelParams::omega, Bound::NonNegative, "vaccine waning rate"},
    {"epsilon", &ModelParams::epsilon, Bound::UnitClosed, "vaccine efficacy"},
    {"a", &ModelParams::a, Bound::NonNegative, "biting rate"},
    {"beta_hv", &ModelParams::beta_hv, Bound::UnitClosed, "vector-to-human transmission probability"},
    {"beta_vh", &ModelParams::beta_vh, Bound::UnitClosed, "human-to-vector transmission probability"},
    {"gamma_h", &ModelParams::gamma_h, Bound::NonNegative, "human latency progression"},
    {"gamma_v", &ModelParams::gamma_v, Bound::NonNegative, "vector latency progression"},
    {"delta", &ModelParams::delta, Bound::NonNegative, "disease-induced death rate"},
    {"sigma", &ModelParams::sigma, Bound::NonNegative, "recovery rate"},
    {"eta_h", &ModelParams::eta_h, Bound::UnitClosed, "exposed-human infectivity modifier"},
    {"eta_v", &ModelParams::eta_v, Bound::UnitClosed, "exposed-vector infectivity modifier"},
    {"mu_v", &ModelParams::mu_v, Bound::Positive, "adult vector mortality"},
    {"theta", &ModelParams::theta, Bound::NonNegative, "pupa to adult maturation"},
    {"mu_b", &ModelParams::mu_b, Bound::NonNegative, "eggs per deposit"},
    {"Gamma_E", &ModelParams::Gamma_E, Bound::Positive, "egg carrying capacity"},
    {"Gamma_L", &ModelParams::Gamma_L, Bound::Positive, "larva carrying capacity"},
    {"mu_E", &ModelParams::mu_E, Bound::NonNegative, "egg mortality"},
    {"mu_L", &ModelParams::mu_L, Bound::NonNegative, "larva mortality"},
    {"mu_P", &ModelParams::mu_P, Bound::NonNegative, "pupa mortality"},
    {"s", &ModelParams::s, Bound::NonNegative, "egg to larva transfer"},
    {"l", &ModelParams::l, Bound::NonNegative, "larva to pupa transfer"},
    {"eta_1", &ModelParams::eta_1, Bound::NonNegative, "larvicide egg mortality"},
    {"eta_2", &ModelParams::eta_2, Bound::NonNegative, "larvicide larva mortality"},
    {"alpha_1", &ModelParams::alpha_1, Bound::UnitHalfOpen, "individual protection level"},
    {"alpha_2", &ModelParams::alpha_2, Bound::UnitPositiveClosed, "mechanical control efficacy"},
    {"c_m", &ModelParams::c_m, Bound::NonNegative, "adulticide kill rate"},
}};

bool within(double x, Bound b) {
    if (!std::isfinite(x)) return false;
    switch (b) {
        case Bound::NonNegative: return x >= 0.0;
        case Bound::Positive: return x > 0.0;
        case Bound::UnitClosed: return x >= 0.0 && x <= 1.0;
        case Bound::UnitHalfOpen: return x >= 0.0 && x < 1.0;
        case Bound::UnitPositiveClosed: return x > 0.0 && x <= 1.0;
    }
    return false;
}

}  // namespace

const std::array<ParamSpec, kParamCount>& param_specs() { return kSpecs; }

const ParamSpec* find_param(std::string_view key) {
    for (const auto& s : kSpecs)
        if (key == s.key) return &s;
    return nullptr;
}

std::string bound_text(Bound b) {
    switch (b) {
        case Bound::NonNegative: return "[0, inf)";
        case Bound::Positive: return "(0, inf)";
        case Bound::UnitClosed: return "[0, 1]";
        case Bound::UnitHalfOpen: return "[0, 1)";
        case Bound::UnitPositiveClosed: return "(0, 1]";
    }
    return "";
}

void validate(const ModelParams& p) {
    for (const auto& s : kSpecs) {
        const double x = p.*s.field;
        if (!within(x, s.bound)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            throw ValidationError(s.key, std::string(s.key) + " = " + buf + " outside " + bound_text(s.bound));
        }
    }
}

std::string variant_name(const ModelVariant& v) {
    std::string name = v.incidence == Incidence::MassAction ? "mass-action" : (v.vaccination ? "full" : "no-vaccination");
    if (v.incidence == Incidence::MassAction && !v.vaccination) name += "+no-vaccination";
    if (v.delta_zero) name += "+delta-zero";
    return name;
}

ModelVariant parse_variant(std::string_view name) {
    ModelVariant v;
    std::string_view rest = name;
    auto take = [&](std::string_view tok) {
        if (rest.substr(0, tok.size()) == tok) {
            rest.remove_prefix(tok.size());
            return true;
        }
        return false;
    };
    if (take("full")) {
    } else if (take("no-vaccination")) {
        v.vaccination = false;
    } else if (take("mass-action")) {
        v.incidence = Incidence::MassAction;
        if (take("+no-vaccination")) v.vaccination = false;
    } else {
        throw ValidationError("variant", "unknown variant '" + std::string(name) + "'");
    }
    if (take("+delta-zero")) v.delta_zero = true;
    if (!rest.empty()) throw ValidationError("variant", "unknown variant '" + std::string(name) + "'");
    return v;
}

ModelParams effective(const ModelParams& p, const ModelVariant& v) {
    ModelParams q = p;
    if (v.delta_zero) q.delta = 0.0;
    if (!v.vaccination) {
        q.xi = 0.0;
        q.omega = 0.0;
    }
    return q;
}

ControlOverrides controls_of(const ModelParams& p) {
    return {p.alpha_1, p.c_m, p.eta_1, p.eta_2, p.alpha_2};
}

ModelParams with_controls(ModelParams p, const ControlOverrides& c) {
    p.alpha_1 = c.alpha_1;
    p.c_m = c.c_m;
    p.eta_1 = c.eta_1;
    p.eta_2 = c.eta_2;
    p.alpha_2 = c.alpha_2;
    return p;
}

DerivedConstants derive_unchecked(const ModelParams& p) {
    DerivedConstants d{};
    d.k1 = p.xi + p.mu_h;
    d.k2 = p.omega + p.mu_h;
    d.k3 = p.mu_h + p.gamma_h;
    d.k4 = p.mu_h + p.delta + p.sigma;
    d.k5 = p.s + p.mu_E + p.eta_1;
    d.k6 = p.l + p.mu_L + p.eta_2;
    d.k7 = p.theta + p.mu_P;
    d.k8 = p.mu_v + p.c_m;
    d.k9 = p.mu_v + p.gamma_v + p.c_m;
    d.K_E = p.alpha_2 * p.Gamma_E;
    d.K_L = p.alpha_2 * p.Gamma_L;
    d.pi = 1.0 - p.epsilon;
    d.k10 = p.gamma_h + p.eta_h * d.k4;
    d.k11 = p.gamma_v + p.eta_v * d.k8;
    d.K12 = p.s * d.K_E + d.k6 * d.K_L;
    d.net_reproductive = p.mu_b * p.theta * p.l * p.s / (d.k5 * d.k6 * d.k7 * d.k8);
    d.n = d.net_reproductive - 1.0;
    return d;
}

DerivedConstants derive_constants(const ModelParams& p) {
    validate(p);
    return derive_unchecked(p);
}

ModelParams baseline() { return ModelParams{}; }

ModelParams backward_figure(double beta_hv) {
    ModelParams p;
    p.Lambda_h = 10.0;
    p.epsilon = 1.0;
    p.beta_vh = 0.8;
    p.eta_h = 1.0;
    p.eta_v = 1.0;
    p.sigma = 0.01428;
    p.delta = 1.0;
    p.alpha_1 = 0.001;
    p.alpha_2 = 1.0;
    p.c_m = 0.0001;
    p.Gamma_E = 1e5;
    p.Gamma_L = 5e4;
    p.beta_hv = beta_hv;
    return p;
}

ModelParams forward_figure() {
    ModelParams p;
    p.Lambda_h = 10.0;
    p.beta_vh = 0.8;
    p.eta_h = 0.0;
    p.eta_v = 0.0;
    p.delta = 0.0;
    p.c_m = 0.0;
    p.alpha_1 = 0.0;
    p.alpha_2 = 1.0;
    p.Gamma_E = 1e5;
    p.Gamma_L = 5e4;
    return p;
}

ModelParams no_vaccination_illustration() {
    ModelParams p;
    p.Lambda_h = 5.0;
    p.beta_hv = 0.03;
    p.eta_h = 1.0;
    p.eta_v = 1.0;
    p.delta = 1.0;
    p.sigma = 0.01;
    p.c_m = 0.1;
    p.beta_vh = 0.4;
    p.alpha_1 = 0.7;
    p.alpha_2 = 0.5;
    return p;
}

// Closest parameter set found that reproduces the printed no-vaccination
// coefficients; differs from the stated set in four values.
ModelParams no_vaccination_reconstructed() {
    ModelParams p = no_vaccination_illustration();
    p.beta_hv = 0.375;
    p.Gamma_E = 1e5;
    p.Gamma_L = 5e4;
    p.mu_L = 0.2;
    return p;
}

void write_params(std::ostream& os, const ModelParams& p) {
    char buf[64];
    for (const auto& s : kSpecs) {
        std::snprintf(buf, sizeof buf, "%.17g", p.*s.field);
        os << s.key << " = " << buf << '\n';
    }
}

double get_param(const ModelParams& p, std::string_view key) {
    const ParamSpec* s = find_param(key);
    if (!s) throw ValidationError(std::string(key), "unknown parameter '" + std::string(key) + "'");
    return p.*s->field;
}

void set_param(ModelParams& p, std::string_view key, double value) {
    const ParamSpec* s = find_param(key);
    if (!s) throw ValidationError(std::string(key), "unknown parameter '" + std::string(key) + "'");
    p.*s->field = value;
}

}  // namespace arbo
