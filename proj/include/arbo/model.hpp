#pragma once

#include <string>

#include "arbo/errors.hpp"
#include "arbo/hyperdual.hpp"
#include "arbo/params.hpp"
#include "arbo/state.hpp"

namespace arbo {

// Standard incidence refuses to divide by fewer humans than this.
constexpr double kPopulationFloor = 1e-9;

struct Infection {
    double human;   // lambda^c_h
    double vector;  // lambda^c_v
};

Infection force_of_infection(const State& x, const ModelParams& p, const ModelVariant& v);

// Time derivative of the state. `active` supplies the instantaneous control
// levels; the overload without it uses the levels stored in p.
State rhs(const State& x, const ModelParams& p, const ModelVariant& v, const ControlOverrides& active);
State rhs(const State& x, const ModelParams& p, const ModelVariant& v);

// Rate of new human infections, lambda^c_h (S_h + pi V_h).
double incidence(const State& x, const ModelParams& p, const ModelVariant& v,
                 const ControlOverrides& active);

namespace detail {

// Vector field over a generic scalar. p must already carry the variant's
// overrides and the active controls; beta_hv is passed separately so it can
// be differentiated.
template <class T>
void vector_field(const T* x, T* dx, const ModelParams& p, const ModelVariant& v, const T& beta_hv) {
    const double pi = 1.0 - p.epsilon;
    const double k3 = p.mu_h + p.gamma_h;
    const double k4 = p.mu_h + p.delta + p.sigma;
    const double k5 = p.s + p.mu_E + p.eta_1;
    const double k6 = p.l + p.mu_L + p.eta_2;
    const double k7 = p.theta + p.mu_P;
    const double k8 = p.mu_v + p.c_m;
    const double k9 = p.mu_v + p.gamma_v + p.c_m;
    const double KE = p.alpha_2 * p.Gamma_E;
    const double KL = p.alpha_2 * p.Gamma_L;
    const double bite = p.a * (1.0 - p.alpha_1);

    const T& S = x[Sh];
    const T V = v.vaccination ? x[Vh] : T(0.0);
    const T& E = x[Eh];
    const T& I = x[Ih];
    const T& R = x[Rh];

    T lh = beta_hv * bite * (p.eta_v * x[Ev] + x[Iv]);
    T lv = T(bite * p.beta_vh) * (p.eta_h * E + I);
    if (v.incidence == Incidence::Standard) {
        const T N = S + V + E + I + R;
        if (!(value_of(N) > kPopulationFloor))
            throw DegeneratePopulation("standard incidence with N_h <= " + std::to_string(kPopulationFloor));
        lh = lh / N;
        lv = lv / N;
    }

    if (v.vaccination) {
        dx[Sh] = p.Lambda_h + p.omega * V - (lh + (p.xi + p.mu_h)) * S;
        dx[Vh] = p.xi * S - (pi * lh + (p.omega + p.mu_h)) * V;
        dx[Eh] = lh * (S + pi * V) - k3 * E;
    } else {
        dx[Sh] = p.Lambda_h - (lh + p.mu_h) * S;
        dx[Vh] = T(0.0);
        dx[Eh] = lh * S - k3 * E;
    }
    dx[Ih] = p.gamma_h * E - k4 * I;
    dx[Rh] = p.sigma * I - p.mu_h * R;

    const T Nv = x[Sv] + x[Ev] + x[Iv];
    dx[Sv] = p.theta * x[Pup] - lv * x[Sv] - k8 * x[Sv];
    dx[Ev] = lv * x[Sv] - k9 * x[Ev];
    dx[Iv] = p.gamma_v * x[Ev] - k8 * x[Iv];
    dx[Egg] = p.mu_b * (1.0 - x[Egg] / KE) * Nv - k5 * x[Egg];
    dx[Lar] = p.s * x[Egg] * (1.0 - x[Lar] / KL) - k6 * x[Lar];
    dx[Pup] = p.l * x[Lar] - k7 * x[Pup];
}

}  // namespace detail

}  // namespace arbo
