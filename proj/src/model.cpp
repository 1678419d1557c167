#include "arbo/model.hpp"

#include <algorithm>
#include <cmath>

namespace arbo {

const std::array<const char*, kStateDim>& state_names() {
    static const std::array<const char*, kStateDim> names{"S_h", "V_h", "E_h", "I_h", "R_h", "S_v",
                                                          "E_v", "I_v", "E",   "L",   "P"};
    return names;
}

std::vector<std::size_t> active_indices(const ModelVariant& v) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < kStateDim; ++i)
        if (v.vaccination || i != Vh) idx.push_back(i);
    return idx;
}

RegionBounds feasible_bounds(const ModelParams& p) {
    const auto d = derive_unchecked(p);
    return {p.Lambda_h / p.mu_h, d.K_E, d.K_L, p.l * d.K_L / d.k7, p.theta * p.l * d.K_L / (d.k7 * d.k8)};
}

bool in_feasible_region(const State& x, const ModelParams& p, double slack) {
    for (double c : x)
        if (!(c >= 0.0)) return false;
    const auto b = feasible_bounds(p);
    const double f = 1.0 + slack;
    return human_total(x) <= b.humans * f && x[Egg] <= b.eggs * f && x[Lar] <= b.larvae * f &&
           x[Pup] <= b.pupae * f && vector_total(x) <= b.vectors * f;
}

double max_abs(const State& x) {
    double m = 0.0;
    for (double c : x) m = std::max(m, std::abs(c));
    return m;
}

Infection force_of_infection(const State& x, const ModelParams& p, const ModelVariant& v) {
    const double bite = p.a * (1.0 - p.alpha_1);
    double lh = bite * p.beta_hv * (p.eta_v * x[Ev] + x[Iv]);
    double lv = bite * p.beta_vh * (p.eta_h * x[Eh] + x[Ih]);
    if (v.incidence == Incidence::Standard) {
        const double N = x[Sh] + (v.vaccination ? x[Vh] : 0.0) + x[Eh] + x[Ih] + x[Rh];
        if (!(N > kPopulationFloor))
            throw DegeneratePopulation("standard incidence with N_h <= " + std::to_string(kPopulationFloor));
        lh /= N;
        lv /= N;
    }
    return {lh, lv};
}

State rhs(const State& x, const ModelParams& p, const ModelVariant& v, const ControlOverrides& active) {
    const ModelParams q = with_controls(effective(p, v), active);
    State dx{};
    detail::vector_field<double>(x.data(), dx.data(), q, v, q.beta_hv);
    return dx;
}

State rhs(const State& x, const ModelParams& p, const ModelVariant& v) { return rhs(x, p, v, controls_of(p)); }

double incidence(const State& x, const ModelParams& p, const ModelVariant& v, const ControlOverrides& active) {
    const ModelParams q = with_controls(effective(p, v), active);
    const double lh = force_of_infection(x, q, v).human;
    const double V = v.vaccination ? x[Vh] : 0.0;
    return lh * (x[Sh] + (1.0 - q.epsilon) * V);
}

}  // namespace arbo
