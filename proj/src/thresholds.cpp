#include "arbo/thresholds.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "arbo/errors.hpp"

namespace arbo {

namespace {

double bite(const ModelParams& p) { return p.a * (1.0 - p.alpha_1); }

// Adult vectors at the DFE.
double dfe_vectors(const ModelParams& p, const DerivedConstants& d) {
    return d.K_E * d.K_L * d.k5 * d.k6 * d.n / (p.mu_b * d.K12);
}

struct HumanDfe {
    double S, V;
};

HumanDfe human_dfe(const ModelParams& p, const DerivedConstants& d) {
    const double S = p.Lambda_h * d.k2 / (p.mu_h * (d.k2 + p.xi));
    const double V = p.xi * p.Lambda_h / (p.mu_h * (d.k2 + p.xi));
    return {S, V};
}

}  // namespace

double net_reproductive_number(const ModelParams& p) { return derive_constants(p).net_reproductive; }

double basic_reproduction_number(const ModelParams& p) {
    const auto d = derive_constants(p);
    if (d.net_reproductive <= 1.0) return 0.0;
    const double f = bite(p);
    const double num = f * f * p.beta_hv * p.beta_vh * p.mu_h * d.k5 * d.k6 * d.k10 * d.k11 * (d.pi * p.xi + d.k2) *
                       p.alpha_2 * p.Gamma_E * p.Gamma_L * d.n;
    const double den = d.k3 * d.k4 * d.k8 * d.k9 * p.mu_b * p.Lambda_h * (p.xi + d.k2) *
                       (d.k6 * p.Gamma_L + p.s * p.Gamma_E);
    return std::sqrt(num / den);
}

double r0_via_ngm(const ModelParams& p, const ModelVariant& v) {
    const ModelParams q = effective(p, v);
    const auto d = derive_constants(q);
    if (d.net_reproductive <= 1.0) throw NoVectorError();
    const auto h = human_dfe(q, d);
    const double H0 = h.S + d.pi * h.V;
    const double Nv0 = dfe_vectors(q, d);
    const double Nh0 = v.incidence == Incidence::Standard ? h.S + h.V : 1.0;
    const double f = bite(q);

    // Infected order: E_h, I_h, E_v, I_v.
    Eigen::Matrix4d F = Eigen::Matrix4d::Zero();
    F(0, 2) = f * q.beta_hv * q.eta_v * H0 / Nh0;
    F(0, 3) = f * q.beta_hv * H0 / Nh0;
    F(2, 0) = f * q.beta_vh * q.eta_h * Nv0 / Nh0;
    F(2, 1) = f * q.beta_vh * Nv0 / Nh0;
    Eigen::Matrix4d V = Eigen::Matrix4d::Zero();
    V(0, 0) = d.k3;
    V(1, 0) = -q.gamma_h;
    V(1, 1) = d.k4;
    V(2, 2) = d.k9;
    V(3, 2) = -q.gamma_v;
    V(3, 3) = d.k8;

    const Eigen::Matrix4d K = F * V.inverse();
    Eigen::EigenSolver<Eigen::Matrix4d> es(K, false);
    double rho = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) rho = std::max(rho, std::abs(es.eigenvalues()[i]));
    return rho;
}

double rc_threshold(const ModelParams& p) {
    if (derive_constants(p).net_reproductive <= 1.0) throw NoVectorError();
    return basic_reproduction_number(p) * (p.mu_h + p.delta) / p.mu_h;
}

double r_nv(const ModelParams& p) {
    const auto d = derive_constants(p);
    if (d.net_reproductive <= 1.0) throw NoVectorError();
    const double f = bite(p);
    const double Nh0 = p.Lambda_h / p.mu_h;
    const double sq = f * f * p.beta_hv * p.beta_vh * d.k10 * d.k11 * dfe_vectors(p, d) / (d.k3 * d.k4 * d.k8 * d.k9 * Nh0);
    return std::sqrt(sq);
}

double r_nv_subthreshold(const ModelParams& p) {
    const auto d = derive_constants(p);
    const double q = d.k3 * d.k4 - p.delta * p.gamma_h;
    return (2.0 * d.k8 * q + d.k10 * p.a * p.mu_h * (1.0 - p.alpha_1) * p.beta_vh) / (d.k3 * d.k4 * d.k8);
}

double r0_mass(const ModelParams& p) {
    const auto d = derive_constants(p);
    if (d.net_reproductive <= 1.0) throw NoVectorError();
    const double f = bite(p);
    const double P0 = dfe_vectors(p, d) * d.k8 / p.theta;
    const double rhv = f * p.beta_hv * p.Lambda_h * d.k10 * (d.pi * p.xi + d.k2) / (p.mu_h * d.k3 * d.k4 * (p.xi + d.k2));
    const double rvh = f * p.beta_vh * d.k11 * p.theta * P0 / (d.k8 * d.k8 * d.k9);
    return std::sqrt(rhv * rvh);
}

double r_cm(const ModelParams& p) {
    const auto d = derive_constants(p);
    const double Cv = bite(p) * p.beta_vh;
    const double kappa = d.k1 * d.k2 - p.xi * p.omega;
    const double top = d.k10 * (d.pi * p.xi + d.k2) * p.Lambda_h * Cv + (d.k1 * d.pi + d.k2) * d.k3 * d.k4 * d.k8;
    return top * (d.pi * p.xi + d.k2) / (d.k3 * d.k4 * d.k8 * kappa * d.pi);
}

double r_b(const ModelParams& p) {
    ModelParams q = p;
    q.delta = 0.0;
    const auto d = derive_constants(q);
    const double f = bite(q);
    return (d.pi * q.xi + d.k2) / (d.pi * (q.xi + d.k2)) *
           ((d.k1 * d.pi + d.k2) / q.mu_h + f * q.beta_vh * d.k10 * (d.pi * q.xi + d.k2) / (d.k3 * d.k4 * d.k8));
}

double r1(const ModelParams& p) {
    ModelParams q = p;
    q.delta = 0.0;
    const double r = basic_reproduction_number(q);
    return r * r;
}

double variant_reproduction_number(const ModelParams& p, const ModelVariant& v) {
    const ModelParams q = effective(p, v);
    if (derive_constants(q).net_reproductive <= 1.0) return 0.0;
    if (v.incidence == Incidence::MassAction) return r0_mass(q);
    if (!v.vaccination) return r_nv(q);
    return basic_reproduction_number(q);
}

double ThresholdReport::value(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e.value;
    throw ValidationError("threshold", "unknown threshold '" + name + "'");
}

ThresholdReport threshold_report(const ModelParams& p, const ModelVariant& v) {
    const ModelParams q = effective(p, v);
    const auto d = derive_constants(q);
    ThresholdReport r;
    r.no_vectors = d.net_reproductive <= 1.0;

    const bool standard = v.incidence == Incidence::Standard;
    const bool full = standard && v.vaccination;
    const bool nv = standard && !v.vaccination;
    const bool mass = !standard;
    const bool dz = full && q.delta == 0.0;

    const bool nov = r.no_vectors;
    r.entries.push_back({"N", d.net_reproductive, true});
    r.entries.push_back({"R0", basic_reproduction_number(q), full});
    r.entries.push_back({"R0_ngm", nov ? 0.0 : r0_via_ngm(q, v), true});
    r.entries.push_back({"Rc", nov ? 0.0 : rc_threshold(q), full});
    r.entries.push_back({"R_nv", nov ? 0.0 : r_nv(q), nv});
    r.entries.push_back({"R_nv_subthreshold", r_nv_subthreshold(q), nv});
    r.entries.push_back({"R0_mass", nov ? 0.0 : r0_mass(q), mass});
    r.entries.push_back({"R_cm", r_cm(q), mass});
    r.entries.push_back({"R_b", r_b(q), dz});
    r.entries.push_back({"R1", r1(q), dz});
    return r;
}

State trivial_state(const ModelParams& p, const ModelVariant& v) {
    const ModelParams q = effective(p, v);
    const auto d = derive_constants(q);
    const auto h = human_dfe(q, d);
    State x{};
    x[Sh] = h.S;
    x[Vh] = h.V;
    return x;
}

State dfe_state(const ModelParams& p, const ModelVariant& v) {
    const ModelParams q = effective(p, v);
    const auto d = derive_constants(q);
    if (d.net_reproductive <= 1.0) throw NoVectorError();
    State x = trivial_state(q, v);
    const double Nv = dfe_vectors(q, d);
    x[Sv] = Nv;
    x[Pup] = Nv * d.k8 / q.theta;
    x[Lar] = d.k7 * x[Pup] / q.l;
    x[Egg] = d.K_E * d.K_L * d.k5 * d.k6 * d.k7 * d.k8 * d.n /
             (q.s * (q.mu_b * q.l * d.K_L * q.theta + d.k5 * d.k7 * d.k8 * d.K_E));
    return x;
}

}  // namespace arbo
