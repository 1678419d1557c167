#include "arbo/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "arbo/errors.hpp"
#include "arbo/model.hpp"
#include "arbo/rng.hpp"
#include "arbo/thresholds.hpp"

namespace arbo {

const char* kind_name(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::Trivial: return "trivial";
        case EquilibriumKind::DiseaseFree: return "disease-free";
        case EquilibriumKind::Endemic: return "endemic";
    }
    return "";
}

const char* poly_form_name(PolyForm f) {
    switch (f) {
        case PolyForm::Quartic: return "quartic";
        case PolyForm::DeltaZero: return "delta-zero-quadratic";
        case PolyForm::NoVaccination: return "no-vaccination-quadratic";
        case PolyForm::NoVaccinationLin: return "no-vaccination-linear";
        case PolyForm::MassAction: return "mass-action-quadratic";
    }
    return "";
}

double state_distance(const State& a, const State& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < kStateDim; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d / std::max({1.0, max_abs(a), max_abs(b)});
}

namespace {

Equilibrium make_equilibrium(const State& x, EquilibriumKind kind, double lambda, const ModelParams& p,
                             const ModelVariant& v) {
    const auto verdict = classify(x, p, v);
    return {x, kind, lambda, relative_residual(x, p, v), verdict.verdict, verdict.modulus};
}

double bite(const ModelParams& p) { return p.a * (1.0 - p.alpha_1); }

void require_vectors(const DerivedConstants& d) {
    if (d.net_reproductive <= 1.0) throw NoVectorError();
}

// One Newton step on the active components; kept only if it lowers the residual.
State newton_polish(const State& x, const ModelParams& p, const ModelVariant& v) {
    const auto idx = active_indices(v);
    const auto n = static_cast<Eigen::Index>(idx.size());
    const State f = rhs(x, p, v);
    Eigen::VectorXd rhs_vec(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs_vec[i] = -f[idx[static_cast<std::size_t>(i)]];
    const Eigen::VectorXd dx = jacobian_exact(x, p, v).colPivHouseholderQr().solve(rhs_vec);
    State y = x;
    for (Eigen::Index i = 0; i < n; ++i) y[idx[static_cast<std::size_t>(i)]] += dx[i];
    for (double c : y)
        if (!(c >= 0.0) || !std::isfinite(c)) return x;
    try {
        return relative_residual(y, p, v) < relative_residual(x, p, v) ? y : x;
    } catch (const NumericalError&) {
        return x;
    }
}

}  // namespace

DiseaseFreeStates disease_free_states(const ModelParams& p, const ModelVariant& v) {
    DiseaseFreeStates out{make_equilibrium(trivial_state(p, v), EquilibriumKind::Trivial, 0.0, p, v), std::nullopt};
    if (net_reproductive_number(effective(p, v)) > 1.0)
        out.dfe = make_equilibrium(dfe_state(p, v), EquilibriumKind::DiseaseFree, 0.0, p, v);
    return out;
}

Poly quartic_closed_form(const ModelParams& p) {
    const auto d = derive_constants(p);
    require_vectors(d);
    const double k1 = d.k1, k2 = d.k2, k3 = d.k3, k4 = d.k4, k5 = d.k5, k6 = d.k6, k8 = d.k8, k9 = d.k9;
    const double k10 = d.k10, k11 = d.k11, K12 = d.K12, KE = d.K_E, KL = d.K_L, pi = d.pi, n = d.n;
    const double mb = p.mu_b, L = p.Lambda_h, mh = p.mu_h, dl = p.delta, gh = p.gamma_h;
    const double xi = p.xi, om = p.omega, a = p.a, A = 1.0 - p.alpha_1, bhv = p.beta_hv, bvh = p.beta_vh;
    const double R0 = basic_reproduction_number(p);
    const double k34 = k3 * k4, k34s = k34 * k34;

    const double Q = k34 - dl * gh;
    const double c4 = -pi * pi * k9 * K12 * mb * L * Q * (k10 * a * mh * A * bvh + k8 * Q);

    const double T = k34 * k5 * k6 * k10 * k11 * a * a * mh * mh * A * A * bhv * n;
    const double c3 =
        pi * (T * pi * bvh * KE * KL + 2 * k9 * k10 * K12 * a * mb * dl * L * mh * gh * pi * A * bvh * xi -
              k34 * k9 * k10 * K12 * a * mb * L * mh * pi * A * bvh * xi -
              2 * k8 * k9 * K12 * mb * dl * dl * L * gh * gh * pi * xi + 2 * k34 * k8 * k9 * K12 * mb * dl * L * gh * pi * xi -
              k1 * k34 * k9 * k10 * K12 * a * mb * L * mh * pi * A * bvh +
              2 * k2 * k9 * k10 * K12 * a * mb * dl * L * mh * gh * A * bvh -
              2 * k2 * k34 * k9 * k10 * K12 * a * mb * L * mh * A * bvh + 2 * k1 * k34 * k8 * k9 * K12 * mb * dl * L * gh * pi -
              2 * k1 * k34s * k8 * k9 * K12 * mb * L * pi - 2 * k2 * k8 * k9 * K12 * mb * dl * dl * L * gh * gh +
              4 * k2 * k34 * k8 * k9 * K12 * mb * dl * L * gh - 2 * k2 * k34s * k8 * k9 * K12 * mb * L);

    const double B = K12 * mb * L;
    const double c2 =
        T * pi * pi * bvh * xi * KE * KL + k1 * T * pi * pi * bvh * KE * KL + 2 * k2 * T * pi * bvh * KE * KL +
        k9 * k10 * B * a * dl * mh * gh * pi * pi * A * bvh * xi * xi - k8 * k9 * B * dl * dl * gh * gh * pi * pi * xi * xi -
        k1 * k34 * k9 * k10 * B * a * mh * pi * pi * A * bvh * xi + k34 * k9 * k10 * B * a * mh * om * pi * A * bvh * xi +
        2 * k2 * k9 * k10 * B * a * dl * mh * gh * pi * A * bvh * xi - k2 * k34 * k9 * k10 * B * a * mh * pi * A * bvh * xi +
        2 * k1 * k34 * k8 * k9 * B * dl * gh * pi * pi * xi - 2 * k34 * k8 * k9 * B * dl * gh * om * pi * xi +
        2 * k34s * k8 * k9 * B * om * pi * xi - 2 * k2 * k8 * k9 * B * dl * dl * gh * gh * pi * xi +
        2 * k2 * k34 * k8 * k9 * B * dl * gh * pi * xi - 2 * k1 * k2 * k34 * k9 * k10 * B * a * mh * A * pi * bvh +
        k2 * k2 * k9 * k10 * B * a * dl * mh * gh * A * bvh - k2 * k2 * k34 * k9 * k10 * B * a * mh * A * bvh -
        k1 * k1 * k34s * k8 * k9 * B * pi * pi + 4 * k1 * k2 * k34 * k8 * k9 * B * dl * gh * pi -
        4 * k1 * k2 * k34s * k8 * k9 * B * pi - k2 * k2 * k8 * k9 * B * dl * dl * gh * gh +
        2 * k2 * k2 * k34 * k8 * k9 * B * dl * gh - k2 * k2 * k34s * k8 * k9 * B;

    const double T1 = k34 * k5 * k6 * k10 * k11 * a * a * mh * mh;
    const double c1 =
        ((k1 * T1 * A * bhv * n * pi * pi + T1 * A * A * bhv * n * (k2 - om) * pi) * bvh * xi +
         (2 * k1 * k2 * T1 * A * bhv * n * pi + k2 * k2 * T1 * A * bhv * n) * A * bvh) *
            KE * KL +
        (k34 * k9 * k10 * B * a * mh * om * pi * A * bvh - 2 * k34 * k8 * k9 * B * dl * gh * om * pi) * xi * xi +
        ((k2 * k34 * k9 * k10 * B * a * mh * om - k1 * k2 * k34 * k9 * k10 * B * a * mh * pi) * A * bvh +
         (2 * k1 * k34s * k8 * k9 * B * om + 2 * k1 * k2 * k34 * k8 * k9 * B * dl * gh) * pi +
         (2 * k2 * k34s * k8 * k9 * B - 2 * k2 * k34 * k8 * k9 * B * dl * gh) * om) *
            xi -
        k1 * k2 * k2 * k34 * k9 * k10 * B * a * mh * A * bvh - 2 * k1 * k1 * k2 * k34s * k8 * k9 * B * pi +
        2 * k1 * k2 * k2 * k34 * k8 * k9 * B * dl * gh - 2 * k1 * k2 * k2 * k34s * k8 * k9 * B;

    const double c0 = k34s * k8 * k9 * K12 * mb * L * mh * mh * (k2 + xi) * (k2 + xi) * (R0 * R0 - 1.0);
    return {c4, c3, c2, c1, c0};
}

Poly quartic_reconstructed(const ModelParams& p) {
    const auto d = derive_constants(p);
    require_vectors(d);
    const double pi = d.pi, L = p.Lambda_h, mh = p.mu_h, xi = p.xi;
    const double f = bite(p), Ch = f * p.beta_hv, Cv = f * p.beta_vh;
    const double P0 = dfe_state(p)[Pup];
    const double k34 = d.k3 * d.k4;

    // Polynomials in the human force of infection u.
    const Poly D = poly_add(poly_mul({1.0, d.k1}, {pi, d.k2}), {-p.omega * xi});
    const Poly lin = {pi, d.k2 + pi * xi};  // pi u + k2 + pi xi
    const Poly Ap = poly_scale(lin, Cv * d.k10 * mh * L);
    const Poly M = poly_scale(poly_add(poly_scale(D, k34), poly_scale(poly_mul({1.0, 0.0}, lin), -p.delta * p.gamma_h)), L);
    const Poly uAp = poly_mul({1.0, 0.0}, Ap);
    const Poly first = poly_scale(poly_mul(D, Ap), Ch * p.theta * P0 * d.k11 * mh * k34);
    const Poly second = poly_scale(poly_mul(poly_add(uAp, poly_scale(M, d.k8)), M), -d.k8 * d.k9);
    Poly q = poly_add(first, second);
    return poly_scale(q, d.K12 * p.mu_b / (d.k8 * L));
}

Poly delta_zero_quadratic(const ModelParams& p) {
    ModelParams q = p;
    q.delta = 0.0;
    const auto d = derive_constants(q);
    require_vectors(d);
    const double pi = d.pi, xi = q.xi, mh = q.mu_h, mb = q.mu_b, L = q.Lambda_h;
    const double fv = bite(q) * q.beta_vh;
    const double k348 = d.k3 * d.k4 * d.k8;
    const double R1 = r1(q);
    const double a2 = (fv * mh * d.k10 + k348) * d.k9 * mb * L * pi;
    // a1 = k3 k4 k8 k9 mu_b Lambda (xi+k2) mu_h pi / (pi xi + k2) (R_b - R1), with the
    // R_b term multiplied through so that pi = 0 stays finite.
    const double rb_term = k348 * d.k9 * mb * L * mh * ((d.k1 * pi + d.k2) / mh + fv * d.k10 * (pi * xi + d.k2) / k348);
    const double a1 = rb_term - k348 * d.k9 * mb * L * (xi + d.k2) * mh * pi / (pi * xi + d.k2) * R1;
    const double a0 = mh * k348 * d.k9 * mb * L * (xi + d.k2) * (1.0 - R1);
    return {a2, a1, a0};
}

Poly no_vaccination_quadratic(const ModelParams& p) {
    ModelParams q = effective(p, {Incidence::Standard, false, false});
    const auto d = derive_constants(q);
    require_vectors(d);
    const double f = bite(q), mh = q.mu_h, mb = q.mu_b, L = q.Lambda_h;
    const double Q = d.k3 * d.k4 - q.delta * q.gamma_h;
    const double base = d.k3 * d.k3 * d.k4 * d.k4 * d.k8 * d.k9 * d.K12 * mb * L;
    const double rnv = r_nv(q);
    const double d2 = -d.k9 * mb * L * d.K12 * Q * (d.k10 * f * mh * q.beta_vh + Q * d.k8);
    const double d1 = base * mh * (rnv * rnv - r_nv_subthreshold(q));
    const double d0 = base * mh * mh * (rnv * rnv - 1.0);
    return {d2, d1, d0};
}

Poly no_vaccination_linear(const ModelParams& p) {
    ModelParams q = effective(p, {Incidence::Standard, false, true});
    const auto d = derive_constants(q);
    require_vectors(d);
    const double mh = q.mu_h, mb = q.mu_b, L = q.Lambda_h;
    const double rnv = r_nv(q);
    const double p1 = d.k9 * d.k10 * d.K12 * q.a * mb * L * mh * (1.0 - q.alpha_1) * q.beta_vh +
                      d.k3 * (mh + q.sigma) * d.k8 * d.k9 * d.K12 * mb * L;
    const double p0 = -mh * d.k3 * d.k4 * d.k8 * d.k9 * d.K12 * mb * L * (rnv * rnv - 1.0);
    return {p1, p0};
}

Poly mass_action_quadratic(const ModelParams& p) {
    const auto d = derive_constants(p);
    require_vectors(d);
    const double pi = d.pi, xi = p.xi, L = p.Lambda_h;
    const double Cv = bite(p) * p.beta_vh;
    const double kappa = d.k1 * d.k2 - xi * p.omega;
    const double k34 = d.k3 * d.k4;
    const double R0m = r0_mass(p);
    const double e2 = d.k8 * d.k9 * pi * (d.k10 * Cv * L + k34 * d.k8);
    // e1 = k3 k4 k8^2 k9 kappa pi / (pi xi + k2) (R_cm - R0m^2), R_cm term multiplied through.
    const double rcm_term = d.k8 * d.k9 * (d.k10 * (pi * xi + d.k2) * L * Cv + (d.k1 * pi + d.k2) * k34 * d.k8);
    const double e1 = rcm_term - k34 * d.k8 * d.k8 * d.k9 * kappa * pi / (pi * xi + d.k2) * R0m * R0m;
    const double e0 = k34 * d.k8 * d.k8 * d.k9 * kappa * (1.0 - R0m * R0m);
    return {e2, e1, e0};
}

EndemicPolynomial endemic_polynomial(const ModelParams& p, const ModelVariant& v) {
    const ModelParams q = effective(p, v);
    require_vectors(derive_constants(q));
    EndemicPolynomial out{};
    if (v.incidence == Incidence::MassAction) {
        out.form = PolyForm::MassAction;
        out.coeffs = mass_action_quadratic(q);
    } else if (!v.vaccination) {
        out.form = q.delta == 0.0 ? PolyForm::NoVaccinationLin : PolyForm::NoVaccination;
        out.coeffs = q.delta == 0.0 ? no_vaccination_linear(q) : no_vaccination_quadratic(q);
    } else if (q.delta == 0.0) {
        out.form = PolyForm::DeltaZero;
        out.coeffs = delta_zero_quadratic(q);
    } else {
        out.form = PolyForm::Quartic;
        out.coeffs = quartic_closed_form(q);
        out.reconstructed = quartic_reconstructed(q);
        double scale = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < 5; ++i) {
            scale = std::max(scale, std::abs(out.reconstructed[i]));
            diff = std::max(diff, std::abs(out.coeffs[i] - out.reconstructed[i]));
        }
        out.discrepancy = scale > 0.0 ? diff / scale : diff;
    }
    return out;
}

State back_substitute(const ModelParams& p, const ModelVariant& v, double lambda) {
    const ModelParams q = effective(p, v);
    const auto d = derive_constants(q);
    const State dfe = dfe_state(q, v);
    const double pi = d.pi;
    State x = dfe;
    const double S = q.Lambda_h * (pi * lambda + d.k2) / ((lambda + d.k1) * (pi * lambda + d.k2) - q.omega * q.xi);
    const double V = v.vaccination ? q.xi * S / (pi * lambda + d.k2) : 0.0;
    x[Sh] = S;
    x[Vh] = V;
    x[Eh] = lambda * (S + pi * V) / d.k3;
    x[Ih] = q.gamma_h * x[Eh] / d.k4;
    x[Rh] = q.sigma * x[Ih] / q.mu_h;
    double lv = bite(q) * q.beta_vh * (q.eta_h * x[Eh] + x[Ih]);
    if (v.incidence == Incidence::Standard) lv /= human_total(x);
    x[Sv] = q.theta * dfe[Pup] / (lv + d.k8);
    x[Ev] = lv * x[Sv] / d.k9;
    x[Iv] = q.gamma_v * x[Ev] / d.k8;
    return x;
}

EndemicSolution solve_endemic(const ModelParams& p, const ModelVariant& v) {
    EndemicSolution out{endemic_polynomial(p, v), {}, false};
    out.at_threshold = std::abs(variant_reproduction_number(p, v) - 1.0) <= 1e-8;
    const Poly& c = out.poly.governing();
    for (double x : c)
        if (!std::isfinite(x)) throw NumericalError("non-finite endemic polynomial " + poly_text(c));
    for (const auto& z : poly_roots(c))
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NumericalError("root finder failed on " + poly_text(c));

    for (double lambda : positive_real_roots(c)) {
        State x = newton_polish(back_substitute(p, v, lambda), p, v);
        const double res = relative_residual(x, p, v);
        if (!(res <= kEquilibriumTol)) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "endemic state at root %.17g has residual %.3g; polynomial ", lambda, res);
            throw NumericalError(buf + poly_text(c));
        }
        if (!(x[Eh] > 0.0 && x[Ih] > 0.0 && x[Ev] > 0.0 && x[Iv] > 0.0)) continue;
        out.equilibria.push_back(make_equilibrium(x, EquilibriumKind::Endemic, lambda, p, v));
    }
    return out;
}

namespace {

constexpr int kNewtonIterations = 200;
constexpr double kNewtonTol = 1e-12;    // per-capita rate, 1/day
constexpr double kNewtonStepCap = 1.0;  // max log-step per iteration
constexpr double kLogLimit = 600.0;
constexpr double kStartSpan = 1e-4;     // starts drawn log-uniformly in [kStartSpan, 1] x bound

// Newton on G(y) = m(y) F(y) with F the per-capita rhs at x = exp(y) and
// m the deflation factor prod(1/|y - r|^2 + 1) over earlier roots.
std::optional<Eigen::VectorXd> deflated_newton(const ModelParams& p, const ModelVariant& v,
                                               const std::vector<std::size_t>& idx, Eigen::VectorXd y,
                                               const std::vector<Eigen::VectorXd>& roots) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    for (int it = 0; it < kNewtonIterations; ++it) {
        State x{};
        for (Eigen::Index j = 0; j < n; ++j) x[idx[static_cast<std::size_t>(j)]] = std::exp(y[j]);
        State f;
        Eigen::MatrixXd J;
        try {
            f = rhs(x, p, v);
            J = jacobian_exact(x, p, v);
        } catch (const NumericalError&) {
            return std::nullopt;
        }
        Eigen::VectorXd F(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::size_t k = idx[static_cast<std::size_t>(i)];
            F[i] = f[k] / x[k];
        }
        if (!F.allFinite()) return std::nullopt;
        if (F.lpNorm<Eigen::Infinity>() < kNewtonTol) return y;

        Eigen::MatrixXd JF(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                JF(i, j) = J(i, j) * x[idx[static_cast<std::size_t>(j)]] / x[idx[static_cast<std::size_t>(i)]] -
                           (i == j ? F[i] : 0.0);

        double m = 1.0;
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
        for (const auto& r : roots) {
            const Eigen::VectorXd diff = y - r;
            const double dist = diff.squaredNorm();
            const double mr = 1.0 / dist + 1.0;
            m *= mr;
            grad += (-2.0 / (dist * dist) / mr) * diff;
        }
        const Eigen::VectorXd G = m * F;
        const Eigen::MatrixXd JG = m * (JF + F * grad.transpose());
        Eigen::VectorXd dy = JG.completeOrthogonalDecomposition().solve(-G);
        if (!dy.allFinite()) return std::nullopt;
        const double step = dy.lpNorm<Eigen::Infinity>();
        if (step > kNewtonStepCap) dy *= kNewtonStepCap / step;
        y += dy;
        if (y.cwiseAbs().maxCoeff() > kLogLimit) return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

std::vector<Equilibrium> newton_steady_states(const ModelParams& p, const ModelVariant& v, int starts,
                                              std::uint64_t seed) {
    const ModelParams q = effective(p, v);
    const State dfe = dfe_state(q, v);
    const auto idx = active_indices(v);
    const auto n = static_cast<Eigen::Index>(idx.size());

    State bound = dfe;
    for (std::size_t i = Sh; i <= Rh; ++i) bound[i] = q.Lambda_h / q.mu_h;
    bound[Ev] = bound[Iv] = dfe[Sv];

    CounterRng rng(seed, 0x6e6577746f6eULL);
    std::vector<Eigen::VectorXd> roots;
    std::vector<Equilibrium> found;
    for (int k = 0; k < starts; ++k) {
        Eigen::VectorXd y(n);
        for (Eigen::Index j = 0; j < n; ++j)
            y[j] = std::log(bound[idx[static_cast<std::size_t>(j)]]) + std::log(kStartSpan) * rng.uniform();
        const auto r = deflated_newton(q, v, idx, y, roots);
        if (!r) continue;
        roots.push_back(*r);

        State x{};
        for (Eigen::Index j = 0; j < n; ++j) x[idx[static_cast<std::size_t>(j)]] = std::exp((*r)[j]);
        x = newton_polish(x, q, v);
        if (relative_residual(x, q, v) > kEquilibriumTol) continue;
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](const Equilibrium& e) { return state_distance(e.state, x) <= 1e-6; });
        if (dup) continue;
        found.push_back(make_equilibrium(x, EquilibriumKind::Endemic, force_of_infection(x, q, v).human, q, v));
    }
    std::sort(found.begin(), found.end(),
              [](const Equilibrium& a, const Equilibrium& b) { return a.lambda_root < b.lambda_root; });
    return found;
}

}  // namespace arbo
