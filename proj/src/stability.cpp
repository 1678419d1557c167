#include "arbo/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "arbo/equilibria.hpp"
#include "arbo/errors.hpp"
#include "arbo/model.hpp"
#include "arbo/thresholds.hpp"
#include "parallel.hpp"

namespace arbo {

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "";
}

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Backward: return "backward";
        case Direction::Forward: return "forward";
        case Direction::Degenerate: return "degenerate";
    }
    return "";
}

namespace {

constexpr double kFdJacobianStep = 1e-7;   // h_i = step * max(1, |x_i|)
constexpr double kFdSecondStep = 1e-5;     // relative to |x| / |w|
constexpr double kFdBetaStep = 1e-6;       // relative to beta*
constexpr double kKernelGap = 1e-10;       // second-smallest singular value / largest
constexpr double kGammaMismatch = 0.05;

using Vec = std::array<double, kStateDim>;

// Evaluates the vector field on hyper-dual inputs x + e1 u + e2 w with
// beta_hv + e2 db, returning the dual parts per component.
std::array<HyperDual, kStateDim> dual_field(const State& x, const Vec& u, const Vec& w, const ModelParams& q,
                                            const ModelVariant& v, double db) {
    std::array<HyperDual, kStateDim> xd, dx;
    for (std::size_t i = 0; i < kStateDim; ++i) xd[i] = HyperDual(x[i], u[i], w[i], 0.0);
    detail::vector_field<HyperDual>(xd.data(), dx.data(), q, v, HyperDual(q.beta_hv, 0.0, db, 0.0));
    return dx;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kStateDim; ++i) s += a[i] * b[i];
    return s;
}

State axpy(const State& x, double h, const Vec& w) {
    State y = x;
    for (std::size_t i = 0; i < kStateDim; ++i) y[i] += h * w[i];
    return y;
}

// (max - min) / max|.| of num_i / ref_i over components with ref_i != 0;
// components with ref_i == 0 contribute |num_i| / max|num|.
double ratio_spread(const Vec& num, const Vec& ref) {
    double lo = INFINITY, hi = -INFINITY, big = 0.0, leak = 0.0, nmax = 0.0;
    for (double c : num) nmax = std::max(nmax, std::abs(c));
    for (std::size_t i = 0; i < kStateDim; ++i) {
        if (ref[i] != 0.0) {
            const double r = num[i] / ref[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            big = std::max(big, std::abs(r));
        } else if (nmax > 0.0) {
            leak = std::max(leak, std::abs(num[i]) / nmax);
        }
    }
    return std::max(big > 0.0 ? (hi - lo) / big : 0.0, leak);
}

}  // namespace

Eigen::MatrixXd jacobian_exact(const State& x, const ModelParams& p, const ModelVariant& v) {
    const ModelParams q = effective(p, v);
    const auto idx = active_indices(v);
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd J(n, n);
    const Vec zero{};
    for (Eigen::Index j = 0; j < n; ++j) {
        Vec u{};
        u[idx[static_cast<std::size_t>(j)]] = 1.0;
        const auto dx = dual_field(x, u, zero, q, v, 0.0);
        for (Eigen::Index i = 0; i < n; ++i) J(i, j) = dx[idx[static_cast<std::size_t>(i)]].b;
    }
    return J;
}

Eigen::MatrixXd jacobian(const State& x, const ModelParams& p, const ModelVariant& v) {
    const auto idx = active_indices(v);
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd J(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const std::size_t k = idx[static_cast<std::size_t>(j)];
        const double h = kFdJacobianStep * std::max(1.0, std::abs(x[k]));
        State xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const State fp = rhs(xp, p, v), fm = rhs(xm, p, v);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::size_t r = idx[static_cast<std::size_t>(i)];
            J(i, j) = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    return J;
}

double relative_residual(const State& x, const ModelParams& p, const ModelVariant& v) {
    return max_abs(rhs(x, p, v)) / std::max(1.0, max_abs(x));
}

StabilityVerdict classify(const State& x, const ModelParams& p, const ModelVariant& v) {
    const double res = relative_residual(x, p, v);
    if (!(res <= kEquilibriumTol)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "state is not an equilibrium (relative residual %.3g)", res);
        throw ValidationError("state", buf);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(jacobian_exact(x, p, v), false);
    StabilityVerdict out{-INFINITY, Stability::Stable, {}};
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        out.spectrum.push_back(es.eigenvalues()[i]);
        out.modulus = std::max(out.modulus, es.eigenvalues()[i].real());
    }
    std::sort(out.spectrum.begin(), out.spectrum.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    if (out.modulus > kMarginalTol)
        out.verdict = Stability::Unstable;
    else if (out.modulus >= -kMarginalTol)
        out.verdict = Stability::Marginal;
    return out;
}

namespace {

RouthHurwitz phi2_coefficients(const ModelParams& p) {
    const auto d = derive_constants(p);
    RouthHurwitz r{};
    r.A1 = d.k5 + d.k6 + d.k7 + d.k8;
    r.A2 = d.k8 * (d.k5 + d.k6 + d.k7) + d.k7 * (d.k5 + d.k6) + d.k5 * d.k6;
    r.A3 = d.k5 * d.k6 * d.k7 + d.k8 * (d.k5 * d.k6 + d.k7 * (d.k5 + d.k6));
    r.A4 = d.k5 * d.k6 * d.k7 * d.k8 * (1.0 - d.net_reproductive);
    return r;
}

}  // namespace

Poly phi2(const ModelParams& p) {
    const auto r = phi2_coefficients(p);
    return {1.0, r.A1, r.A2, r.A3, r.A4};
}

RouthHurwitz routh_hurwitz_phi2(const ModelParams& p) {
    RouthHurwitz r = phi2_coefficients(p);
    r.H1 = r.A1;
    r.H2 = r.A1 * r.A2 - r.A3;
    r.H3 = r.A1 * r.A2 * r.A3 - r.A1 * r.A1 * r.A4 - r.A3 * r.A3;
    r.satisfied = r.H1 > 0.0 && r.H2 > 0.0 && r.H3 > 0.0 && r.A4 > 0.0;
    return r;
}

std::array<double, kStateDim> lyapunov_weights(const ModelParams& p) {
    const auto d = derive_constants(p);
    std::array<double, kStateDim> g{};
    g.fill(1.0);
    g[Egg] = d.k8 / p.mu_b;
    g[Lar] = d.k5 * d.k8 / (p.mu_b * p.s);
    g[Pup] = d.k5 * d.k6 * d.k8 / (p.mu_b * p.s * p.l);
    return g;
}

double lyapunov_trivial(const State& x, const ModelParams& p) {
    const auto g = lyapunov_weights(p);
    const State e0 = trivial_state(p);
    double s = 0.0;
    for (std::size_t i = 0; i < kStateDim; ++i) s += g[i] * (x[i] - e0[i]);
    return s;
}

double beta_hv_critical(const ModelParams& p) {
    if (net_reproductive_number(p) <= 1.0) throw NoVectorError();
    ModelParams q = p;
    q.beta_hv = 1.0;
    const double r = basic_reproduction_number(q);
    return 1.0 / (r * r);
}

BifurcationReport bifurcation_coefficients(const ModelParams& p) {
    const ModelVariant full{};
    BifurcationReport out{};
    out.beta_critical = beta_hv_critical(p);
    if (!(out.beta_critical <= 1.0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "critical beta_hv = %.6g is not a probability", out.beta_critical);
        throw NumericalError(buf);
    }
    ModelParams q = p;
    q.beta_hv = out.beta_critical;
    const State x0 = dfe_state(q);
    const Eigen::MatrixXd J = jacobian_exact(x0, q, full);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Eigen::Index n = sv.size();
    out.singular_gap = sv[n - 2] / sv[0];
    if (out.singular_gap <= kKernelGap) throw NumericalError("degenerate bifurcation: kernel dimension exceeds 1");

    Eigen::VectorXd w = svd.matrixV().col(n - 1);
    Eigen::VectorXd v = svd.matrixU().col(n - 1);
    if (w[Iv] < 0.0) w = -w;
    v /= v.dot(w);
    const double jn = J.lpNorm<Eigen::Infinity>();
    out.kernel_residual = std::max((J * w).lpNorm<Eigen::Infinity>() / (jn * w.lpNorm<Eigen::Infinity>()),
                                   (v.transpose() * J).lpNorm<Eigen::Infinity>() / (jn * v.lpNorm<Eigen::Infinity>()));
    for (std::size_t i = 0; i < kStateDim; ++i) {
        out.v[i] = v[static_cast<Eigen::Index>(i)];
        out.w[i] = w[static_cast<Eigen::Index>(i)];
    }

    const Vec zero{};
    const auto second = dual_field(x0, out.w, out.w, q, full, 0.0);
    const auto mixed = dual_field(x0, out.w, zero, q, full, 1.0);
    for (std::size_t k = 0; k < kStateDim; ++k) {
        out.A1 += out.v[k] * second[k].d;
        out.A2 += out.v[k] * mixed[k].d;
    }
    if (out.A2 > 0.0 && out.A1 > 0.0)
        out.direction = Direction::Backward;
    else if (out.A2 > 0.0 && out.A1 < 0.0)
        out.direction = Direction::Forward;
    else
        out.direction = Direction::Degenerate;

    // Finite-difference estimates.
    const double h = kFdSecondStep * max_abs(x0) / w.lpNorm<Eigen::Infinity>();
    const State fp = rhs(axpy(x0, h, out.w), q, full), f0 = rhs(x0, q, full), fm = rhs(axpy(x0, -h, out.w), q, full);
    Vec d2{};
    for (std::size_t k = 0; k < kStateDim; ++k) d2[k] = (fp[k] - 2.0 * f0[k] + fm[k]) / (h * h);
    out.A1_fd = dot(out.v, d2);
    const double hb = kFdBetaStep * q.beta_hv;
    ModelParams qp = q, qm = q;
    qp.beta_hv += hb;
    qm.beta_hv -= hb;
    const State a = rhs(axpy(x0, h, out.w), qp, full), b = rhs(axpy(x0, -h, out.w), qp, full);
    const State c = rhs(axpy(x0, h, out.w), qm, full), e = rhs(axpy(x0, -h, out.w), qm, full);
    Vec dm{};
    for (std::size_t k = 0; k < kStateDim; ++k) dm[k] = (a[k] - b[k] - c[k] + e[k]) / (4.0 * h * hb);
    out.A2_fd = dot(out.v, dm);

    // Closed-form eigenvectors (w_11 = 0, which forces w_9 = w_10 = 0).
    const auto d = derive_constants(q);
    const double f = q.a * (1.0 - q.alpha_1), bs = q.beta_hv;
    const double S0 = x0[Sh], V0 = x0[Vh], Sv0 = x0[Sv], Nh = S0 + V0, H0 = S0 + d.pi * V0;
    const double kappa = d.k1 * d.k2 - q.xi * q.omega;
    Vec vc{};
    vc[Iv] = 1.0;
    vc[Eh] = d.k8 * Nh / (f * bs * H0);
    vc[Ih] = f * q.beta_vh * Sv0 * d.k11 / (d.k4 * d.k9 * Nh);
    vc[Ev] = d.k11 / d.k9;
    Vec wc{};
    wc[Iv] = 1.0;
    wc[Ev] = d.k8 / q.gamma_v;
    wc[Sv] = -d.k9 / q.gamma_v;
    wc[Rh] = q.gamma_h * q.sigma * d.k8 * d.k9 * Nh / (f * q.beta_vh * q.mu_h * q.gamma_v * Sv0 * d.k10);
    wc[Ih] = q.mu_h / q.sigma * wc[Rh];
    wc[Eh] = d.k4 / q.gamma_h * wc[Ih];
    const double X = f * bs * (q.eta_v * wc[Ev] + wc[Iv]) / Nh;
    Vec wp = wc;
    wc[Vh] = -X * (q.xi * S0 + d.k1 * d.pi * V0) / kappa;
    wp[Vh] = -X * (q.xi * S0 + d.k1 * V0) / kappa;
    wc[Sh] = q.omega / d.k1 * wc[Vh] - f * bs * S0 / (d.k1 * Nh) * (q.eta_v * wc[Ev] + wc[Iv]);
    wp[Sh] = q.omega / d.k1 * wp[Vh] - f * bs * S0 / (d.k1 * Nh) * (q.eta_v * wp[Ev] + wp[Iv]);
    out.left_spread = ratio_spread(out.v, vc);
    out.right_spread = ratio_spread(out.w, wc);
    out.right_spread_printed = ratio_spread(out.w, wp);

    // Printed Gamma_1 - Gamma_2 and A2 with the printed vectors, v.w = 1.
    Vec vn = vc;
    const double scale = dot(vc, wp);
    for (double& c : vn) c /= scale;
    const double ev = q.eta_v * wp[Ev] + wp[Iv];
    const double eh = q.eta_h * wp[Eh] + wp[Ih];
    const double g1 = f * bs * (2.0 * V0 * wp[Sh] + d.pi * S0 * wp[Vh]) / (Nh * Nh) * ev * vn[Eh] +
                      f * q.beta_vh * Sv0 / Nh * (eh / Sv0 + (q.eta_h * wp[Eh] + wp[Ih] / Sv0)) * wp[Sv] * vn[Ev];
    const double g2 = 2.0 * f * q.beta_vh * Sv0 / (Nh * Nh) * (wp[Sh] + wp[Vh] + wp[Eh] + wp[Ih] + wp[Rh]) * eh * vn[Ev] +
                      f * bs * H0 * (Nh + 1.0) / (Nh * Nh) * (wp[Eh] + wp[Ih] + wp[Rh]) * ev * vn[Eh];
    out.gamma_diff_printed = g1 - g2;
    out.A2_printed = q.a * H0 / Nh * ev * vn[Eh];
    out.gamma_mismatch = std::abs(out.gamma_diff_printed - out.A1) > kGammaMismatch * std::abs(out.A1);
    return out;
}

namespace {

std::vector<SweepRow> sweep_point(const ModelParams& p, const ModelVariant& v, double beta) {
    std::vector<SweepRow> rows;
    ModelParams q = p;
    q.beta_hv = beta;
    try {
        const double R = variant_reproduction_number(q, v);
        const auto dfs = disease_free_states(q, v);
        if (dfs.dfe) rows.push_back({beta, R, "dfe", 0.0, 0.0, 0.0, stability_name(dfs.dfe->stability), true});
        const auto sol = solve_endemic(q, v);
        int k = 0;
        for (const auto& e : sol.equilibria)
            rows.push_back({beta, R, "endemic-" + std::to_string(++k), e.lambda_root, e.state[Eh], e.state[Ev],
                            stability_name(e.stability), true});
    } catch (const std::exception& ex) {
        rows.push_back({beta, NAN, "error", NAN, NAN, NAN, ex.what(), false});
    }
    return rows;
}

double grid_point(double lo, double hi, int points, int i) {
    return points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

int endemic_count(const ModelParams& p, const ModelVariant& v, double beta) {
    ModelParams q = p;
    q.beta_hv = beta;
    try {
        return static_cast<int>(positive_real_roots(endemic_polynomial(q, v).governing()).size());
    } catch (const std::exception&) {
        return -1;
    }
}

}  // namespace

std::vector<SweepRow> bifurcation_sweep(const ModelParams& p, const ModelVariant& v, double beta_lo, double beta_hi,
                                        int points, int threads) {
    if (points < 2) throw ValidationError("points", "sweep needs at least 2 points");
    if (!(beta_lo <= beta_hi)) throw ValidationError("beta_hv", "sweep range is empty");
    validate(p);
    std::vector<std::vector<SweepRow>> per(static_cast<std::size_t>(points));
    detail::parallel_for(per.size(), threads, [&](std::size_t i) {
        per[i] = sweep_point(p, v, grid_point(beta_lo, beta_hi, points, static_cast<int>(i)));
    });
    std::vector<SweepRow> rows;
    for (auto& r : per) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

CoexistenceWindow coexistence_window(const ModelParams& p, const ModelVariant& v, double beta_lo, double beta_hi,
                                     int points, double tol, int threads) {
    if (points < 2) throw ValidationError("points", "sweep needs at least 2 points");
    validate(p);
    std::vector<int> count(static_cast<std::size_t>(points));
    detail::parallel_for(count.size(), threads, [&](std::size_t i) {
        count[i] = endemic_count(p, v, grid_point(beta_lo, beta_hi, points, static_cast<int>(i)));
    });
    CoexistenceWindow out{false, NAN, NAN, NAN, NAN};
    int first = -1, last = -1;
    for (int i = 0; i < points; ++i)
        if (count[static_cast<std::size_t>(i)] >= 2) {
            if (first < 0) first = i;
            last = i;
        }
    if (first < 0) return out;

    auto two = [&](double b) { return endemic_count(p, v, b) >= 2; };
    // Edge between a point without and a point with two equilibria.
    auto edge = [&](double outside, double inside) {
        while (std::abs(inside - outside) > tol) {
            const double mid = 0.5 * (outside + inside);
            (two(mid) ? inside : outside) = mid;
        }
        return 0.5 * (outside + inside);
    };
    out.found = true;
    out.beta_lo = first > 0 ? edge(grid_point(beta_lo, beta_hi, points, first - 1), grid_point(beta_lo, beta_hi, points, first))
                            : beta_lo;
    out.beta_hi = last + 1 < points
                      ? edge(grid_point(beta_lo, beta_hi, points, last + 1), grid_point(beta_lo, beta_hi, points, last))
                      : beta_hi;
    auto R_at = [&](double b) {
        ModelParams q = p;
        q.beta_hv = b;
        return variant_reproduction_number(q, v);
    };
    out.R_lo = R_at(out.beta_lo);
    out.R_hi = R_at(out.beta_hi);
    return out;
}

}  // namespace arbo
