#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

#include "arbo/params.hpp"
#include "arbo/poly.hpp"
#include "arbo/state.hpp"

namespace arbo {

// Real parts within this band of zero are reported as marginal (1/day).
constexpr double kMarginalTol = 1e-7;
// classify() refuses states whose relative residual exceeds this.
constexpr double kEquilibriumTol = 1e-6;

enum class Stability { Stable, Unstable, Marginal };

const char* stability_name(Stability s);

// Matrices are over the variant's active indices (10x10 without vaccination).
Eigen::MatrixXd jacobian(const State& x, const ModelParams& p, const ModelVariant& v);
// Forward-mode derivative of the vector field, exact to rounding.
Eigen::MatrixXd jacobian_exact(const State& x, const ModelParams& p, const ModelVariant& v);

// max |rhs| / max(1, max |x|)
double relative_residual(const State& x, const ModelParams& p, const ModelVariant& v);

struct StabilityVerdict {
    double modulus;  // largest real part of the spectrum
    Stability verdict;
    std::vector<std::complex<double>> spectrum;
};

StabilityVerdict classify(const State& x, const ModelParams& p, const ModelVariant& v);

// Characteristic factor of the aquatic/adult block at the trivial equilibrium.
Poly phi2(const ModelParams& p);

struct RouthHurwitz {
    double A1, A2, A3, A4;
    double H1, H2, H3;
    bool satisfied;
};

RouthHurwitz routh_hurwitz_phi2(const ModelParams& p);

std::array<double, kStateDim> lyapunov_weights(const ModelParams& p);
double lyapunov_trivial(const State& x, const ModelParams& p);

// Transmission probability at which R0 = 1.
double beta_hv_critical(const ModelParams& p);

enum class Direction { Backward, Forward, Degenerate };
const char* direction_name(Direction d);

struct BifurcationReport {
    double beta_critical;
    std::array<double, kStateDim> v;  // left null vector, v.w = 1
    std::array<double, kStateDim> w;  // right null vector, w[I_v] > 0
    double A1, A2;
    Direction direction;
    double kernel_residual;  // max(|vJ|, |Jw|) / |J|
    double singular_gap;     // second-smallest / largest singular value

    // Spread of componentwise ratios numeric/closed-form (0 = proportional).
    double left_spread;
    double right_spread;
    double right_spread_printed;  // w_1, w_2 as printed (pi missing on k1 V0)

    // Printed Gamma_1 - Gamma_2 and A2 formulas, evaluated verbatim with the
    // printed eigenvectors, for comparison with A1 and A2.
    double gamma_diff_printed;
    double A2_printed;
    bool gamma_mismatch;  // |gamma_diff_printed - A1| > 5% of |A1|

    // Central finite-difference estimates for comparison.
    double A1_fd, A2_fd;
};

BifurcationReport bifurcation_coefficients(const ModelParams& p);

struct SweepRow {
    double beta_hv;
    double R0;
    std::string branch;  // dfe, endemic-1, endemic-2, ...
    double lambda_root;
    double E_h, E_v;
    std::string stable;  // stable / unstable / marginal, or the error text
    bool ok;
};

std::vector<SweepRow> bifurcation_sweep(const ModelParams& p, const ModelVariant& v, double beta_lo, double beta_hi,
                                        int points, int threads = 0);

struct CoexistenceWindow {
    bool found;
    double beta_lo, beta_hi;  // open interval with two endemic equilibria
    double R_lo, R_hi;
};

// Locates the coexistence interval on a grid and refines both edges by
// bisection to `tol` in beta_hv.
CoexistenceWindow coexistence_window(const ModelParams& p, const ModelVariant& v, double beta_lo, double beta_hi,
                                     int points, double tol = 1e-9, int threads = 0);

}  // namespace arbo
