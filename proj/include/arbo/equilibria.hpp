#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arbo/params.hpp"
#include "arbo/poly.hpp"
#include "arbo/stability.hpp"
#include "arbo/state.hpp"

namespace arbo {

enum class EquilibriumKind { Trivial, DiseaseFree, Endemic };
const char* kind_name(EquilibriumKind k);

struct Equilibrium {
    State state;
    EquilibriumKind kind;
    double lambda_root;  // human force of infection; 0 for disease-free states
    double residual;     // relative, see relative_residual
    Stability stability;
    double modulus;
};

struct DiseaseFreeStates {
    Equilibrium trivial;
    std::optional<Equilibrium> dfe;
};

DiseaseFreeStates disease_free_states(const ModelParams& p, const ModelVariant& v = {});

enum class PolyForm {
    Quartic,           // full model, delta > 0
    DeltaZero,         // full model, delta = 0 (quadratic)
    NoVaccination,     // quadratic
    NoVaccinationLin,  // no vaccination, delta = 0 (linear)
    MassAction,        // quadratic
};
const char* poly_form_name(PolyForm f);

struct EndemicPolynomial {
    PolyForm form;
    Poly coeffs;  // closed-form coefficients, highest degree first

    // Quartic only: the same polynomial obtained by eliminating the state
    // symbolically. It governs the roots; coeffs is kept for comparison.
    Poly reconstructed;
    double discrepancy = 0.0;  // max |coeffs - reconstructed| / max |reconstructed|

    const Poly& governing() const { return reconstructed.empty() ? coeffs : reconstructed; }
};

EndemicPolynomial endemic_polynomial(const ModelParams& p, const ModelVariant& v);

Poly quartic_closed_form(const ModelParams& p);
Poly quartic_reconstructed(const ModelParams& p);
Poly delta_zero_quadratic(const ModelParams& p);
Poly no_vaccination_quadratic(const ModelParams& p);
Poly no_vaccination_linear(const ModelParams& p);
Poly mass_action_quadratic(const ModelParams& p);

// Steady state with human force of infection `lambda` (aquatic and adult
// totals at their DFE values).
State back_substitute(const ModelParams& p, const ModelVariant& v, double lambda);

struct EndemicSolution {
    EndemicPolynomial poly;
    std::vector<Equilibrium> equilibria;  // ascending lambda_root
    bool at_threshold;                    // reproduction number within 1e-8 of 1
};

EndemicSolution solve_endemic(const ModelParams& p, const ModelVariant& v);

// Independent search: damped Newton on log-coordinates from random interior
// starts, with deflation of roots already found.
std::vector<Equilibrium> newton_steady_states(const ModelParams& p, const ModelVariant& v, int starts = 50,
                                              std::uint64_t seed = 1);

// Relative distance max|a-b| / max(1, max|a|, max|b|).
double state_distance(const State& a, const State& b);

}  // namespace arbo
