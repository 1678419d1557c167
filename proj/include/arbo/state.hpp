#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "arbo/params.hpp"

namespace arbo {

constexpr std::size_t kStateDim = 11;

enum Idx : std::size_t { Sh = 0, Vh, Eh, Ih, Rh, Sv, Ev, Iv, Egg, Lar, Pup };

using State = std::array<double, kStateDim>;

const std::array<const char*, kStateDim>& state_names();

inline double human_total(const State& x) { return x[Sh] + x[Vh] + x[Eh] + x[Ih] + x[Rh]; }
inline double vector_total(const State& x) { return x[Sv] + x[Ev] + x[Iv]; }

// Indices that carry dynamics for a variant (V_h is absent without vaccination).
std::vector<std::size_t> active_indices(const ModelVariant& v);

struct RegionBounds {
    double humans, eggs, larvae, pupae, vectors;
};

RegionBounds feasible_bounds(const ModelParams& p);
// True when x is nonnegative and inside the feasible region with relative slack.
bool in_feasible_region(const State& x, const ModelParams& p, double slack = 1e-6);

double max_abs(const State& x);

}  // namespace arbo
