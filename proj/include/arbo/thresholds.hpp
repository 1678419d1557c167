#pragma once

#include <string>
#include <vector>

#include "arbo/params.hpp"
#include "arbo/state.hpp"

namespace arbo {

double net_reproductive_number(const ModelParams& p);

// Closed form; defined as 0 when N <= 1 (no vector population).
double basic_reproduction_number(const ModelParams& p);

// Spectral radius of F V^-1 built at the DFE of the given variant.
// Throws NoVectorError when N <= 1.
double r0_via_ngm(const ModelParams& p, const ModelVariant& v = {});

double rc_threshold(const ModelParams& p);
double r_nv(const ModelParams& p);
// The second threshold of the no-vaccination model (condition on the
// linear coefficient), distinct from rc_threshold.
double r_nv_subthreshold(const ModelParams& p);
double r0_mass(const ModelParams& p);
double r_cm(const ModelParams& p);
double r_b(const ModelParams& p);
double r1(const ModelParams& p);

// The reproduction number that governs the variant's DFE.
double variant_reproduction_number(const ModelParams& p, const ModelVariant& v);

struct ThresholdEntry {
    std::string name;
    double value;
    bool applicable;
};

struct ThresholdReport {
    bool no_vectors = false;  // N <= 1; reproduction numbers reported as 0
    std::vector<ThresholdEntry> entries;

    double value(const std::string& name) const;
};

ThresholdReport threshold_report(const ModelParams& p, const ModelVariant& v);

// Closed-form disease-free states; dfe is only meaningful when N > 1.
State trivial_state(const ModelParams& p, const ModelVariant& v = {});
State dfe_state(const ModelParams& p, const ModelVariant& v = {});

}  // namespace arbo
