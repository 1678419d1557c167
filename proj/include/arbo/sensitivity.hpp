#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "arbo/params.hpp"

namespace arbo {

constexpr double kLocalStep = 1e-6;  // relative central-difference step

struct LocalIndex {
    std::string parameter;
    double index;   // (psi / R0) dR0/dpsi
    int rank;       // 1 = largest |index|
    bool analytic;  // exact structural value rather than a difference quotient
};

// Normalized sensitivity of R0 to every parameter, in parameter-table order.
// Throws NumericalError when R0 = 0.
std::vector<LocalIndex> local_indices(const ModelParams& p);

struct ParamRange {
    std::string parameter;
    double lo, hi;  // lo == hi holds the parameter fixed
};

struct LhsConfig {
    int samples = 5000;
    std::uint64_t seed = 1;
    std::vector<ParamRange> ranges;
};

// [0.5, 1.5] x value, narrowed symmetrically about the value where a bound
// would be crossed, for all parameters.
std::vector<ParamRange> default_ranges(const ModelParams& p);
void validate_ranges(const std::vector<ParamRange>& ranges, const ModelParams& base);

// One row per sample, one column per range, stratified per column.
Eigen::MatrixXd lhs_sample(const LhsConfig& cfg);

// Average ranks (1-based) with ties sharing their mean rank.
Eigen::VectorXd rank_transform(const Eigen::VectorXd& x);

struct PrccEntry {
    std::string parameter;
    double prcc;      // NaN when not applicable
    bool applicable;  // false for constant columns
    int rank;         // by |prcc|, 1 = largest; 0 when not applicable
};

struct OutputStats {
    double mean, std, p_gt_1;
};

OutputStats output_stats(const Eigen::VectorXd& y);

std::vector<PrccEntry> prcc(const Eigen::MatrixXd& samples, const Eigen::VectorXd& outputs,
                            const std::vector<std::string>& names);

struct GlobalReport {
    Eigen::MatrixXd samples;
    Eigen::VectorXd r0;
    OutputStats stats;
    std::vector<PrccEntry> prcc;
};

// Samples, evaluates R0 per row (0 when N <= 1) and computes PRCCs. Rows
// are evaluated concurrently and gathered in order.
GlobalReport global_analysis(const ModelParams& base, const LhsConfig& cfg, int threads = 0);

}  // namespace arbo
