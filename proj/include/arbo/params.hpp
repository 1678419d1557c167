#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arbo {

// Biological and control parameters. Units are per day unless noted.
struct ModelParams {
    double Lambda_h = 2.5;              // humans/day
    double mu_h = 1.0 / (67.0 * 365.0);
    double xi = 0.5;
    double omega = 0.05;
    double epsilon = 0.61;
    double a = 1.0;
    double beta_hv = 0.75;
    double beta_vh = 0.75;
    double gamma_h = 1.0 / 14.0;
    double gamma_v = 1.0 / 21.0;
    double delta = 0.001;
    double sigma = 0.1428;
    double eta_h = 0.35;
    double eta_v = 0.35;
    double mu_v = 1.0 / 30.0;
    double theta = 0.08;
    double mu_b = 6.0;
    double Gamma_E = 10000.0;
    double Gamma_L = 5000.0;
    double mu_E = 0.2;
    double mu_L = 0.4;
    double mu_P = 0.4;
    double s = 0.7;
    double l = 0.5;
    double eta_1 = 0.001;
    double eta_2 = 0.3;
    double alpha_1 = 0.2;
    double alpha_2 = 0.5;
    double c_m = 0.01;

    bool operator==(const ModelParams&) const = default;
};

enum class Bound { NonNegative, Positive, UnitClosed, UnitHalfOpen, UnitPositiveClosed };

struct ParamSpec {
    const char* key;
    double ModelParams::*field;
    Bound bound;
    const char* description;
};

constexpr std::size_t kParamCount = 29;
const std::array<ParamSpec, kParamCount>& param_specs();
const ParamSpec* find_param(std::string_view key);

// Throws ValidationError naming the first offending field.
void validate(const ModelParams& p);
std::string bound_text(Bound b);

enum class Incidence { Standard, MassAction };

struct ModelVariant {
    Incidence incidence = Incidence::Standard;
    bool vaccination = true;
    bool delta_zero = false;

    bool operator==(const ModelVariant&) const = default;
};

std::string variant_name(const ModelVariant& v);
ModelVariant parse_variant(std::string_view name);

// Applies the variant's structural overrides (delta=0, no xi/omega).
ModelParams effective(const ModelParams& p, const ModelVariant& v);

// Instantaneous control levels; pulse schedules override these without
// touching ModelParams.
struct ControlOverrides {
    double alpha_1 = 0.0;
    double c_m = 0.0;
    double eta_1 = 0.0;
    double eta_2 = 0.0;
    double alpha_2 = 1.0;
};

ControlOverrides controls_of(const ModelParams& p);
ModelParams with_controls(ModelParams p, const ControlOverrides& c);

struct DerivedConstants {
    double k1, k2, k3, k4, k5, k6, k7, k8, k9;
    double K_E, K_L, pi;
    double k10, k11, K12;
    double net_reproductive;  // N
    double n;                 // N - 1
};

DerivedConstants derive_constants(const ModelParams& p);
// Same formulas without validation; used by pure evaluators.
DerivedConstants derive_unchecked(const ModelParams& p);

// Named parameter sets.
ModelParams baseline();
ModelParams backward_figure(double beta_hv = 0.0105);
ModelParams forward_figure();
ModelParams no_vaccination_illustration();
ModelParams no_vaccination_reconstructed();

void write_params(std::ostream& os, const ModelParams& p);
double get_param(const ModelParams& p, std::string_view key);
void set_param(ModelParams& p, std::string_view key, double value);

}  // namespace arbo
