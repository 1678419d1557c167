#pragma once

#include <complex>
#include <string>
#include <vector>

namespace arbo {

// Coefficients, highest degree first.
using Poly = std::vector<double>;

constexpr double kRealRootTol = 1e-9;      // |Im z| <= tol (1 + |z|)
constexpr double kPositiveRootTol = 1e-12;  // Re z > tol

Poly trim_leading_zeros(const Poly& c);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, double k);
std::complex<double> poly_eval(const Poly& c, std::complex<double> z);
std::complex<double> poly_deriv_eval(const Poly& c, std::complex<double> z);

// Companion-matrix eigenvalues followed by one Newton polish each.
std::vector<std::complex<double>> poly_roots(const Poly& c);

// "[c0, c1, ...]" at full precision, for diagnostics.
std::string poly_text(const Poly& c);

// Real, strictly positive roots in ascending order.
std::vector<double> positive_real_roots(const Poly& c);

}  // namespace arbo
