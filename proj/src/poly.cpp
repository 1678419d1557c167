#include "arbo/poly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>

namespace arbo {

Poly trim_leading_zeros(const Poly& c) {
    std::size_t i = 0;
    while (i + 1 < c.size() && c[i] == 0.0) ++i;
    return Poly(c.begin() + static_cast<std::ptrdiff_t>(i), c.end());
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly poly_add(const Poly& a, const Poly& b) {
    const std::size_t n = std::max(a.size(), b.size());
    Poly r(n, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) r[n - a.size() + i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[n - b.size() + i] += b[i];
    return r;
}

Poly poly_scale(const Poly& a, double k) {
    Poly r = a;
    for (double& x : r) x *= k;
    return r;
}

std::complex<double> poly_eval(const Poly& c, std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (double x : c) acc = acc * z + x;
    return acc;
}

std::complex<double> poly_deriv_eval(const Poly& c, std::complex<double> z) {
    std::complex<double> acc = 0.0;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i + 1 < n; ++i) acc = acc * z + c[i] * static_cast<double>(n - 1 - i);
    return acc;
}

std::vector<std::complex<double>> poly_roots(const Poly& coeffs) {
    const Poly c = trim_leading_zeros(coeffs);
    const std::size_t deg = c.empty() ? 0 : c.size() - 1;
    if (deg == 0 || c[0] == 0.0) return {};

    std::vector<std::complex<double>> roots;
    if (deg == 1) {
        roots.push_back(-c[1] / c[0]);
    } else {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
        for (std::size_t j = 0; j < deg; ++j) comp(0, static_cast<Eigen::Index>(j)) = -c[j + 1] / c[0];
        for (std::size_t i = 1; i < deg; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        const auto& ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) roots.push_back(ev[i]);
    }

    for (auto& z : roots) {
        const auto d = poly_deriv_eval(c, z);
        if (std::abs(d) > 0.0) {
            const auto next = z - poly_eval(c, z) / d;
            if (std::isfinite(next.real()) && std::isfinite(next.imag()) &&
                std::abs(poly_eval(c, next)) <= std::abs(poly_eval(c, z)))
                z = next;
        }
    }
    return roots;
}

std::string poly_text(const Poly& c) {
    std::string out = "[";
    char buf[32];
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", c[i]);
        if (i) out += ", ";
        out += buf;
    }
    return out + "]";
}

std::vector<double> positive_real_roots(const Poly& c) {
    std::vector<double> out;
    for (const auto& z : poly_roots(c)) {
        if (std::abs(z.imag()) <= kRealRootTol * (1.0 + std::abs(z)) && z.real() > kPositiveRootTol)
            out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace arbo
