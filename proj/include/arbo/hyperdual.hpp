#pragma once

// Hyper-dual numbers a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0.
// Evaluating f at x + e1 u + e2 w gives f, Df u, Df w and D2f[u, w] exactly.

namespace arbo {

struct HyperDual {
    double a = 0, b = 0, c = 0, d = 0;

    constexpr HyperDual() = default;
    constexpr HyperDual(double v) : a(v) {}
    constexpr HyperDual(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    HyperDual& operator+=(const HyperDual& o) { a += o.a; b += o.b; c += o.c; d += o.d; return *this; }
    HyperDual& operator-=(const HyperDual& o) { a -= o.a; b -= o.b; c -= o.c; d -= o.d; return *this; }
};

inline HyperDual operator+(HyperDual x, const HyperDual& y) { return x += y; }
inline HyperDual operator-(HyperDual x, const HyperDual& y) { return x -= y; }
inline HyperDual operator-(const HyperDual& x) { return {-x.a, -x.b, -x.c, -x.d}; }

inline HyperDual operator*(const HyperDual& x, const HyperDual& y) {
    return {x.a * y.a, x.a * y.b + x.b * y.a, x.a * y.c + x.c * y.a,
            x.a * y.d + x.b * y.c + x.c * y.b + x.d * y.a};
}

inline HyperDual inverse(const HyperDual& y) {
    const double r = 1.0 / y.a;
    const double r2 = r * r;
    return {r, -y.b * r2, -y.c * r2, 2.0 * y.b * y.c * r2 * r - y.d * r2};
}

inline HyperDual operator/(const HyperDual& x, const HyperDual& y) { return x * inverse(y); }

inline double value_of(double x) { return x; }
inline double value_of(const HyperDual& x) { return x.a; }

}  // namespace arbo
