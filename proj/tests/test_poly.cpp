#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "arbo/poly.hpp"

using namespace arbo;

TEST_CASE("roots of a product of known factors") {
    // (x - 1)(x - 2)(x + 3)(x - 0.5)
    Poly p{1.0};
    for (double r : {1.0, 2.0, -3.0, 0.5}) p = poly_mul(p, {1.0, -r});
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == 4);
    std::vector<double> re;
    for (auto z : roots) {
        CHECK(std::abs(z.imag()) < 1e-12);
        re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-3.0).epsilon(1e-13));
    CHECK(re[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(re[2] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(re[3] == doctest::Approx(2.0).epsilon(1e-13));

    const auto pos = positive_real_roots(p);
    REQUIRE(pos.size() == 3);
    CHECK(pos[0] == doctest::Approx(0.5));
}

TEST_CASE("complex pairs are not reported as real") {
    // x^2 + 1 times (x - 4)
    const Poly p = poly_mul({1.0, 0.0, 1.0}, {1.0, -4.0});
    const auto pos = positive_real_roots(p);
    REQUIRE(pos.size() == 1);
    CHECK(pos[0] == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("badly scaled coefficients") {
    // roots 1e-6 and 1e4
    const Poly p = poly_mul({1.0, -1e-6}, {1.0, -1e4});
    const auto pos = positive_real_roots(poly_scale(p, 1e12));
    REQUIRE(pos.size() == 2);
    CHECK(pos[0] == doctest::Approx(1e-6).epsilon(1e-9));
    CHECK(pos[1] == doctest::Approx(1e4).epsilon(1e-12));
}

TEST_CASE("leading zeros and degenerate input") {
    CHECK(trim_leading_zeros({0.0, 0.0, 2.0, -4.0}) == Poly{2.0, -4.0});
    const auto pos = positive_real_roots({0.0, 2.0, -4.0});
    REQUIRE(pos.size() == 1);
    CHECK(pos[0] == doctest::Approx(2.0));
    CHECK(positive_real_roots({3.0}).empty());
    CHECK(positive_real_roots({1.0, 5.0}).empty());
}

TEST_CASE("arithmetic helpers") {
    CHECK(poly_add({1.0, 2.0}, {3.0, 4.0, 5.0}) == Poly{3.0, 5.0, 7.0});
    CHECK(poly_eval({1.0, -3.0, 2.0}, 2.0).real() == 0.0);
    CHECK(poly_deriv_eval({1.0, -3.0, 2.0}, 2.0).real() == 1.0);
}
