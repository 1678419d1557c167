#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arbo/errors.hpp"
#include "arbo/rng.hpp"
#include "arbo/sensitivity.hpp"
#include "arbo/thresholds.hpp"

using namespace arbo;

namespace {

// Fourth-order central difference of the normalized index.
double index_oracle(const ModelParams& p, const std::string& key) {
    const double v = get_param(p, key);
    const double h = 1e-3 * v;
    auto r0_at = [&](double x) {
        ModelParams q = p;
        set_param(q, key, x);
        return basic_reproduction_number(q);
    };
    const double d = (-r0_at(v + 2 * h) + 8 * r0_at(v + h) - 8 * r0_at(v - h) + r0_at(v - 2 * h)) / (12 * h);
    return d * v / basic_reproduction_number(p);
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd x = a.array() - a.mean(), y = b.array() - b.mean();
    return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

Eigen::VectorXd uniform_column(CounterRng& rng, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform();
    return v;
}

std::vector<std::string> names_for(int k) {
    std::vector<std::string> n;
    for (int j = 0; j < k; ++j) n.push_back("x" + std::to_string(j));
    return n;
}

}  // namespace

TEST_CASE("local indices match a fourth-order difference oracle") {
    // interior point so that every two-sided stencil stays admissible
    ModelParams p = baseline();
    p.a = 0.9;
    p.beta_hv = 0.6;
    p.beta_vh = 0.6;
    const auto idx = local_indices(p);
    REQUIRE(idx.size() == kParamCount);
    for (const auto& li : idx) {
        if (get_param(p, li.parameter) == 0.0) {
            CHECK(li.index == 0.0);
            continue;
        }
        CHECK(li.index == doctest::Approx(index_oracle(p, li.parameter)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("structural indices are exact") {
    const auto idx = local_indices(baseline());
    auto find = [&](const char* key) {
        return *std::find_if(idx.begin(), idx.end(), [&](const LocalIndex& l) { return l.parameter == key; });
    };
    CHECK(find("a").index == 1.0);
    CHECK(find("beta_hv").index == 0.5);
    CHECK(find("beta_vh").index == 0.5);
    int top = 0;
    for (const auto& l : idx) top += l.rank == 1;
    CHECK(top >= 1);
}

TEST_CASE("local indices need a positive reproduction number") {
    ModelParams p = baseline();
    p.theta = 1e-4;
    CHECK_THROWS_AS(local_indices(p), NumericalError);
}

TEST_CASE("Latin hypercube puts one sample in each stratum") {
    LhsConfig cfg;
    cfg.samples = 257;
    cfg.seed = 5;
    cfg.ranges = default_ranges(baseline());
    const Eigen::MatrixXd s = lhs_sample(cfg);
    REQUIRE(s.rows() == cfg.samples);
    REQUIRE(s.cols() == static_cast<Eigen::Index>(cfg.ranges.size()));
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
        const auto& r = cfg.ranges[static_cast<std::size_t>(j)];
        if (r.lo == r.hi) {
            CHECK((s.col(j).array() == r.lo).all());
            continue;
        }
        std::vector<int> seen(static_cast<std::size_t>(cfg.samples), 0);
        for (Eigen::Index i = 0; i < s.rows(); ++i) {
            const double u = (s(i, j) - r.lo) / (r.hi - r.lo);
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
            seen[static_cast<std::size_t>(std::floor(u * cfg.samples))]++;
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
        CHECK(s.col(j).mean() == doctest::Approx(0.5 * (r.lo + r.hi)).epsilon(0.01));
    }
}

TEST_CASE("sampling is reproducible from the seed") {
    LhsConfig cfg;
    cfg.samples = 100;
    cfg.ranges = default_ranges(baseline());
    cfg.seed = 77;
    const Eigen::MatrixXd a = lhs_sample(cfg), b = lhs_sample(cfg);
    CHECK(a == b);
    cfg.seed = 78;
    CHECK_FALSE(a == lhs_sample(cfg));
}

TEST_CASE("ranks average over ties") {
    Eigen::VectorXd x(6);
    x << 3.0, 1.0, 3.0, 2.0, 5.0, 3.0;
    Eigen::VectorXd want(6);
    want << 4.0, 1.0, 4.0, 2.0, 6.0, 4.0;
    CHECK(rank_transform(x) == want);
}

TEST_CASE("PRCC of an output equal to one input is one") {
    CounterRng rng(41, 0);
    const int n = 300;
    Eigen::MatrixXd s(n, 3);
    for (int j = 0; j < 3; ++j) s.col(j) = uniform_column(rng, n);
    const Eigen::VectorXd y = s.col(1).array().exp();
    const auto r = prcc(s, y, names_for(3));
    CHECK(r[1].prcc == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r[1].rank == 1);
}

TEST_CASE("PRCC of independent noise is near zero") {
    const int n = 2000, seeds = 10;
    double mean_abs = 0.0;
    for (int k = 0; k < seeds; ++k) {
        CounterRng rng(100 + k, 0);
        Eigen::MatrixXd s(n, 4);
        for (int j = 0; j < 4; ++j) s.col(j) = uniform_column(rng, n);
        const Eigen::VectorXd y = uniform_column(rng, n);
        for (const auto& e : prcc(s, y, names_for(4))) mean_abs += std::abs(e.prcc) / (4.0 * seeds);
    }
    CHECK(mean_abs <= 0.05);
}

TEST_CASE("PRCC is invariant under row permutation") {
    CounterRng rng(42, 0);
    const int n = 200;
    Eigen::MatrixXd s(n, 3);
    for (int j = 0; j < 3; ++j) s.col(j) = uniform_column(rng, n);
    const Eigen::VectorXd y = s.col(0) - 2.0 * s.col(2) + 0.3 * uniform_column(rng, n);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[3], perm[150]);
    Eigen::MatrixXd sp(n, 3);
    Eigen::VectorXd yp(n);
    for (int i = 0; i < n; ++i) {
        sp.row(i) = s.row(perm[static_cast<std::size_t>(i)]);
        yp(i) = y(perm[static_cast<std::size_t>(i)]);
    }
    const auto a = prcc(s, y, names_for(3)), b = prcc(sp, yp, names_for(3));
    for (std::size_t j = 0; j < 3; ++j) CHECK(a[j].prcc == doctest::Approx(b[j].prcc).epsilon(1e-12));
}

TEST_CASE("constant columns are not applicable") {
    CounterRng rng(43, 0);
    const int n = 50;
    Eigen::MatrixXd s(n, 2);
    s.col(0) = uniform_column(rng, n);
    s.col(1).setConstant(2.0);
    const auto r = prcc(s, s.col(0), names_for(2));
    CHECK_FALSE(r[1].applicable);
    CHECK(std::isnan(r[1].prcc));
    CHECK(r[1].rank == 0);
    CHECK(r[0].applicable);
}

TEST_CASE("two inputs reduce to the partial correlation formula") {
    CounterRng rng(44, 0);
    const int n = 500;
    Eigen::MatrixXd s(n, 2);
    s.col(0) = uniform_column(rng, n);
    s.col(1) = 0.5 * s.col(0) + uniform_column(rng, n);
    const Eigen::VectorXd y = s.col(0) + s.col(1) + uniform_column(rng, n);
    const Eigen::VectorXd r0 = rank_transform(s.col(0)), r1 = rank_transform(s.col(1)), ry = rank_transform(y);
    const double a = pearson(r0, ry), b = pearson(r1, ry), c = pearson(r0, r1);
    const double want0 = (a - c * b) / std::sqrt((1 - c * c) * (1 - b * b));
    const double want1 = (b - c * a) / std::sqrt((1 - c * c) * (1 - a * a));
    const auto r = prcc(s, y, names_for(2));
    CHECK(r[0].prcc == doctest::Approx(want0).epsilon(1e-10));
    CHECK(r[1].prcc == doctest::Approx(want1).epsilon(1e-10));
}

TEST_CASE("output summary") {
    Eigen::VectorXd y(4);
    y << 0.5, 1.5, 2.0, 1.0;
    const auto st = output_stats(y);
    CHECK(st.mean == doctest::Approx(1.25));
    CHECK(st.std == doctest::Approx(std::sqrt(1.25 / 3.0)));
    CHECK(st.p_gt_1 == doctest::Approx(0.5));
}

TEST_CASE("global analysis is deterministic and independent of thread count") {
    LhsConfig cfg;
    cfg.samples = 300;
    cfg.seed = 9;
    cfg.ranges = default_ranges(baseline());
    const auto a = global_analysis(baseline(), cfg, 1);
    const auto b = global_analysis(baseline(), cfg, 3);
    CHECK(a.r0 == b.r0);
    REQUIRE(a.prcc.size() == b.prcc.size());
    for (std::size_t j = 0; j < a.prcc.size(); ++j)
        if (a.prcc[j].applicable) CHECK(a.prcc[j].prcc == b.prcc[j].prcc);
}

TEST_CASE("range validation") {
    const ModelParams p = baseline();
    CHECK_THROWS_AS(validate_ranges({{"nope", 0.0, 1.0}}, p), ValidationError);
    CHECK_THROWS_AS(validate_ranges({{"theta", 0.2, 0.1}}, p), ValidationError);
    CHECK_THROWS_AS(validate_ranges({{"alpha_1", 0.0, 1.0}}, p), ValidationError);
    CHECK_NOTHROW(validate_ranges(default_ranges(p), p));
}
