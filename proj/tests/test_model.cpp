#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "arbo/model.hpp"
#include "arbo/rng.hpp"
#include "arbo/simulate.hpp"
#include "arbo/stability.hpp"
#include "arbo/thresholds.hpp"

using namespace arbo;

namespace {

State random_state(CounterRng& rng) {
    State x;
    for (auto& c : x) c = 1.0 + 1000.0 * rng.uniform();
    return x;
}

}  // namespace

TEST_CASE("vector field vanishes at the disease-free states") {
    for (const ModelParams& p : {baseline(), backward_figure(), forward_figure()}) {
        for (const ModelVariant& v : {ModelVariant{}, ModelVariant{Incidence::Standard, false, false},
                                      ModelVariant{Incidence::MassAction, true, false}}) {
            const ModelParams q = effective(p, v);
            CHECK(relative_residual(trivial_state(q, v), q, v) < 1e-12);
            CHECK(relative_residual(dfe_state(q, v), q, v) < 1e-12);
        }
    }
}

TEST_CASE("total human population balance") {
    CounterRng rng(7, 0);
    for (int i = 0; i < 50; ++i) {
        const ModelParams p = baseline();
        const State x = random_state(rng);
        const State dx = rhs(x, p, {});
        const double dN = dx[Sh] + dx[Vh] + dx[Eh] + dx[Ih] + dx[Rh];
        CHECK(dN == doctest::Approx(p.Lambda_h - p.mu_h * human_total(x) - p.delta * x[Ih]).epsilon(1e-12));
        // the adult vector total obeys theta P - (mu_v + c_m) N_v
        const double dNv = dx[Sv] + dx[Ev] + dx[Iv];
        CHECK(dNv == doctest::Approx(p.theta * x[Pup] - (p.mu_v + p.c_m) * vector_total(x)).epsilon(1e-12));
    }
}

TEST_CASE("vaccinated class is inert without vaccination") {
    CounterRng rng(8, 0);
    const ModelVariant nv{Incidence::Standard, false, false};
    const State x = random_state(rng);
    CHECK(rhs(x, effective(baseline(), nv), nv)[Vh] == 0.0);
}

TEST_CASE("exact Jacobian agrees with central differences") {
    CounterRng rng(9, 0);
    for (const ModelVariant& v : {ModelVariant{}, ModelVariant{Incidence::MassAction, true, false}}) {
        const ModelParams p = baseline();
        const State x = random_state(rng);
        const Eigen::MatrixXd J = jacobian_exact(x, p, v);
        const auto idx = active_indices(v);
        for (std::size_t c = 0; c < idx.size(); ++c) {
            State up = x, dn = x;
            const double h = 1e-5 * std::max(1.0, std::abs(x[idx[c]]));
            up[idx[c]] += h;
            dn[idx[c]] -= h;
            const State fu = rhs(up, p, v), fd = rhs(dn, p, v);
            for (std::size_t r = 0; r < idx.size(); ++r) {
                const double fdv = (fu[idx[r]] - fd[idx[r]]) / (2 * h);
                CHECK(J(r, c) == doctest::Approx(fdv).epsilon(1e-6).scale(1.0));
            }
        }
    }
}

TEST_CASE("disease-free state matches an independent solve") {
    const ModelParams p = baseline();
    const State d = dfe_state(p);
    // human block: Lambda + omega V - k1 S = 0, xi S - k2 V = 0
    const double k1 = p.xi + p.mu_h, k2 = p.omega + p.mu_h;
    const double S = p.Lambda_h * k2 / (k1 * k2 - p.omega * p.xi);
    CHECK(d[Sh] == doctest::Approx(S).epsilon(1e-12));
    CHECK(d[Vh] == doctest::Approx(p.xi * S / k2).epsilon(1e-12));

    // vector and aquatic block reached by integrating from a small seed population
    State x{};
    x[Sh] = d[Sh];
    x[Vh] = d[Vh];
    x[Sv] = 10.0;
    const auto tr = integrate(p, {}, x, 0.0, 4000.0, {}, {{1e-10, 1e-10}, {4000.0}});
    const State& end = tr.states.back();
    for (std::size_t i : {std::size_t(Sv), std::size_t(Egg), std::size_t(Lar), std::size_t(Pup)})
        CHECK(end[i] == doctest::Approx(d[i]).epsilon(1e-6));
}

TEST_CASE("degenerate human population is refused") {
    State x{};
    x[Iv] = 1.0;
    CHECK_THROWS_AS(rhs(x, baseline(), {}), DegeneratePopulation);
    CHECK_NOTHROW(rhs(x, baseline(), {Incidence::MassAction, true, false}));
}
