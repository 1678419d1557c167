#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "arbo/errors.hpp"
#include "arbo/rng.hpp"
#include "arbo/sensitivity.hpp"
#include "arbo/stability.hpp"
#include "arbo/thresholds.hpp"

using namespace arbo;

namespace {

ModelParams draw(CounterRng& rng, const std::vector<ParamRange>& ranges) {
    ModelParams p = baseline();
    for (const auto& r : ranges) set_param(p, r.parameter, r.lo + (r.hi - r.lo) * rng.uniform());
    return p;
}

double spectral_abscissa(const State& x, const ModelParams& p, const ModelVariant& v) {
    return classify(x, p, v).modulus;
}

}  // namespace

TEST_CASE("closed-form R0 equals the next-generation spectral radius") {
    const auto ranges = default_ranges(baseline());
    CounterRng rng(11, 0);
    int compared = 0;
    for (int i = 0; i < 100; ++i) {
        const ModelParams p = draw(rng, ranges);
        if (net_reproductive_number(p) <= 1.0) continue;
        CHECK(basic_reproduction_number(p) == doctest::Approx(r0_via_ngm(p)).epsilon(1e-10));
        ++compared;
    }
    CHECK(compared > 50);
}

TEST_CASE("reproduction number is zero without vectors") {
    ModelParams p = baseline();
    p.theta = 1e-4;
    REQUIRE(net_reproductive_number(p) <= 1.0);
    CHECK(basic_reproduction_number(p) == 0.0);
    CHECK_THROWS_AS(r0_via_ngm(p), NoVectorError);
    const auto rep = threshold_report(p, {});
    CHECK(rep.no_vectors);
}

TEST_CASE("critical transmission probability places the DFE on the stability boundary") {
    for (const ModelParams& base : {baseline(), backward_figure(), forward_figure()}) {
        ModelParams p = base;
        const double bc = beta_hv_critical(p);
        p.beta_hv = bc;
        CHECK(basic_reproduction_number(p) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(spectral_abscissa(dfe_state(p), p, {})) < 1e-8);

        for (double f : {0.5, 2.0}) {
            ModelParams q = base;
            q.beta_hv = std::min(1.0, bc * f);
            const double r = basic_reproduction_number(q);
            const double m = spectral_abscissa(dfe_state(q), q, {});
            CHECK((r > 1.0) == (m > 0.0));
        }
    }
}

TEST_CASE("R0 scales as the square root of each transmission probability") {
    const ModelParams p = baseline();
    ModelParams q = p;
    q.beta_hv *= 0.25;
    CHECK(basic_reproduction_number(q) == doctest::Approx(0.5 * basic_reproduction_number(p)).epsilon(1e-14));
    q = p;
    q.a *= 3.0;
    CHECK(basic_reproduction_number(q) == doctest::Approx(3.0 * basic_reproduction_number(p)).epsilon(1e-14));
}

TEST_CASE("no-vaccination reproduction number exceeds the vaccinated one") {
    const ModelParams p = baseline();
    CHECK(r_nv(p) > basic_reproduction_number(p));
    ModelParams q = p;
    q.epsilon = 0.0;
    CHECK(basic_reproduction_number(q) == doctest::Approx(r_nv(q)).epsilon(1e-12));
}

TEST_CASE("variant reproduction number matches the variant's next-generation matrix") {
    const ModelParams p = baseline();
    for (const ModelVariant& v : {ModelVariant{}, ModelVariant{Incidence::Standard, false, false},
                                  ModelVariant{Incidence::MassAction, true, false},
                                  ModelVariant{Incidence::MassAction, false, false}}) {
        const ModelParams q = effective(p, v);
        CHECK(variant_reproduction_number(q, v) == doctest::Approx(r0_via_ngm(q, v)).epsilon(1e-10));
    }
}

TEST_CASE("report entries") {
    const auto rep = threshold_report(baseline(), {});
    CHECK_FALSE(rep.no_vectors);
    CHECK(rep.value("R0") == doctest::Approx(basic_reproduction_number(baseline())));
    CHECK(rep.value("N") == doctest::Approx(net_reproductive_number(baseline())));
}
