#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "arbo/errors.hpp"
#include "arbo/io.hpp"
#include "arbo/params.hpp"

using namespace arbo;

TEST_CASE("baseline and named sets are valid") {
    CHECK_NOTHROW(validate(baseline()));
    CHECK_NOTHROW(validate(backward_figure()));
    CHECK_NOTHROW(validate(forward_figure()));
    CHECK_NOTHROW(validate(no_vaccination_illustration()));
    CHECK_NOTHROW(validate(no_vaccination_reconstructed()));
    CHECK(param_specs().size() == 29);
}

TEST_CASE("validation names the offending field and its range") {
    ModelParams p;
    p.alpha_1 = 1.5;
    try {
        validate(p);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "alpha_1");
        CHECK(std::string(e.what()).find("[0, 1)") != std::string::npos);
    }

    struct Bad {
        const char* key;
        double value;
    };
    for (const Bad& b : {Bad{"mu_h", 0.0}, Bad{"Lambda_h", -1.0}, Bad{"epsilon", 1.01}, Bad{"alpha_2", 0.0},
                         Bad{"beta_hv", -0.1}, Bad{"Gamma_E", 0.0}, Bad{"c_m", -1e-9}}) {
        ModelParams q;
        set_param(q, b.key, b.value);
        try {
            validate(q);
            FAIL("accepted " << b.key << " = " << b.value);
        } catch (const ValidationError& e) {
            CHECK(e.field() == b.key);
        }
    }
    ModelParams nan;
    nan.theta = std::nan("");
    CHECK_THROWS_AS(validate(nan), ValidationError);
}

TEST_CASE("unknown keys are rejected") {
    ModelParams p;
    CHECK_THROWS_AS(set_param(p, "beta", 0.1), ValidationError);
    CHECK_THROWS_AS(get_param(p, "Beta_hv"), ValidationError);
    set_param(p, "Gamma_L", 123.0);
    CHECK(get_param(p, "Gamma_L") == 123.0);
}

TEST_CASE("variant names round-trip") {
    for (const char* name : {"full", "no-vaccination", "mass-action", "mass-action+no-vaccination", "full+delta-zero",
                             "no-vaccination+delta-zero", "mass-action+no-vaccination+delta-zero"}) {
        CHECK(variant_name(parse_variant(name)) == name);
    }
    CHECK_THROWS_AS(parse_variant("fulll"), ValidationError);
    CHECK_THROWS_AS(parse_variant("full+"), ValidationError);
}

TEST_CASE("variant overrides") {
    const ModelParams p = baseline();
    const ModelParams dz = effective(p, {Incidence::Standard, true, true});
    CHECK(dz.delta == 0.0);
    CHECK(dz.xi == p.xi);
    const ModelParams nv = effective(p, {Incidence::Standard, false, false});
    CHECK(nv.xi == 0.0);
    CHECK(nv.omega == 0.0);
    CHECK(nv.delta == p.delta);
}

TEST_CASE("derived constants") {
    const auto d = derive_constants(baseline());
    // N = mu_b theta l s / (k5 k6 k7 k8), evaluated by hand from the defaults
    const double k5 = 0.7 + 0.2 + 0.001, k6 = 0.5 + 0.4 + 0.3, k7 = 0.08 + 0.4, k8 = 1.0 / 30.0 + 0.01;
    CHECK(d.net_reproductive == doctest::Approx(6.0 * 0.08 * 0.5 * 0.7 / (k5 * k6 * k7 * k8)).epsilon(1e-14));
    CHECK(d.K_E == doctest::Approx(0.5 * 10000.0));
    CHECK(d.K12 == doctest::Approx(0.7 * 5000.0 + k6 * 2500.0));
    CHECK(d.pi == doctest::Approx(0.39));
}

TEST_CASE("parameter files round-trip bitwise") {
    ModelParams p = backward_figure(0.0105);
    p.mu_h = 1.0 / 3.0;
    std::stringstream ss;
    write_params(ss, p);
    const RunConfig cfg = parse_config(ss);
    CHECK(cfg.params == p);
    CHECK(cfg.defaulted.empty());
}
