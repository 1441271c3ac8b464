#include <catch2/catch_amalgamated.hpp>

#include "brinkman/laws.hpp"

using namespace brinkman;

TEST_CASE("power law closed forms") {
    PressureLaw law = power_law(3.0, 1e-2, linear_growth(1.0, 1.0));
    for (double a : {0.1, 0.5, 1.0, 2.0}) {
        REQUIRE(law.energy(a) == Catch::Approx(std::pow(a, 4.0) / 4.0));
        REQUIRE(law.pressure(a) == Catch::Approx(std::pow(a, 3.0)));
        // duality round trip
        REQUIRE(law.density_from_pressure(law.pressure(a)) == Catch::Approx(a));
        // Young equality on the graph
        double b = law.pressure(a);
        REQUIRE(law.energy(a) + law.energy_dual(b) == Catch::Approx(a * b));
    }
    REQUIRE(law.energy_dual(-1.0) == 0.0);
    REQUIRE(law.dual_deriv(8.0) == Catch::Approx(2.0));
    // f*'' = (1/g) b^{1/g - 1}
    REQUIRE(law.dual_curvature(1.0) == Catch::Approx(1.0 / 3.0));
    REQUIRE_THROWS_AS(power_law(0.5, 0.0, zero_growth()), Error);
}

TEST_CASE("log law closed forms and inverse") {
    const double nu = 0.7;
    PressureLaw law = log_law(nu, 1e-3, linear_growth(1.0, 1.0));
    for (double a : {0.1, 0.4, 0.8, 0.95}) {
        double p = law.pressure(a);
        REQUIRE(p == Catch::Approx(nu * a / (1.0 - a)));
        REQUIRE(law.density_from_pressure(p) == Catch::Approx(a));
        REQUIRE(law.energy(a) + law.energy_dual(p) == Catch::Approx(a * p).margin(1e-12));
    }
    REQUIRE(law.energy(1.0) == kInf);
    REQUIRE(std::isinf(law.pressure(1.0)));
    // dual derivative b/(b+nu) and curvature nu/(b+nu)^2
    REQUIRE(law.dual_deriv(0.7) == Catch::Approx(0.5));
    REQUIRE(law.dual_curvature(0.7) == Catch::Approx(0.7 / (1.4 * 1.4)));
}

TEST_CASE("incompressible law is exact and flagged multivalued") {
    PressureLaw law = incompressible_law(linear_growth(1.0, 1.0));
    REQUIRE_FALSE(law.single_valued_pressure);
    REQUIRE_THROWS_AS(law.pressure(0.5), Error);
    REQUIRE(law.density_cap(1.0) == 1.0);
    REQUIRE(law.energy(0.7) == 0.0);
    REQUIRE(law.energy(1.2) == kInf);
}

TEST_CASE("growth laws satisfy the structural assumptions") {
    GrowthLaw G = linear_growth(2.0, 3.0);
    REQUIRE(G.value(0.0) == Catch::Approx(3.0));
    REQUIRE(G.value(2.0) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(G.value(1.0) > G.value(1.5));
    GrowthLaw Gc = clamped_linear_growth(2.0, 3.0);
    REQUIRE(Gc.value(5.0) == 0.0);

    for (const PressureLaw& law :
         {power_law(1.0, 0.0, linear_growth(1.0, 1.0)),
          power_law(10.0, 1e-3, linear_growth(1.0, 1.0)),
          log_law(1.0, 1e-2, linear_growth(1.0, 1.0)),
          incompressible_law(linear_growth(1.0, 1.0))}) {
        AssumptionReport r = validate_assumptions(law);
        CAPTURE(law.name(), r.failures);
        REQUIRE(r.pass);
    }
}

TEST_CASE("validate_assumptions flags a broken growth law") {
    PressureLaw law = power_law(2.0, 0.0, linear_growth(1.0, 1.0));
    law.growth.value = [](double p) { return p; };  // increasing, G(0) = 0
    AssumptionReport r = validate_assumptions(law);
    REQUIRE_FALSE(r.pass);
    REQUIRE(r.failures.size() >= 2);
}

TEST_CASE("h* through inversion satisfies Young equality for h") {
    PressureLaw law = power_law(2.0, 0.0, zero_growth(), 8.0);
    ConvexScalarFunction h = h_energy_closed_form(law);
    ConvexScalarFunction hstar = conjugate_by_inversion(h);
    for (double a : {0.3, 1.0, 2.5}) {
        double c = h.derivative(a);
        REQUIRE(h(a) + hstar(c) == Catch::Approx(a * c).margin(1e-7 * (1.0 + a * c)));
        // h'(a) = f*(f'(a))
        REQUIRE(c == Catch::Approx(law.energy_dual(law.pressure(a))));
    }
}
