#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "brinkman/helmholtz.hpp"

using namespace brinkman;

namespace {

ScalarField random_field(const Grid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ScalarField u(g);
    for (double& v : u.v) v = unif(rng);
    return u;
}

}  // namespace

TEST_CASE("1D periodic solve inverts the Fourier symbol exactly") {
    Grid g(1, 64, 2.0, Boundary::periodic);
    const double nu = 0.03;
    for (int k : {1, 3, 7}) {
        ScalarField p(g);
        for (int i = 0; i < g.n; ++i)
            p.at(i) = std::cos(2.0 * M_PI * k * g.x(i) / g.length);
        double lambda =
            4.0 / (g.h() * g.h()) * std::pow(std::sin(M_PI * k * g.h() / g.length), 2);
        ScalarField w = solve_w(p, nu);
        for (int i = 0; i < g.n; ++i)
            REQUIRE(w.at(i) == Catch::Approx(p.at(i) / (1.0 + nu * lambda)).margin(1e-11));
    }
}

TEST_CASE("1D Neumann solve inverts the cosine eigenbasis") {
    Grid g(1, 48, 1.0, Boundary::neumann);
    const double nu = 0.1;
    const int k = 2;
    ScalarField p(g);
    for (int i = 0; i < g.n; ++i)
        p.at(i) = std::cos(M_PI * k * (i + 0.5) / g.n);
    double lambda = 4.0 / (g.h() * g.h()) * std::pow(std::sin(M_PI * k / (2.0 * g.n)), 2);
    ScalarField w = solve_w(p, nu);
    for (int i = 0; i < g.n; ++i)
        REQUIRE(w.at(i) == Catch::Approx(p.at(i) / (1.0 + nu * lambda)).margin(1e-11));
}

TEST_CASE("solution satisfies the residual equation") {
    for (Boundary b : {Boundary::neumann, Boundary::periodic}) {
        for (int dim : {1, 2}) {
            Grid g(dim, 32, 1.3, b);
            ScalarField p = random_field(g, 9);
            double nu = 0.02;
            ScalarField w = solve_w(p, nu);
            ScalarField r = detail::apply_operator(w, nu);
            for (std::size_t i = 0; i < r.size(); ++i) r.v[i] -= p.v[i];
            CAPTURE(dim, static_cast<int>(b));
            REQUIRE(max_abs(r) <= 1e-9 * max_abs(p));
        }
    }
}

TEST_CASE("discrete maximum principle: min p <= w <= max p") {
    Grid g(2, 24, 1.0, Boundary::neumann);
    ScalarField p = random_field(g, 21);
    ScalarField w = solve_w(p, 0.5);
    REQUIRE(min_value(w) >= min_value(p) - 1e-10);
    REQUIRE(max_value(w) <= max_value(p) + 1e-10);
}

TEST_CASE("solver is self-adjoint and mean preserving") {
    Grid g(1, 40, 1.0, Boundary::periodic);
    ScalarField a = random_field(g, 1), b = random_field(g, 2);
    double nu = 0.07;
    REQUIRE(inner(solve_w(a, nu), b) ==
            Catch::Approx(inner(a, solve_w(b, nu))).margin(1e-11));
    REQUIRE(integral(solve_w(a, nu)) == Catch::Approx(integral(a)).margin(1e-11));
}

TEST_CASE("nu = 0 returns the pressure itself") {
    Grid g(1, 16, 1.0, Boundary::neumann);
    ScalarField p = random_field(g, 5);
    ScalarField w = solve_w(p, 0.0);
    REQUIRE(w.v == p.v);
    REQUIRE_THROWS_AS(solve_w(p, -1.0), Error);
}
