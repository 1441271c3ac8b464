#include <catch2/catch_amalgamated.hpp>

#include "brinkman/config.hpp"

using namespace brinkman;

TEST_CASE("minimal config parses with documented defaults") {
    ExperimentConfig c = parse_config(
        "# comment\n"
        "[grid]\n"
        "n = 256\n"
        "[law]\n"
        "family = power\n"
        "gamma = 3\n"
        "nu = 1e-3\n"
        "[initial]\n"
        "shape = bump\n"
        "[run]\n"
        "T = 0.5\n");
    REQUIRE(c.grid.n == 256);
    REQUIRE(c.grid.dim == 1);
    REQUIRE(c.law.gamma == 3.0);
    REQUIRE(c.law.nu == 1e-3);
    REQUIRE(c.run.T == 0.5);
    REQUIRE(c.initial.shape == "bump");
    REQUIRE(c.output_dir == "out");
}

TEST_CASE("unknown key names its nearest valid key") {
    try {
        parse_config("[law]\ngamm = 3\n");
        FAIL("expected a config error");
    } catch (const Error& e) {
        std::string msg = e.what();
        REQUIRE(msg.find("law.gamm") != std::string::npos);
        REQUIRE(msg.find("law.gamma") != std::string::npos);
    }
}

TEST_CASE("sweep lists parse into schedules") {
    ExperimentConfig c = parse_config(
        "[sweep]\n"
        "arm = nu\n"
        "nu = [1e-1, 1e-2, 1e-3]\n");
    REQUIRE(c.sweep.nu.size() == 3);
    REQUIRE(c.sweep.nu[0] == 0.1);
    REQUIRE(c.sweep.nu[2] == 1e-3);
}

TEST_CASE("type and structure errors are precise and collected") {
    try {
        parse_config("[grid]\nn = many\ndim = 3\n[law]\nnu = -1\n");
        FAIL("expected a config error");
    } catch (const Error& e) {
        std::string msg = e.what();
        REQUIRE(msg.find("grid.n") != std::string::npos);
        REQUIRE(msg.find("dim must be 1 or 2") != std::string::npos);
        REQUIRE(msg.find("law.nu") != std::string::npos);
    }
    REQUIRE_THROWS_AS(parse_config("[grid\nn = 8\n"), Error);
    REQUIRE_THROWS_AS(parse_config("[grid]\nn = 8\nn = 16\n"), Error);
    REQUIRE_THROWS_AS(parse_config("[run]\nobserver_times = [0.1, oops]\n"), Error);
}

TEST_CASE("diagnostic names are validated with suggestions") {
    try {
        parse_config("[diagnostics]\nenabled = [bound_monitr]\n");
        FAIL("expected a config error");
    } catch (const Error& e) {
        std::string msg = e.what();
        REQUIRE(msg.find("bound_monitr") != std::string::npos);
        REQUIRE(msg.find("bound_monitor") != std::string::npos);
    }
}

TEST_CASE("enum-valued keys reject unknown values") {
    REQUIRE_THROWS_AS(parse_config("[law]\nfamily = quadratic\n"), Error);
    REQUIRE_THROWS_AS(parse_config("[grid]\nboundary = open\n"), Error);
    REQUIRE_THROWS_AS(parse_config("[sweep]\narm = diagonal\n"), Error);
}
