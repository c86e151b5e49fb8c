#include <doctest.h>

#include <string>

#include "ocp/config.hpp"
#include "ocp/runner.hpp"

using namespace ocp;

TEST_CASE("defaults follow the experiment setup") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg.algorithm == Variant::unlock_plus);
    CHECK(cfg.k == 200);
    CHECK(cfg.horizon == 50000);
    CHECK(cfg.alpha == 0.15);
    CHECK(cfg.c == 40.0);
    CHECK(cfg.rho == 0.5);
    CHECK(cfg.delta == 0.05);
    CHECK(cfg.env.kind == EnvKind::iid);
    CHECK(cfg.env.label_count == 1000);
    CHECK(cfg.env.bin_count == 20);
}

TEST_CASE("range violations cite the valid interval") {
    try {
        parse_config("alpha = 0.6\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("(0, 0.5)") != std::string::npos);
        CHECK(e.field() == "alpha");
    }
    CHECK_THROWS_AS(parse_config("K = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("delta = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("c = -2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("T = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("env.kind = replay\n"), ConfigError);  // missing path
}

TEST_CASE("unknown keys are rejected") {
    try {
        parse_config("alhpa = 0.2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
    }
}

TEST_CASE("round trip is the identity") {
    const std::string doc =
        "algorithm = unlock\n"
        "K = 20\n"
        "T = 1234\n"
        "alpha = 0.3\n"
        "c = 7.25\n"
        "rho = 0.25\n"
        "delta = 0.1\n"
        "seed = 99\n"
        "seeds = 4\n"
        "out = results\n"
        "env.kind = exponent\n"
        "env.L = 64\n"
        "env.exponents = 0.5,1.5\n"
        "env.phase_ends = 600\n";
    const RunConfig first = parse_config(doc);
    const RunConfig second = parse_config(serialize_config(first));
    CHECK(first == second);
    CHECK(serialize_config(first) == serialize_config(second));
    CHECK(config_digest(first) == config_digest(second));

    // Digest is sensitive to any field change.
    RunConfig tweaked = first;
    tweaked.alpha = 0.31;
    CHECK(config_digest(tweaked) != config_digest(first));
}

TEST_CASE("comments and spacing are tolerated") {
    const RunConfig cfg = parse_config("# experiment\n\n  alpha = 0.2  \nK = 50\n");
    CHECK(cfg.alpha == 0.2);
    CHECK(cfg.k == 50);
}

TEST_CASE("canonical serialization survives awkward doubles") {
    RunConfig cfg;
    cfg.alpha = 0.1234567890123456;  // needs 17 digits
    cfg.env.shift_fraction = 1.0 / 3.0;
    const RunConfig back = parse_config(serialize_config(cfg));
    CHECK(back.alpha == cfg.alpha);
    CHECK(back.env.shift_fraction == cfg.env.shift_fraction);
}

TEST_CASE("number formatting uses nine significant digits") {
    CHECK(format_number(0.15) == "0.15");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(format_number(12345.0) == "12345");
}
