#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maghop/model.hpp"

using namespace maghop;

static ModelConfig make(double lambda, double depth, double a, double d) {
    ModelConfig c;
    c.lambda = lambda;
    c.well.depth = depth;
    c.well.radius = a;
    c.separation = d;
    return c;
}

TEST_CASE("validate: reference config valid, strict spacing gated off") {
    auto rep = validate(make(10, -2, 0.5, 2.0));
    CHECK(rep.valid);
    // 2.0 < 4*(sqrt(2)+0.5)
    CHECK_FALSE(rep.strict_spacing);
}

TEST_CASE("validate: shallow well passes strict spacing") {
    auto rep = validate(make(10, -0.04, 0.1, 1.3));
    CHECK(rep.valid);
    // 1.3 > 4*(0.2+0.1) = 1.2
    CHECK(rep.strict_spacing);
}

TEST_CASE("validate: overlapping wells rejected") {
    auto rep = validate(make(10, -2, 0.5, 0.8));
    CHECK_FALSE(rep.valid);
    CHECK(rep.violations.size() >= 1);
}

TEST_CASE("validate is deterministic") {
    auto c = make(10, -2, 0.5, 2.0);
    auto r1 = validate(c);
    auto r2 = validate(c);
    CHECK(r1.valid == r2.valid);
    CHECK(r1.strict_spacing == r2.strict_spacing);
    CHECK(r1.violations == r2.violations);
}

TEST_CASE("config json round-trip preserves every numeric field") {
    auto c = make(12.5, -1.75, 0.45, 2.25);
    c.b = 12.5;
    c.grid.spacing = 0.03125;
    c.grid.margin_lengths = 6.0;
    c.tolerances.quadrature_rel = 1e-9;
    c.tolerances.eigen_rel = 1e-7;
    c.tolerances.match_rel = 1e-11;
    c.tolerances.max_iterations = 321;
    auto c2 = config_from_json(config_to_json(c));
    CHECK(c2.lambda == c.lambda);
    CHECK(c2.b == c.b);
    CHECK(c2.separation == c.separation);
    CHECK(c2.well.depth == c.well.depth);
    CHECK(c2.well.radius == c.well.radius);
    CHECK(c2.grid.spacing == c.grid.spacing);
    CHECK(c2.grid.margin_lengths == c.grid.margin_lengths);
    CHECK(c2.tolerances.quadrature_rel == c.tolerances.quadrature_rel);
    CHECK(c2.tolerances.eigen_rel == c.tolerances.eigen_rel);
    CHECK(c2.tolerances.match_rel == c.tolerances.match_rel);
    CHECK(c2.tolerances.max_iterations == c.tolerances.max_iterations);
    // and the serialized form itself round-trips byte-for-byte
    CHECK(config_to_json(c2) == config_to_json(c));
}

TEST_CASE("unknown config keys are an error") {
    CHECK_THROWS(config_from_json(R"({"lambda": 10, "lamda": 12})"));
    CHECK_THROWS(config_from_json(R"({"lambda": 10, "well": {"depht": -2}})"));
}

TEST_CASE("grid spacing rule") {
    auto c = make(10, -2, 0.5, 2.0);
    c.grid.spacing = c.magnetic_length(); // far too coarse
    CHECK_FALSE(validate(c).valid);
    c.grid.spacing = c.magnetic_length() / 8.0;
    CHECK(validate(c).valid);
}
