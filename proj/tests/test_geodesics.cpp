// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "error.hpp"
#include "geodesics.hpp"
#include "support.hpp"

using namespace crmod;
using crmod::test::Gen;
using crmod::test::kPi;
using crmod::test::rel_err;
using crmod::test::shooting_distance;

TEST_SUITE("geodesics") {

TEST_CASE("distance examples") {
  const HeisPoint p{0.4, -0.2, 1.1};
  CHECK(cc_distance(p, p) == 0.0);
  CHECK(cc_distance(kOrigin, {3, 4, 0}) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(cc_distance(kOrigin, {0, 0, 1}) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("planar and vertical closed forms") {
  Gen gen(21);
  for (int i = 0; i < 100; ++i) {
    const HeisPoint q = gen.planar(5);
    REQUIRE(std::abs(cc_distance(kOrigin, q) - std::hypot(q.x, q.y)) <= 1e-12);
  }
  for (double t : {0.25, -0.25, 1.0, -1.0, 4.0, -4.0})
    CHECK(rel_err(cc_distance(kOrigin, {0, 0, t}), std::sqrt(kPi * std::abs(t))) < 1e-9);
}

TEST_CASE("closed form against shooting quadrature") {
  Gen gen(22);
  for (int i = 0; i < 40; ++i) {
    const HeisPoint p = gen.point(2), q = gen.point(2);
    const double want = shooting_distance(p, q);
    REQUIRE(rel_err(cc_distance(p, q), want) < 1e-7);
  }
}

TEST_CASE("symmetry and left invariance") {
  Gen gen(23);
  for (int i = 0; i < 200; ++i) {
    const HeisPoint g = gen.point(3), p = gen.point(2), q = gen.point(2);
    const double d = cc_distance(p, q);
    REQUIRE(cc_distance(q, p) == doctest::Approx(d).epsilon(1e-12));
    REQUIRE(cc_distance(group_mul(g, p), group_mul(g, q)) == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("triangle inequality") {
  Gen gen(24);
  for (int i = 0; i < 200; ++i) {
    const HeisPoint a = gen.point(2), b = gen.point(2), c = gen.point(2);
    REQUIRE(cc_distance(a, c) <= cc_distance(a, b) + cc_distance(b, c) + 1e-10);
  }
}

TEST_CASE("arc area is increasing and the root finder inverts it") {
  double prev = 0.0;
  for (int i = 1; i < 2000; ++i) {
    const double th = 2 * kPi * i / 2000;
    const double a = arc_area_unit_chord(th);
    REQUIRE(a > prev);
    prev = a;
  }
  Gen gen(25);
  for (int i = 0; i < 200; ++i) {
    const double th = gen.uniform(1e-3, 2 * kPi - 1e-3), rho = gen.uniform(0.1, 3);
    const double area = rho * rho * arc_area_unit_chord(th);
    REQUIRE(std::abs(solve_turning_angle(rho, area) - th) < 1e-9);
  }
  CHECK_THROWS_AS(arc_area_unit_chord(0.0), Error);
  CHECK_THROWS_AS(arc_area_unit_chord(2 * kPi), Error);
  CHECK_THROWS_AS(solve_turning_angle(0.0, 1.0), Error);
  CHECK_THROWS_AS(solve_turning_angle(1.0, -1.0), Error);
}

TEST_CASE("geodesic paths") {
  SUBCASE("straight segment") {
    const auto g = geodesic(kOrigin, {1, 0, 0}, 11);
    CHECK(g.length == doctest::Approx(1.0));
    CHECK(g.turning_angle == 0.0);
    for (const auto& s : g.path.samples()) CHECK((s.point.y == 0.0 && s.point.t == 0.0));
  }
  SUBCASE("closed projection over the t axis") {
    const auto g = geodesic(kOrigin, {0, 0, 1}, 2001);
    CHECK(g.length == doctest::Approx(std::sqrt(kPi)));
    CHECK(std::abs(std::abs(g.turning_angle) - 2 * kPi) < 1e-12);
    CHECK(std::abs(g.path.back().t - 1.0) < 1e-12);
    CHECK(rel_err(curve_length(g.path), std::sqrt(kPi)) < 1e-6);
  }
  SUBCASE("random pairs at n = 1e4") {
    Gen gen(26);
    for (int i = 0; i < 20; ++i) {
      const HeisPoint p = gen.point(2), q = gen.point(2);
      const auto g = geodesic(p, q, 10000);
      const HeisPoint e = g.path.back();
      REQUIRE(std::max({std::abs(e.x - q.x), std::abs(e.y - q.y), std::abs(e.t - q.t)}) < 1e-9);
      REQUIRE(g.path.front() == p);
      REQUIRE(g.path.horizontality_residual() < 1e-6);
      REQUIRE(rel_err(curve_length(g.path), g.length) < 1e-4);
      REQUIRE(g.length == doctest::Approx(cc_distance(p, q)).epsilon(1e-12));
      REQUIRE(geodesic(q, p, 50).length == doctest::Approx(g.length).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(geodesic(kOrigin, {1, 1, 1}, 1), Error);
}

TEST_CASE("scaled metric") {
  Gen gen(27);
  for (int i = 0; i < 20; ++i) {
    const HeisPoint p = gen.point(2), q = gen.point(2);
    CHECK(cc_distance_scaled(MetricK{}, p, q) == doctest::Approx(cc_distance(p, q)));
  }
  const MetricK four(4);
  CHECK(cc_distance_scaled(four, kOrigin, {0.7, 0, 0}) == doctest::Approx(1.4));
  CHECK(cc_distance_scaled(four, kOrigin, {0, 0.7, 0}) == doctest::Approx(0.35));
  CHECK(cc_distance_scaled(four, kOrigin, {0, 0, 1}) == doctest::Approx(std::sqrt(kPi)));
  // The isometry is a group automorphism.
  const HeisPoint a{0.3, 0.9, -0.4}, b{-1.1, 0.2, 0.8};
  const HeisPoint lhs = scaled_isometry(four, group_mul(a, b));
  const HeisPoint rhs = group_mul(scaled_isometry(four, a), scaled_isometry(four, b));
  CHECK(lhs.t == doctest::Approx(rhs.t));
}

TEST_CASE("brute force oracle") {
  CHECK(brute_force_distance(kOrigin, kOrigin) == 0.0);
  CHECK(brute_force_distance(kOrigin, {1, 0, 0}) == doctest::Approx(1.0).epsilon(0.02));
  const double vert = brute_force_distance(kOrigin, {0, 0, 1});
  CHECK(vert >= std::sqrt(kPi) - 1e-9);
  CHECK(vert <= 1.02 * std::sqrt(kPi));

  Gen gen(28);
  for (int i = 0; i < 3; ++i) {
    const HeisPoint p = gen.point(1.5), q = gen.point(1.5);
    const auto r = brute_force_search(p, q);
    const double d = cc_distance(p, q);
    CHECK(r.endpoint_error < 1e-9);
    CHECK(r.length >= d - 1e-9);
    CHECK(r.length <= 1.02 * d);
  }
  OracleBudget bad;
  bad.steps = 2;
  CHECK_THROWS_AS(brute_force_search(kOrigin, {1, 1, 1}, bad), Error);
}

}  // TEST_SUITE
