// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "error.hpp"
#include "geodesics.hpp"
#include "heis.hpp"
#include "support.hpp"

using namespace crmod;
using crmod::test::Gen;
using crmod::test::rel_err;

namespace {

bool same(const HeisPoint& a, const HeisPoint& b, double tol = 0.0) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.t - b.t) <= tol;
}

LegendrianPolyline x_segment(const HeisPoint& p, double s, int n) {
  std::vector<HeisPoint> pts;
  for (int i = 0; i <= n; ++i) pts.push_back(flow_X(p, s * i / n));
  return LegendrianPolyline::from_points(pts);
}

}  // namespace

TEST_SUITE("heis") {

TEST_CASE("group product examples") {
  const HeisPoint q{0.3, -1.2, 2.5};
  CHECK(group_mul(kOrigin, q) == q);
  CHECK(group_mul({1, 0, 0}, {0, 1, 0}) == HeisPoint{1, 1, -2});
  CHECK(group_mul({1, 0, 0}, {0, 0.25, 0}) == HeisPoint{1, 0.25, -0.5});
  CHECK(group_inv(kOrigin) == kOrigin);
  CHECK(group_inv({1, 2, 3}) == HeisPoint{-1, -2, -3});
  CHECK(group_mul({1, 2, 3}, group_inv({1, 2, 3})) == kOrigin);
}

TEST_CASE("group axioms on random triples") {
  Gen gen(11);
  for (int i = 0; i < 1000; ++i) {
    const HeisPoint a = gen.point(3), b = gen.point(3), c = gen.point(3);
    const HeisPoint l = group_mul(group_mul(a, b), c), r = group_mul(a, group_mul(b, c));
    REQUIRE(same(l, r, 1e-12 * (1 + std::abs(l.t))));
    REQUIRE(group_mul(a, kOrigin) == a);
    REQUIRE(group_mul(kOrigin, a) == a);
    REQUIRE(group_mul(a, group_inv(a)) == kOrigin);
    REQUIRE(group_mul(group_inv(a), a) == kOrigin);
  }
}

TEST_CASE("contact form and frame") {
  Gen gen(12);
  CHECK(eta({gen.point(2), 0, 0, 1}) == doctest::Approx(0.25));
  const Frame o = frame_at(kOrigin);
  CHECK((o.X.dx == 1 && o.X.dy == 0 && o.X.dt == 0));
  CHECK((o.Y.dx == 0 && o.Y.dy == 1 && o.Y.dt == 0));
  const Frame f = frame_at({0, 1, 0});
  CHECK((f.X.dx == 1 && f.X.dt == 2));
  for (int i = 0; i < 200; ++i) {
    const Frame fr = frame_at(gen.point(5));
    REQUIRE(std::abs(eta(fr.X)) < 1e-14);
    REQUIRE(std::abs(eta(fr.Y)) < 1e-14);
    REQUIRE(d_eta(fr.X, fr.Y) == 1.0);
  }
  HorizontalVector h{gen.point(3), 0.7, -1.3};
  CHECK(std::abs(eta(h.embed())) < 1e-15);
}

TEST_CASE("bracket of the frame fields by finite differences") {
  // [X, Y]^k = X(Y^k) - Y(X^k) with the field components differentiated numerically.
  Gen gen(13);
  const double h = 1e-5;
  for (int i = 0; i < 20; ++i) {
    const HeisPoint p = gen.point(2);
    auto comp = [](const TangentVector& v) { return std::array<double, 3>{v.dx, v.dy, v.dt}; };
    auto deriv = [&](bool of_y, const TangentVector& along) {
      const HeisPoint p1{p.x + h * along.dx, p.y + h * along.dy, p.t + h * along.dt};
      const HeisPoint p0{p.x - h * along.dx, p.y - h * along.dy, p.t - h * along.dt};
      const auto a = comp(of_y ? frame_at(p1).Y : frame_at(p1).X);
      const auto b = comp(of_y ? frame_at(p0).Y : frame_at(p0).X);
      return std::array<double, 3>{(a[0] - b[0]) / (2 * h), (a[1] - b[1]) / (2 * h),
                                   (a[2] - b[2]) / (2 * h)};
    };
    const Frame fr = frame_at(p);
    const auto xy = deriv(true, fr.X), yx = deriv(false, fr.Y);
    CHECK(xy[0] - yx[0] == doctest::Approx(0.0));
    CHECK(xy[1] - yx[1] == doctest::Approx(0.0));
    CHECK(xy[2] - yx[2] == doctest::Approx(-4.0).epsilon(1e-8));
  }
}

TEST_CASE("left translation preserves frame and contact form") {
  Gen gen(14);
  for (int i = 0; i < 500; ++i) {
    const HeisPoint g = gen.point(4), p = gen.point(4);
    const Frame here = frame_at(p), there = frame_at(group_mul(g, p));
    const TangentVector X = push_left(g, here.X), Y = push_left(g, here.Y);
    REQUIRE(std::abs(X.dt - there.X.dt) <= 1e-12 * (1 + std::abs(there.X.dt)));
    REQUIRE(std::abs(Y.dt - there.Y.dt) <= 1e-12 * (1 + std::abs(there.Y.dt)));
    const TangentVector v{p, gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)};
    REQUIRE(std::abs(eta(push_left(g, v)) - eta(v)) < 1e-12);
  }
}

TEST_CASE("flow of X") {
  CHECK(flow_X(kOrigin, 1.5) == HeisPoint{1.5, 0, 0});
  CHECK(flow_X({0, 1, 0}, 1) == HeisPoint{1, 1, 2});
  const HeisPoint p{0.2, -0.4, 0.9};
  CHECK(flow_X(p, 0) == p);
  Gen gen(15);
  for (int i = 0; i < 100; ++i) {
    const HeisPoint q = gen.point(3);
    const double s = gen.uniform(-2, 2);
    CHECK(same(flow_X(q, s), group_mul(q, {s, 0, 0}), 1e-12));
    // det of the coordinate Jacobian, by finite differences.
    const Mat3 J = coordinate_jacobian_fd([s](const HeisPoint& x) { return flow_X(x, s); }, q, 1e-3);
    CHECK(det3(J) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("parabolic dilation") {
  const HeisPoint p{0.5, -1, 2};
  CHECK(dilate(p, 1) == p);
  CHECK(dilate({1, 0, 0}, 2) == HeisPoint{2, 0, 0});
  CHECK(dilate({0, 0, 1}, 3) == HeisPoint{0, 0, 9});
  CHECK_THROWS_AS(dilate(p, 0), Error);
  Gen gen(16);
  for (double r : {0.5, 2.0, 3.0})
    for (int i = 0; i < 10; ++i) {
      const HeisPoint a = gen.point(1), b = gen.point(1);
      CHECK(cc_distance(dilate(a, r), dilate(b, r)) ==
            doctest::Approx(r * cc_distance(a, b)).epsilon(1e-8));
    }
}

TEST_CASE("metric convention") {
  const MetricK one, four(4);
  CHECK(one.norm(0.6, 0.8) == doctest::Approx(1.0));
  CHECK(four.norm(1, 0) == doctest::Approx(2.0));
  CHECK(four.norm(0, 1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(MetricK(0.5), Error);
}

TEST_CASE("curve length") {
  const double s = 1.75;
  CHECK(curve_length(x_segment(kOrigin, s, 1)) == doctest::Approx(s));
  CHECK(curve_length(x_segment(kOrigin, s, 1), MetricK(4)) == doctest::Approx(2 * s));
  CHECK(curve_length(LegendrianPolyline{}) == 0.0);

  // Refinement invariance on a frame trajectory and on a sampled geodesic.
  const HeisPoint p{0.3, 0.8, -0.2};
  CHECK(curve_length(x_segment(p, 2, 3)) == doctest::Approx(curve_length(x_segment(p, 2, 40))));
  const auto coarse = geodesic(kOrigin, {1, 0.5, 0.7}, 1000).path;
  const auto fine = geodesic(kOrigin, {1, 0.5, 0.7}, 2000).path;
  CHECK(rel_err(curve_length(coarse), curve_length(fine)) < 1e-6);

  // Left translation keeps every chord, hence the length, exactly.
  Gen gen(17);
  for (int i = 0; i < 50; ++i) {
    const HeisPoint g = gen.point(3);
    const auto moved = coarse.mapped([g](const HeisPoint& x) { return group_mul(g, x); });
    REQUIRE(curve_length(moved) == doctest::Approx(curve_length(coarse)).epsilon(1e-12));
  }
}

TEST_CASE("polyline validation") {
  std::vector<CurveSample> bad{{0.0, kOrigin}, {0.0, {1, 0, 0}}};
  CHECK_THROWS_AS((void)LegendrianPolyline(bad), Error);
  std::vector<CurveSample> nan{{0.0, kOrigin}, {1.0, {NAN, 0, 0}}};
  CHECK_THROWS_AS((void)LegendrianPolyline(nan), Error);

  // Moving along t is not horizontal.
  const std::vector<HeisPoint> vertical{kOrigin, {0, 0, 1}};
  const auto c = LegendrianPolyline::from_points(vertical);
  CHECK(c.horizontality_residual() > 1.0);
  try {
    (void)curve_length(c);
    FAIL("expected NonLegendrian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonLegendrian);
  }
  const std::vector<HeisPoint> tilted{kOrigin, {1, 0, 1e-3}};
  CHECK_NOTHROW((void)curve_length(LegendrianPolyline::from_points(tilted), MetricK{}, 1e-2));
}

TEST_CASE("line integral of sampled fields") {
  const HeisPoint lo{-5, -5, -5}, hi{5, 5, 5};
  const auto c = x_segment({-1, 0.5, 0.3}, 2, 4);  // x from -1 to 1, length 2
  CHECK(line_integral(c, SampledField::constant(lo, hi, 1.0)) == doctest::Approx(2.0));
  CHECK(line_integral(c, SampledField::constant(lo, hi, 0.0)) == 0.0);

  // Indicator of {x >= 0}: half the curve by length. Compared with midpoint quadrature.
  const SampledField half({-5, -5, -5}, {5, 5, 5}, {2, 1, 1}, {0.0, 1.0});
  CHECK(line_integral(c, half) == doctest::Approx(1.0));
  const auto tilted = LegendrianPolyline::from_points(std::vector<HeisPoint>{
      flow_X({-0.7, 0, 0}, 0), group_mul({-0.7, 0, 0}, {1.6, 1.2, 0})});
  double quad = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double lam = (k + 0.5) / n;
    quad += (-0.7 + 1.6 * lam >= 0 ? 1.0 : 0.0) * 2.0 / n;  // chord length 2
  }
  CHECK(line_integral(tilted, half) == doctest::Approx(quad).epsilon(1e-4));

  const SampledField small({-0.5, -1, -1}, {0.5, 1, 1}, {1, 1, 1}, {1.0});
  try {
    (void)line_integral(c, small);
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}

TEST_CASE("grid walk splits at integer planes") {
  std::vector<GridPiece> pieces;
  const double stop = walk_grid({0.5, 0.5, 0.5}, {2.5, 0.5, 0.5}, 0.0, {3, 1, 1},
                                [&](const GridPiece& p) { pieces.push_back(p); });
  CHECK(stop == 1.0);
  REQUIRE(pieces.size() == 3);
  CHECK(pieces[0].lam_end == doctest::Approx(0.25));
  CHECK(pieces[1].cell[0] == 1);
  CHECK(pieces[2].lam_end - pieces[2].lam_begin == doctest::Approx(0.25));
  const double early = walk_grid({0.5, 0.5, 0.5}, {4.5, 0.5, 0.5}, 0.0, {3, 1, 1},
                                 [](const GridPiece&) {});
  CHECK(early == doctest::Approx(0.625));
}

}  // TEST_SUITE
