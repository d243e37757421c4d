// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "error.hpp"
#include "geodesics.hpp"
#include "lattice.hpp"
#include "support.hpp"

using namespace crmod;
using crmod::test::cell_coords_by_hand;
using crmod::test::Gen;
using crmod::test::kPi;
using crmod::test::word_by_products;

namespace {

bool close(const HeisPoint& a, const HeisPoint& b, double tol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.t - b.t) <= tol;
}

bool in_unit_cell(const Lattice& lat, const HeisPoint& p) {
  const auto c = cell_coords_by_hand(lat.sigma(), lat.tau(), p);
  return c[0] >= 0 && c[0] < 1 && c[1] >= 0 && c[1] < 1 && c[2] >= 0 && c[2] < 1;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("construction and volume") {
  CHECK(Lattice(0, 1).volume() == 1.0);
  CHECK(Lattice(0, 0.25).volume() == 0.25);
  CHECK(Lattice(0.7, 0.25).volume() == 0.25);
  CHECK(Lattice(0, -0.5).volume() == 0.5);
  CHECK(Lattice(0, 0.75).commutator_power() == 3);
  for (double bad : {0.0, 0.3, 1.0 / 3.0, std::nan("")}) {
    try {
      Lattice lat(0, bad);
      FAIL("accepted tau = " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
    }
  }
}

TEST_CASE("action examples") {
  const Lattice lat(0, 0.25);
  const HeisPoint p{0.3, 0.1, 0.6};
  CHECK(lat.act({}, p) == p);
  CHECK(lat.act({1, 0, 0}, kOrigin) == HeisPoint{1, 0, 0});
  CHECK(lat.act({1, 1, 0}, kOrigin) == HeisPoint{1, 0.25, -0.5});
}

TEST_CASE("closed form of words matches generator products") {
  for (const auto& [sigma, tau] : {std::pair{0.0, 0.25}, {0.5, 0.5}, {-0.3, 1.0}, {0.25, -0.75}}) {
    const Lattice lat(sigma, tau);
    for (int n1 = -3; n1 <= 3; ++n1)
      for (int n2 = -3; n2 <= 3; ++n2)
        for (int m = -3; m <= 3; ++m) {
          const GroupWord w{n1, n2, m};
          REQUIRE(close(lat.element(w), word_by_products(lat, w), 1e-12));
        }
    // Composition and inverse agree with the group law.
    Gen gen(31);
    for (int i = 0; i < 300; ++i) {
      const GroupWord a = gen.word(4), b = gen.word(4);
      REQUIRE(close(lat.element(lat.compose(a, b)),
                    group_mul(lat.element(a), lat.element(b)), 1e-11));
      REQUIRE(lat.compose(a, lat.inverse(a)) == GroupWord{});
      REQUIRE(lat.compose(lat.inverse(a), a) == GroupWord{});
    }
    // B A = A B C^{4 tau}
    const HeisPoint ba = group_mul(lat.generator_b(), lat.generator_a());
    const HeisPoint abc = lat.element({1, 1, lat.commutator_power()});
    REQUIRE(close(ba, abc, 1e-12));
  }
}

TEST_CASE("reduce examples") {
  const Lattice lat(0, 0.25);
  const HeisPoint inside{0.4, 0.1, 0.7};
  const auto q = lat.reduce(inside);
  CHECK(q.rep == inside);
  CHECK(q.word == GroupWord{});
  const auto one = lat.reduce({1, 0, 0});
  CHECK(one.rep == kOrigin);
  CHECK(one.word == GroupWord{1, 0, 0});
}

TEST_CASE("reduce matches a brute-force word search") {
  Gen gen(32);
  for (const auto& [sigma, tau] : {std::pair{0.0, 0.25}, {0.4, 0.5}, {-1.2, 0.75}}) {
    const Lattice lat(sigma, tau);
    for (int i = 0; i < 200; ++i) {
      const HeisPoint p = gen.point(3);
      const auto q = lat.reduce(p);
      REQUIRE(in_unit_cell(lat, q.rep));
      REQUIRE(lat.in_cell(q.rep));
      REQUIRE(close(lat.act(q.word, q.rep), p, 1e-12 * (1 + std::abs(p.t))));
      // Independent search: the unique word placing w^{-1} p in the cell.
      int hits = 0;
      GroupWord found;
      for (int n1 = -12; n1 <= 12; ++n1)
        for (int n2 = -15; n2 <= 15; ++n2) {
          const HeisPoint base = group_mul(group_inv(lat.element({n1, n2, 0})), p);
          const GroupWord w{n1, n2, static_cast<std::int64_t>(std::floor(base.t))};
          if (in_unit_cell(lat, group_mul(group_inv(lat.element(w)), p))) ++hits, found = w;
        }
      REQUIRE(hits == 1);
      REQUIRE(found == q.word);
    }
  }
}

TEST_CASE("reduce is equivariant") {
  Gen gen(33);
  const Lattice lat(0.3, 0.5);
  for (int i = 0; i < 200; ++i) {
    const HeisPoint p = gen.point(2);
    const GroupWord w = gen.word(3);
    const auto a = lat.reduce(p), b = lat.reduce(lat.act(w, p));
    REQUIRE(close(a.rep, b.rep, 1e-10));
    REQUIRE(b.word == lat.compose(w, a.word));
  }
}

TEST_CASE("action preserves contact form and frame") {
  Gen gen(34);
  const Lattice lat(0.2, 0.25);
  for (int i = 0; i < 200; ++i) {
    const GroupWord w = gen.word(3);
    const HeisPoint g = lat.element(w), p = gen.point(2);
    const TangentVector v{p, gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)};
    REQUIRE(std::abs(eta(push_left(g, v)) - eta(v)) < 1e-12);
    const TangentVector X = push_left(g, frame_at(p).X);
    REQUIRE(std::abs(X.dt - frame_at(lat.act(w, p)).X.dt) < 1e-11);
  }
}

TEST_CASE("quotient distance") {
  const Lattice lat(0, 0.25);
  const auto o = lat.reduce(kOrigin);
  CHECK(quotient_distance(lat, o, o).distance == 0.0);
  // Along the fiber both C-classes reach the half-turn point at sqrt(pi/2);
  // words using A and B find shorter loops.
  const auto half = lat.reduce({0, 0, 0.5});
  CHECK(homotopy_min_length(lat, o, half, {}) == doctest::Approx(std::sqrt(kPi / 2)));
  CHECK(homotopy_min_length(lat, o, half, {0, 0, -1}) == doctest::Approx(std::sqrt(kPi / 2)));
  CHECK(quotient_distance(lat, o, half).distance <= std::sqrt(kPi / 2) + 1e-12);

  Gen gen(35);
  for (int i = 0; i < 30; ++i) {
    const auto a = lat.reduce(gen.point(1)), b = lat.reduce(gen.point(1)), c = lat.reduce(gen.point(1));
    const double ab = quotient_distance(lat, a, b).distance;
    const double ba = quotient_distance(lat, b, a).distance;
    const double bc = quotient_distance(lat, b, c).distance;
    const double ac = quotient_distance(lat, a, c).distance;
    REQUIRE(std::abs(ab - ba) < 1e-8);
    REQUIRE(ac <= ab + bc + 1e-8);
    REQUIRE(quotient_distance(lat, a, b, 3).distance <= ab);
    REQUIRE(ab <= cc_distance(a.rep, b.rep) + 1e-15);
    // The lift at the minimizing word reproduces the distance.
    const auto qd = quotient_distance(lat, a, b, 3);
    REQUIRE(homotopy_min_length(lat, a, b, qd.word) == doctest::Approx(qd.distance));
  }
  CHECK_THROWS_AS(quotient_distance(lat, o, half, 0), Error);
}

TEST_CASE("homotopy classes") {
  const Lattice lat(0, 0.25);
  const auto o = lat.reduce(kOrigin);
  const auto p = lat.reduce({0.3, 0.1, 0.2}), q = lat.reduce({0.6, 0.2, 0.9});
  CHECK(homotopy_min_length(lat, p, q, {}) == doctest::Approx(cc_distance(p.rep, q.rep)));
  CHECK(homotopy_min_length(lat, o, o, {1, 0, 0}) == doctest::Approx(1.0));
  CHECK(homotopy_min_length(lat, o, o, {0, 0, 1}) == doctest::Approx(std::sqrt(kPi)));
  CHECK(homotopy_min_length(lat, o, o, {1, 0, 0}, MetricK(4)) == doctest::Approx(2.0));
}

}  // TEST_SUITE
