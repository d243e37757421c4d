// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "lattice.hpp"

#include <limits>
#include <string>

#include "geodesics.hpp"

namespace crmod {

Lattice::Lattice(double sigma, double tau) : sigma_(sigma), tau_(tau), four_tau_(0) {
  require(std::isfinite(sigma) && std::isfinite(tau), "lattice: sigma and tau must be finite");
  require(tau != 0.0, "lattice: tau must be nonzero");
  const double ft = 4.0 * tau;
  const double rounded = std::round(ft);
  require(std::abs(ft - rounded) <= 1e-12 * std::max(1.0, std::abs(ft)),
          "lattice: 4*tau = " + std::to_string(ft) +
              " is not an integer; the left-translation group would not be discrete");
  four_tau_ = static_cast<std::int64_t>(rounded);
  tau_ = 0.25 * rounded;
}

HeisPoint Lattice::element(const GroupWord& w) const noexcept {
  const double n1 = static_cast<double>(w.n1);
  const double n2 = static_cast<double>(w.n2);
  return {n1 + n2 * sigma_, n2 * tau_, static_cast<double>(w.m) - 2.0 * n1 * n2 * tau_};
}

GroupWord Lattice::compose(const GroupWord& lhs, const GroupWord& rhs) const noexcept {
  return {lhs.n1 + rhs.n1, lhs.n2 + rhs.n2, lhs.m + rhs.m + four_tau_ * rhs.n1 * lhs.n2};
}

GroupWord Lattice::inverse(const GroupWord& w) const noexcept {
  // compose(w, inv) = identity fixes m_inv = -m - 4 tau (-n1) n2.
  return {-w.n1, -w.n2, -w.m + four_tau_ * w.n1 * w.n2};
}

std::array<double, 3> Lattice::cell_coords(const HeisPoint& p) const noexcept {
  const double v = p.y / tau_;
  return {p.x - v * sigma_, v, p.t};
}

HeisPoint Lattice::from_cell_coords(const std::array<double, 3>& c) const noexcept {
  return {c[0] + c[1] * sigma_, c[1] * tau_, c[2]};
}

namespace {

// floor that keeps values within rounding of an integer from snapping below it.
double cell_floor(double c) {
  const double f = std::floor(c);
  return c - f >= 1.0 ? f + 1.0 : f;
}

bool in_unit(double c) { return c >= 0.0 && c < 1.0; }

}  // namespace

QuotientPoint Lattice::reduce(const HeisPoint& p) const {
  require(p.finite(), "reduce: non-finite point");
  const auto c = cell_coords(p);
  GroupWord w{static_cast<std::int64_t>(cell_floor(c[0])),
              static_cast<std::int64_t>(cell_floor(c[1])), 0};
  HeisPoint r = group_mul(group_inv(element(w)), p);
  // Rounding in the translation can leave u or v a hair outside [0, 1).
  auto rc = cell_coords(r);
  if (!in_unit(rc[0]) || !in_unit(rc[1])) {
    const GroupWord fix{static_cast<std::int64_t>(std::floor(rc[0])),
                        static_cast<std::int64_t>(std::floor(rc[1])), 0};
    w = compose(w, fix);
    r = group_mul(group_inv(element(fix)), r);
    rc = cell_coords(r);
    if (rc[0] < 0.0 || rc[0] >= 1.0) rc[0] = rc[0] < 0.0 ? 0.0 : std::nextafter(1.0, 0.0);
    if (rc[1] < 0.0 || rc[1] >= 1.0) rc[1] = rc[1] < 0.0 ? 0.0 : std::nextafter(1.0, 0.0);
    r = from_cell_coords(rc);
  }
  const double m = cell_floor(r.t);
  r.t -= m;
  if (!in_unit(r.t)) r.t = r.t < 0.0 ? 0.0 : std::nextafter(1.0, 0.0);
  w.m += static_cast<std::int64_t>(m);
  return {r, w};
}

bool Lattice::in_cell(const HeisPoint& p) const noexcept {
  const auto c = cell_coords(p);
  return in_unit(c[0]) && in_unit(c[1]) && in_unit(c[2]);
}

QuotientDistance quotient_distance(const Lattice& lat, const QuotientPoint& p,
                                   const QuotientPoint& q, int radius) {
  require(radius >= 1, "quotient_distance: radius must be >= 1");
  QuotientDistance best{std::numeric_limits<double>::infinity(), {}, false};
  for (std::int64_t n1 = -radius; n1 <= radius; ++n1)
    for (std::int64_t n2 = -radius; n2 <= radius; ++n2)
      for (std::int64_t m = -radius; m <= radius; ++m) {
        const GroupWord w{n1, n2, m};
        const double d = cc_distance(p.rep, lat.act(w, q.rep));
        if (d < best.distance) best = {d, w, false};
      }
  const auto& w = best.word;
  best.touches_boundary = std::max({std::abs(w.n1), std::abs(w.n2), std::abs(w.m)}) ==
                          static_cast<std::int64_t>(radius);
  return best;
}

double homotopy_min_length(const Lattice& lat, const QuotientPoint& p, const QuotientPoint& q,
                           const GroupWord& cls, const MetricK& m) {
  return cc_distance_scaled(m, p.rep, lat.act(cls, q.rep));
}

}  // namespace crmod
