// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

// Hand-rolled generators and reference computations shared by the tests. The
// reference routines deliberately avoid the library's closed forms.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "heis.hpp"
#include "lattice.hpp"
#include "modulus.hpp"
#include "qc_maps.hpp"

namespace crmod::test {

inline constexpr double kPi = std::numbers::pi;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  HeisPoint point(double box) {
    return {uniform(-box, box), uniform(-box, box), uniform(-box, box)};
  }
  HeisPoint planar(double box) { return {uniform(-box, box), uniform(-box, box), 0.0}; }
  GroupWord word(int r) { return {integer(-r, r), integer(-r, r), integer(-r, r)}; }
  // Entries in [-2, 2] with |det| >= 0.1.
  Mat2 matrix(bool orientation_preserving) {
    for (;;) {
      Mat2 m{uniform(-2, 2), uniform(-2, 2), uniform(-2, 2), uniform(-2, 2)};
      if (std::abs(m.det()) < 0.1) continue;
      if (orientation_preserving && m.det() < 0) std::swap(m.a11, m.a12), std::swap(m.a21, m.a22);
      return m;
    }
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// ---------------------------------------------------------------------------
// Distance by shooting: for a circular arc of chord rho and turning angle th,
// the lifted height change is computed by Simpson quadrature of
// 2 (y dx - x dy) along the arc, and th is found by bisection on |dt|.

struct ArcSample {
  double length;
  double abs_dt;
};

inline ArcSample shoot_arc(double rho, double th, int panels = 4000) {
  // Unit-speed direction angle goes from -th/2 to th/2, so the chord is along +x.
  const double L = th < 1e-12 ? rho : rho * (th / 2) / std::sin(th / 2);
  auto pos = [&](double s) {  // s in [0, 1]
    if (th < 1e-12) return std::array<double, 2>{rho * s, 0.0};
    const double r = L / th;
    const double a0 = -th / 2, a = a0 + th * s;
    return std::array<double, 2>{r * (std::sin(a) - std::sin(a0)), r * (std::cos(a0) - std::cos(a))};
  };
  auto integrand = [&](double s) {
    const auto p = pos(s);
    const double a = -th / 2 + th * s;
    const double dx = L * std::cos(a), dy = L * std::sin(a);
    return 2.0 * (p[1] * dx - p[0] * dy);
  };
  double acc = integrand(0) + integrand(1);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(double(i) / panels);
  return {L, std::abs(acc / (3.0 * panels))};
}

inline double shooting_distance(const HeisPoint& p, const HeisPoint& q) {
  const HeisPoint d = group_mul(group_inv(p), q);
  const double rho = std::hypot(d.x, d.y), target = std::abs(d.t);
  if (target == 0.0) return rho;
  if (rho < 1e-12) {
    // Closed circle of enclosed area |t|/4.
    const double r = std::sqrt(target / (4 * kPi));
    return 2 * kPi * r;
  }
  double lo = 0.0, hi = 2 * kPi - 1e-9;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shoot_arc(rho, mid).abs_dt < target ? lo : hi) = mid;
  }
  return shoot_arc(rho, 0.5 * (lo + hi)).length;
}

// ---------------------------------------------------------------------------
// Lattice bookkeeping by hand.

inline std::array<double, 3> cell_coords_by_hand(double sigma, double tau, const HeisPoint& p) {
  const double v = p.y / tau;
  return {p.x - v * sigma, v, p.t};
}

// A^n1 B^n2 C^m by repeated group multiplication.
inline HeisPoint word_by_products(const Lattice& lat, const GroupWord& w) {
  HeisPoint r = kOrigin;
  auto power = [](HeisPoint g, std::int64_t n) {
    HeisPoint acc = kOrigin;
    const HeisPoint step = n >= 0 ? g : group_inv(g);
    for (std::int64_t i = 0; i < std::abs(n); ++i) acc = group_mul(acc, step);
    return acc;
  };
  r = group_mul(r, power(lat.generator_a(), w.n1));
  r = group_mul(r, power(lat.generator_b(), w.n2));
  r = group_mul(r, power(lat.generator_c(), w.m));
  return r;
}

// ---------------------------------------------------------------------------
// Constraint rows by dense sampling: each segment is cut into n equal pieces
// whose midpoints are reduced into the cell and binned.

inline std::vector<double> sampled_row(const LegendrianPolyline& c, const Lattice& lat,
                                       const Grid& g, const MetricK& m, int n) {
  std::vector<double> row(g.cells(), 0.0);
  const auto s = c.samples();
  const auto lens = segment_lengths(c, m);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const HeisPoint P = s[i].point, Q = s[i + 1].point;
    for (int k = 0; k < n; ++k) {
      const double lam = (k + 0.5) / n;
      const HeisPoint x{P.x + lam * (Q.x - P.x), P.y + lam * (Q.y - P.y), P.t + lam * (Q.t - P.t)};
      const auto cc = cell_coords_by_hand(lat.sigma(), lat.tau(), lat.reduce(x).rep);
      auto bin = [](double u, int n_) { return std::clamp(int(std::floor(u * n_)), 0, n_ - 1); };
      row[g.index(bin(cc[0], g.nx), bin(cc[1], g.ny), bin(cc[2], g.nt))] += lens[i] / n;
    }
  }
  return row;
}

inline std::vector<double> dense_row(const ConstraintMatrix& L, std::size_t r) {
  std::vector<double> row(L.cols, 0.0);
  for (std::size_t k = L.row_ptr[r]; k < L.row_ptr[r + 1]; ++k) row[L.col[k]] += L.val[k];
  return row;
}

// ---------------------------------------------------------------------------
// Modulus by plain projected gradient ascent on the Lagrange dual with
// backtracking; slow but structurally unrelated to the production solver.

inline double dual_by_gradient_ascent(const std::vector<std::vector<double>>& rows,
                                      const std::vector<double>& vol, int iters = 200000) {
  const std::size_t R = rows.size(), C = vol.size();
  const double kc = 3.0 / std::pow(4.0, 4.0 / 3.0);
  auto value = [&](const std::vector<double>& lam, std::vector<double>* grad) {
    std::vector<double> s(C, 0.0);
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t c = 0; c < C; ++c) s[c] += lam[i] * rows[i][c];
    double g = 0.0;
    for (double l : lam) g += l;
    for (std::size_t c = 0; c < C; ++c) g -= kc * std::pow(s[c], 4.0 / 3.0) / std::cbrt(vol[c]);
    if (grad) {
      grad->assign(R, 1.0);
      for (std::size_t c = 0; c < C; ++c) {
        const double sig = std::cbrt(s[c] / (4 * vol[c]));
        for (std::size_t i = 0; i < R; ++i) (*grad)[i] -= rows[i][c] * sig;
      }
    }
    return g;
  };
  std::vector<double> lam(R, 1e-3), grad, trial(R);
  double step = 1e-2, cur = value(lam, &grad);
  for (int it = 0; it < iters; ++it) {
    for (;;) {
      for (std::size_t i = 0; i < R; ++i) trial[i] = std::max(0.0, lam[i] + step * grad[i]);
      const double v = value(trial, nullptr);
      if (v >= cur || step < 1e-14) break;
      step *= 0.5;
    }
    std::vector<double> g2;
    const double v = value(trial, &g2);
    if (v < cur) break;
    const bool stalled = v - cur <= 1e-16 * std::abs(cur);
    lam = trial, cur = v, grad = std::move(g2);
    step *= 1.5;
    if (stalled) break;
  }
  return cur;
}

// Closed form for a single curve: min sum v sigma^4 subject to sum l sigma >= 1.
inline double single_curve_modulus(const std::vector<double>& row, const std::vector<double>& vol) {
  double acc = 0.0;
  for (std::size_t c = 0; c < row.size(); ++c)
    if (row[c] > 0) acc += std::pow(row[c], 4.0 / 3.0) / std::cbrt(vol[c]);
  return 1.0 / (acc * acc * acc);
}

// ---------------------------------------------------------------------------
// Singular values of diag(sqrt K, 1/sqrt K) M by scanning unit directions.

inline std::array<double, 2> scanned_singular_values(const Mat2& M, double K) {
  const double sk = std::sqrt(K);
  auto stretch = [&](double ang) {
    const double a = std::cos(ang), b = std::sin(ang);
    return std::hypot(sk * (M.a11 * a + M.a12 * b), (M.a21 * a + M.a22 * b) / sk);
  };
  auto refine = [&](double ang, bool maximize) {
    double h = kPi / 720;
    for (int it = 0; it < 200; ++it) {
      const double l = stretch(ang - h), c = stretch(ang), r = stretch(ang + h);
      if (maximize ? (r > c && r >= l) : (r < c && r <= l)) ang += h;
      else if (maximize ? (l > c) : (l < c)) ang -= h;
      else h *= 0.5;
    }
    return stretch(ang);
  };
  double best_hi = 0, best_lo = 1e300, arg_hi = 0, arg_lo = 0;
  for (int i = 0; i < 720; ++i) {
    const double ang = kPi * i / 720, v = stretch(ang);
    if (v > best_hi) best_hi = v, arg_hi = ang;
    if (v < best_lo) best_lo = v, arg_lo = ang;
  }
  return {refine(arg_hi, true), refine(arg_lo, false)};
}

}  // namespace crmod::test
