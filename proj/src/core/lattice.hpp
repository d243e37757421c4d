// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "heis.hpp"

namespace crmod {

// Element A^n1 B^n2 C^m of the lattice.
struct GroupWord {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t m = 0;

  friend bool operator==(const GroupWord&, const GroupWord&) = default;
};

struct QuotientPoint {
  HeisPoint rep;   // inside the half-open fundamental cell
  GroupWord word;  // act(word, rep) is the original point
};

// Lattice generated by A = (1,0,0), B = (sigma, tau, 0), C = (0,0,1) acting by
// left translation. Discreteness requires 4 tau to be a nonzero integer.
class Lattice {
 public:
  Lattice() : Lattice(0.0, 0.25) {}
  Lattice(double sigma, double tau);

  double sigma() const noexcept { return sigma_; }
  double tau() const noexcept { return tau_; }
  // 4 tau as an integer: B A = A B C^{4 tau}.
  std::int64_t commutator_power() const noexcept { return four_tau_; }

  HeisPoint generator_a() const noexcept { return {1.0, 0.0, 0.0}; }
  HeisPoint generator_b() const noexcept { return {sigma_, tau_, 0.0}; }
  HeisPoint generator_c() const noexcept { return {0.0, 0.0, 1.0}; }

  // (n1 + n2 sigma, n2 tau, m - 2 n1 n2 tau)
  HeisPoint element(const GroupWord& w) const noexcept;
  GroupWord compose(const GroupWord& lhs, const GroupWord& rhs) const noexcept;
  GroupWord inverse(const GroupWord& w) const noexcept;

  HeisPoint act(const GroupWord& w, const HeisPoint& p) const noexcept {
    return group_mul(element(w), p);
  }

  // Cell coordinates (u, v, w): p = (u + v sigma, v tau, w) on the cell.
  std::array<double, 3> cell_coords(const HeisPoint& p) const noexcept;
  HeisPoint from_cell_coords(const std::array<double, 3>& c) const noexcept;

  // Reduction order: (u, v) in the abelianized lattice first, then t.
  QuotientPoint reduce(const HeisPoint& p) const;

  bool in_cell(const HeisPoint& p) const noexcept;

  double volume() const noexcept { return std::abs(tau_); }

 private:
  double sigma_;
  double tau_;
  std::int64_t four_tau_;
};

struct QuotientDistance {
  double distance = 0.0;
  GroupWord word;               // minimizing deck word applied to q.rep
  bool touches_boundary = false;  // minimizer sits on the search window edge
};

QuotientDistance quotient_distance(const Lattice& lat, const QuotientPoint& p,
                                   const QuotientPoint& q, int radius = 2);

// Minimal length over the fixed-endpoint homotopy class labelled by the deck
// word cls: the distance between lifts in the universal cover.
double homotopy_min_length(const Lattice& lat, const QuotientPoint& p, const QuotientPoint& q,
                           const GroupWord& cls, const MetricK& m = MetricK{});

}  // namespace crmod
