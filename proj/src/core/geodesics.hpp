// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "heis.hpp"

namespace crmod {

// Segment area enclosed between a circular arc of unit chord and turning
// angle theta and the chord: (theta - sin theta) / (8 sin^2(theta/2)).
double arc_area_unit_chord(double theta);

// Solves rho^2 * arc_area_unit_chord(theta) = area for theta in (0, 2pi).
// Bracketed bisection refined by Newton; |theta error| <= 1e-12.
double solve_turning_angle(double rho, double area);

// Carnot-Caratheodory distance for the Levi metric.
double cc_distance(const HeisPoint& p, const HeisPoint& q);

// Distance in the metric with orthonormal frame {X/sqrt(K), sqrt(K) Y},
// through the isometry (x,y,t) -> (sqrt(K) x, y/sqrt(K), t).
double cc_distance_scaled(const MetricK& m, const HeisPoint& p, const HeisPoint& q);
HeisPoint scaled_isometry(const MetricK& m, const HeisPoint& p);

struct GeodesicSolution {
  double length = 0.0;
  // Signed: positive for counterclockwise projection. +-2pi for a closed circle.
  double turning_angle = 0.0;
  LegendrianPolyline path;
};

// Minimizing arc-lift from p to q sampled at n >= 2 points.
GeodesicSolution geodesic(const HeisPoint& p, const HeisPoint& q, int n);

struct OracleBudget {
  int steps = 32;           // piecewise-constant control intervals
  int restarts = 4;         // random restarts beyond the straight-line start
  int max_sweeps = 4000;    // coordinate-descent sweeps per start
  double initial_step = 0.25;
  double min_step = 1e-9;
  double endpoint_tol = 1e-9;
  std::uint64_t seed = 0x5eed;
};

struct OracleResult {
  double length = 0.0;
  double endpoint_error = 0.0;
  int sweeps = 0;
};

// Independent upper bound: best piecewise-horizontal path found by coordinate
// descent over constant frame controls. Throws BudgetExhausted when the
// endpoint cannot be matched to endpoint_tol.
OracleResult brute_force_search(const HeisPoint& p, const HeisPoint& q,
                                const OracleBudget& budget = {});

inline double brute_force_distance(const HeisPoint& p, const HeisPoint& q,
                                   const OracleBudget& budget = {}) {
  return brute_force_search(p, q, budget).length;
}

}  // namespace crmod
