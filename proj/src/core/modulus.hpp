// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heis.hpp"
#include "lattice.hpp"
#include "qc_maps.hpp"

namespace crmod {

// Regular grid over the fundamental cell in cell coordinates (u, v, w).
struct Grid {
  int nx = 32;
  int ny = 32;
  int nt = 32;
  double cell_volume = 0.0;

  static Grid over(const Lattice& lat, int nx, int ny, int nt);

  std::array<int, 3> dims() const noexcept { return {nx, ny, nt}; }
  std::size_t cells() const noexcept {
    return static_cast<std::size_t>(nx) * ny * nt;
  }
  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * ny + j) * nt + k;
  }
};

// Finitely many curves on the quotient, each stored as a lift whose first
// sample lies in the fundamental cell. Lattice words of the crossings are
// recovered during assembly.
struct CurveFamily {
  std::vector<LegendrianPolyline> curves;

  std::size_t size() const noexcept { return curves.size(); }
  bool empty() const noexcept { return curves.empty(); }
};

// Left-translates a lift so its first sample is the canonical representative.
LegendrianPolyline canonical_lift(const Lattice& lat, const LegendrianPolyline& c);

// X-trajectories s -> q exp(sX), s in [-a, a], through an m x n x n grid of
// starting points at cell-centred positions of the fundamental cell
// (m along the flow coordinate u, n along v and w).
CurveFamily family_X_lines(const Lattice& lat, double a, int m, int n,
                           int samples_per_curve = 5);

CurveFamily push_family(const ContactMap& f, const Lattice& lat, const CurveFamily& fam);

// Sparse curves x cells matrix of sub-Riemannian lengths, CSR layout.
struct ConstraintMatrix {
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;
  std::vector<double> row_length;   // sub-Riemannian length of each kept curve
  std::vector<std::size_t> source;  // index of the curve in the family
  std::size_t non_rectifiable = 0;  // curves dropped as non-Legendrian
  std::vector<std::string> warnings;

  std::size_t rows() const noexcept { return row_ptr.size() - 1; }
  std::size_t nnz() const noexcept { return val.size(); }

  // Multiplies every length by c (metric scaled by a constant).
  void scale(double c);
};

// Throws Infeasible for a Legendrian curve of zero length.
ConstraintMatrix assemble_constraints(const CurveFamily& fam, const Lattice& lat,
                                      const Grid& g, const MetricK& m = MetricK{},
                                      double horizontality_tol = kDefaultHorizontalityTol);

struct SolveOptions {
  double tol = 1e-6;  // relative duality gap
  std::int64_t max_iter = 100000;
};

struct ModulusResult {
  double value = 0.0;
  std::vector<double> density;     // admissible: min_i (L density)_i = 1
  std::vector<double> multipliers;
  double dual_bound = 0.0;
  double gap = 0.0;
  std::int64_t iterations = 0;
  bool converged = true;
  bool non_rectifiable_members = false;
  std::vector<std::string> warnings;
};

class NotConvergedError : public Error {
 public:
  explicit NotConvergedError(ModulusResult best)
      : Error(ErrorCode::NotConverged, "solve_modulus: duality gap above tolerance after max_iter"),
        best_(std::move(best)) {}
  const ModulusResult& best() const noexcept { return best_; }

 private:
  ModulusResult best_;
};

// min sum_c vol_c sigma_c^4 over sigma >= 0 with L sigma >= 1, by exact
// coordinate ascent on the Lagrange dual. Throws NotConvergedError carrying
// the best pair when the gap stays above tol.
ModulusResult solve_modulus(const ConstraintMatrix& L, std::span<const double> cell_volumes,
                            const SolveOptions& opts = {});
ModulusResult solve_modulus(const ConstraintMatrix& L, const Grid& g,
                            const SolveOptions& opts = {});

double dual_objective(const ConstraintMatrix& L, std::span<const double> cell_volumes,
                      std::span<const double> multipliers);

// (1 / 2a)^4 vol
double analytic_modulus_fibration(double a, double vol);

struct DensityEvaluation {
  double energy = 0.0;        // sum vol_c sigma_c^4
  double min_integral = 0.0;  // min over curves of the discrete line integral
  bool admissible = false;
};

DensityEvaluation evaluate_density(const ConstraintMatrix& L, std::span<const double> cell_volumes,
                                   std::span<const double> density);

// 1 / (2a) on every cell crossed by the family, 0 elsewhere.
std::vector<double> tube_indicator_density(const ConstraintMatrix& L, double length);

struct QuasiInvarianceReport {
  ModulusResult source;  // Mod of the family, Levi metric
  ModulusResult image;   // Mod of f(family) in f.target
  double K = 1.0;
  double ratio = 1.0;  // source.value / image.value
  double margin = 0.0;
  bool lower_holds = false;  // Mod1 / K^2 <= Mod2
  bool upper_holds = false;  // Mod2 <= K^2 Mod1
};

// Checks Mod1/K^2 <= Mod2 <= K^2 Mod1 using certified bounds: each side
// compares a dual lower bound with a primal value, relaxed by the relative
// discretization margin.
QuasiInvarianceReport verify_quasi_invariance(const ContactMap& f, const CurveFamily& fam,
                                              double K, const Lattice& lat, const Grid& g,
                                              const SolveOptions& opts = {},
                                              double margin = 1e-6);

}  // namespace crmod
