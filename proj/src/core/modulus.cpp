// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace crmod {

Grid Grid::over(const Lattice& lat, int nx, int ny, int nt) {
  require(nx >= 1 && ny >= 1 && nt >= 1, "grid: resolution must be positive");
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.nt = nt;
  g.cell_volume = lat.volume() / (static_cast<double>(nx) * ny * nt);
  return g;
}

LegendrianPolyline canonical_lift(const Lattice& lat, const LegendrianPolyline& c) {
  if (c.empty()) return c;
  const QuotientPoint q = lat.reduce(c.front());
  const HeisPoint h = group_inv(lat.element(q.word));
  const auto src = c.samples();
  std::vector<CurveSample> s(src.begin(), src.end());
  for (auto& x : s) x.point = group_mul(h, x.point);
  // Recomputing the translate can round the start out of the cell; pin it.
  s.front().point = q.rep;
  return LegendrianPolyline(std::move(s));
}

CurveFamily family_X_lines(const Lattice& lat, double a, int m, int n, int samples_per_curve) {
  require(a > 0.0 && std::isfinite(a), "family_X_lines: a must be positive");
  require(m >= 1 && n >= 1, "family_X_lines: sample counts must be >= 1");
  require(samples_per_curve >= 2, "family_X_lines: need at least two samples per curve");
  CurveFamily fam;
  fam.curves.reserve(static_cast<std::size_t>(m) * n * n);
  const double ds = 2.0 * a / (samples_per_curve - 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const HeisPoint q =
            lat.from_cell_coords({(i + 0.5) / m, (j + 0.5) / n, (k + 0.5) / n});
        std::vector<CurveSample> s;
        s.reserve(samples_per_curve);
        for (int r = 0; r < samples_per_curve; ++r) {
          const double param = r + 1 == samples_per_curve ? a : -a + r * ds;
          s.push_back({param, flow_X(q, param)});
        }
        fam.curves.push_back(canonical_lift(lat, LegendrianPolyline(std::move(s))));
      }
  return fam;
}

CurveFamily push_family(const ContactMap& f, const Lattice& lat, const CurveFamily& fam) {
  require(static_cast<bool>(f.forward), "push_family: map has no forward function");
  require(f.lattice_equivariant,
          "push_family: map '" + f.name + "' does not descend to the quotient");
  CurveFamily out;
  out.curves.reserve(fam.size());
  for (const auto& c : fam.curves) out.curves.push_back(canonical_lift(lat, push_curve(f, c)));
  return out;
}

void ConstraintMatrix::scale(double c) {
  require(c > 0.0 && std::isfinite(c), "ConstraintMatrix::scale: factor must be positive");
  for (double& v : val) v *= c;
  for (double& v : row_length) v *= c;
}

namespace {

std::array<double, 3> index_coords(const Lattice& lat, const Grid& g, const HeisPoint& p) {
  const auto c = lat.cell_coords(p);
  return {c[0] * g.nx, c[1] * g.ny, c[2] * g.nt};
}

HeisPoint lerp(const HeisPoint& p, const HeisPoint& q, double lam) {
  return {p.x + lam * (q.x - p.x), p.y + lam * (q.y - p.y), p.t + lam * (q.t - p.t)};
}

std::uint32_t cell_of(const Lattice& lat, const Grid& g, const HeisPoint& rep) {
  const auto c = index_coords(lat, g, rep);
  auto clampi = [](double v, int n) {
    return std::clamp(static_cast<int>(std::floor(v)), 0, n - 1);
  };
  return static_cast<std::uint32_t>(g.index(clampi(c[0], g.nx), clampi(c[1], g.ny),
                                            clampi(c[2], g.nt)));
}

// Splits one straight lift segment among grid cells, re-reducing to the
// fundamental cell each time the walk leaves it.
void split_segment(const Lattice& lat, const Grid& g, const HeisPoint& P, const HeisPoint& Q,
                   double length, std::vector<std::pair<std::uint32_t, double>>& out) {
  const std::array<int, 3> dims = g.dims();
  double lam = 0.0;
  for (int guard = 0; lam < 1.0; ++guard) {
    if (guard > 1000000) fail(ErrorCode::Internal, "assemble_constraints: walk does not advance");
    const double probe = std::min(1e-9, 0.5 * (1.0 - lam));
    const QuotientPoint r = lat.reduce(lerp(P, Q, lam + probe));
    const HeisPoint h = group_inv(lat.element(r.word));
    const auto c0 = index_coords(lat, g, group_mul(h, P));
    const auto c1 = index_coords(lat, g, group_mul(h, Q));
    const double stop = walk_grid(c0, c1, lam, dims, [&](const GridPiece& piece) {
      out.emplace_back(static_cast<std::uint32_t>(
                           g.index(piece.cell[0], piece.cell[1], piece.cell[2])),
                       (piece.lam_end - piece.lam_begin) * length);
    });
    if (stop > lam) {
      lam = stop;
    } else {
      // Sliver on a cell face: the probe point decides.
      out.emplace_back(cell_of(lat, g, r.rep), probe * length);
      lam += probe;
    }
  }
}

}  // namespace

ConstraintMatrix assemble_constraints(const CurveFamily& fam, const Lattice& lat, const Grid& g,
                                      const MetricK& m, double horizontality_tol) {
  require(g.cells() > 0 && g.cells() <= std::numeric_limits<std::uint32_t>::max(),
          "assemble_constraints: grid too large");
  ConstraintMatrix L;
  L.cols = g.cells();
  std::vector<std::pair<std::uint32_t, double>> row;
  std::size_t single_cell = 0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto& c = fam.curves[i];
    std::vector<double> seg;
    try {
      seg = segment_lengths(c, m, horizontality_tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonLegendrian) throw;
      ++L.non_rectifiable;
      continue;
    }
    const double total = std::accumulate(seg.begin(), seg.end(), 0.0);
    if (!(total > 0.0))
      fail(ErrorCode::Infeasible, "assemble_constraints: curve " + std::to_string(i) +
                                      " has zero length; no admissible density exists");
    row.clear();
    const auto s = c.samples();
    for (std::size_t k = 0; k < seg.size(); ++k)
      if (seg[k] > 0.0) split_segment(lat, g, s[k].point, s[k + 1].point, seg[k], row);
    std::sort(row.begin(), row.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    std::size_t distinct = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!L.col.empty() && L.col.size() > L.row_ptr.back() && L.col.back() == row[k].first) {
        L.val.back() += row[k].second;
      } else {
        L.col.push_back(row[k].first);
        L.val.push_back(row[k].second);
        ++distinct;
      }
    }
    if (distinct == 1) ++single_cell;
    L.row_ptr.push_back(L.col.size());
    L.row_length.push_back(total);
    L.source.push_back(i);
  }
  if (L.non_rectifiable > 0)
    L.warnings.push_back(std::to_string(L.non_rectifiable) +
                         " non-Legendrian curve(s) dropped from the family");
  if (single_cell > 0)
    L.warnings.push_back(std::to_string(single_cell) +
                         " curve(s) lie inside a single grid cell; the grid is too coarse");
  return L;
}

namespace {

constexpr double kDualConst = 0.75 / 1.5874010519681994;  // 3 / 4^{4/3}

std::vector<double> column_sums(const ConstraintMatrix& L, std::span<const double> lambda) {
  std::vector<double> s(L.cols, 0.0);
  for (std::size_t i = 0; i < L.rows(); ++i) {
    if (lambda[i] == 0.0) continue;
    for (std::size_t k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k)
      s[L.col[k]] += lambda[i] * L.val[k];
  }
  return s;
}

double dual_value(std::span<const double> lambda, std::span<const double> s,
                  std::span<const double> vol) {
  double a = 0.0, b = 0.0;
  for (double l : lambda) a += l;
  for (std::size_t c = 0; c < s.size(); ++c)
    if (s[c] > 0.0) b += std::pow(s[c], 4.0 / 3.0) / std::cbrt(vol[c]);
  return a - kDualConst * b;
}

// Exact maximisation of the dual along coordinate i:
// phi(x) = sum_c L_ic cbrt((base_c + x L_ic) / (4 v_c)) = 1, x >= 0.
double coordinate_step(const ConstraintMatrix& L, std::span<const double> vol,
                       std::span<const double> s, double lam_i, std::size_t i) {
  const std::size_t b = L.row_ptr[i], e = L.row_ptr[i + 1];
  auto phi = [&](double x, double* dphi) {
    double f = 0.0, d = 0.0;
    for (std::size_t k = b; k < e; ++k) {
      const double l = L.val[k];
      const double w = 4.0 * vol[L.col[k]];
      const double base = std::max(0.0, s[L.col[k]] - lam_i * l);
      const double z = (base + x * l) / w;
      const double r = std::cbrt(z);
      f += l * r;
      if (dphi) d += z > 0.0 ? l * l / (3.0 * w * r * r) : std::numeric_limits<double>::infinity();
    }
    if (dphi) *dphi = d;
    return f;
  };
  if (phi(0.0, nullptr) >= 1.0) return 0.0;
  // phi(x) >= sum_c L cbrt(x L / 4v) gives an upper bracket.
  double q = 0.0;
  for (std::size_t k = b; k < e; ++k)
    q += L.val[k] * std::cbrt(L.val[k] / (4.0 * vol[L.col[k]]));
  double lo = 0.0, hi = 1.0 / (q * q * q);
  double x = std::min(lam_i, hi);
  for (int it = 0; it < 100; ++it) {
    double d = 0.0;
    const double f = phi(x, &d) - 1.0;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    double next = std::isfinite(d) && d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-16 * hi)
      return next;
    x = next;
  }
  return x;
}

struct Primal {
  std::vector<double> density;
  double value = 0.0;
};

Primal primal_from(const ConstraintMatrix& L, std::span<const double> vol,
                   std::span<const double> s) {
  Primal p;
  p.density.resize(L.cols);
  for (std::size_t c = 0; c < L.cols; ++c)
    p.density[c] = s[c] > 0.0 ? std::cbrt(s[c] / (4.0 * vol[c])) : 0.0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < L.rows(); ++i) {
    double r = 0.0;
    for (std::size_t k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k)
      r += L.val[k] * p.density[L.col[k]];
    worst = std::min(worst, r);
  }
  if (!(worst > 0.0)) {
    p.value = std::numeric_limits<double>::infinity();
    return p;
  }
  for (double& d : p.density) d /= worst;
  for (std::size_t c = 0; c < L.cols; ++c) {
    const double d2 = p.density[c] * p.density[c];
    p.value += vol[c] * d2 * d2;
  }
  return p;
}

// One projected Newton step on the dual. The Hessian is -L D L^T with
// D_c = dsigma/ds = sigma_c / (3 s_c); the free block is solved by Jacobi-
// preconditioned CG, then an Armijo search along the projected path.
// Returns false when no ascent was found.
bool newton_step(const ConstraintMatrix& L, std::span<const double> vol,
                 std::vector<double>& lambda, std::vector<double>& s, double& dual) {
  const std::size_t n = L.rows();
  std::vector<double> sigma(L.cols, 0.0), dcoef(L.cols, 0.0);
  for (std::size_t c = 0; c < L.cols; ++c)
    if (s[c] > 0.0) {
      sigma[c] = std::cbrt(s[c] / (4.0 * vol[c]));
      dcoef[c] = sigma[c] / (3.0 * s[c]);
    }
  std::vector<double> grad(n), diag(n);
  std::vector<char> free(n);
  double gnorm = 0.0, dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0, d = 0.0;
    for (std::size_t k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k) {
      r += L.val[k] * sigma[L.col[k]];
      d += L.val[k] * L.val[k] * dcoef[L.col[k]];
    }
    grad[i] = 1.0 - r;
    diag[i] = d;
    free[i] = lambda[i] > 0.0 || grad[i] > 0.0;
    if (free[i]) gnorm += grad[i] * grad[i];
    dmax = std::max(dmax, d);
  }
  gnorm = std::sqrt(gnorm);
  if (!(gnorm > 0.0) || !(dmax > 0.0)) return false;
  const double mu = 1e-12 * dmax;

  std::vector<double> t(L.cols);
  auto hess = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::fill(t.begin(), t.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (free[i] && x[i] != 0.0)
        for (std::size_t k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k) t[L.col[k]] += L.val[k] * x[i];
    for (std::size_t c = 0; c < L.cols; ++c) t[c] *= dcoef[c];
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      if (free[i])
        for (std::size_t k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k) r += L.val[k] * t[L.col[k]];
      y[i] = free[i] ? r + mu * x[i] : 0.0;
    }
  };

  std::vector<double> d(n, 0.0), r(n), z(n), p(n), hp(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = free[i] ? grad[i] : 0.0;
  auto precond = [&] {
    for (std::size_t i = 0; i < n; ++i) z[i] = free[i] ? r[i] / (diag[i] + mu) : 0.0;
  };
  precond();
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
  const double cg_tol = std::min(1e-2, std::sqrt(gnorm)) * gnorm;
  for (int it = 0; it < 500; ++it) {
    hess(p, hp);
    double php = 0.0;
    for (std::size_t i = 0; i < n; ++i) php += p[i] * hp[i];
    if (!(php > 0.0)) break;
    const double alpha = rz / php;
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] += alpha * p[i];
      r[i] -= alpha * hp[i];
      rr += r[i] * r[i];
    }
    if (std::sqrt(rr) <= cg_tol) break;
    precond();
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  std::vector<double> trial(n);
  for (double step = 1.0; step > 1e-10; step *= 0.5) {
    double ascent = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trial[i] = free[i] ? std::max(0.0, lambda[i] + step * d[i]) : lambda[i];
      ascent += grad[i] * (trial[i] - lambda[i]);
    }
    if (!(ascent > 0.0)) continue;
    std::vector<double> st = column_sums(L, trial);
    const double g = dual_value(trial, st, vol);
    if (g >= dual + 1e-4 * ascent) {
      lambda.swap(trial);
      s.swap(st);
      dual = g;
      return true;
    }
  }
  return false;
}

void coordinate_sweep(const ConstraintMatrix& L, std::span<const double> vol,
                      std::vector<double>& lambda, std::vector<double>& s) {
  for (std::size_t i = 0; i < L.rows(); ++i) {
    const double x = coordinate_step(L, vol, s, lambda[i], i);
    const double dx = x - lambda[i];
    if (dx == 0.0) continue;
    for (std::size_t k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k)
      s[L.col[k]] = std::max(0.0, s[L.col[k]] + dx * L.val[k]);
    lambda[i] = x;
  }
  s = column_sums(L, lambda);
}

}  // namespace

double dual_objective(const ConstraintMatrix& L, std::span<const double> cell_volumes,
                      std::span<const double> multipliers) {
  require(multipliers.size() == L.rows(), "dual_objective: one multiplier per curve");
  require(cell_volumes.size() == L.cols, "dual_objective: one volume per cell");
  for (double l : multipliers) require(l >= 0.0, "dual_objective: multipliers must be >= 0");
  const auto s = column_sums(L, multipliers);
  return dual_value(multipliers, s, cell_volumes);
}

ModulusResult solve_modulus(const ConstraintMatrix& L, std::span<const double> vol,
                            const SolveOptions& opts) {
  require(vol.size() == L.cols, "solve_modulus: one volume per cell");
  for (double v : vol) require(v > 0.0 && std::isfinite(v), "solve_modulus: volumes must be > 0");
  require(opts.tol > 0.0, "solve_modulus: tol must be positive");
  require(opts.max_iter >= 1, "solve_modulus: max_iter must be >= 1");
  ModulusResult res;
  res.warnings = L.warnings;
  res.non_rectifiable_members = L.non_rectifiable > 0;
  res.density.assign(L.cols, 0.0);
  if (L.rows() == 0) return res;  // sigma = 0 is admissible vacuously
  for (std::size_t i = 0; i < L.rows(); ++i) {
    double r = 0.0;
    for (std::size_t k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k) r += L.val[k];
    if (!(r > 0.0))
      fail(ErrorCode::Infeasible, "solve_modulus: curve with zero length in row " +
                                      std::to_string(i));
  }

  std::vector<double> lambda(L.rows(), 1.0);
  std::vector<double> s = column_sums(L, lambda);
  double best_dual = -std::numeric_limits<double>::infinity();
  // With every multiplier at 1 each row meets a positive cell, so the primal
  // bound is finite from the start.
  Primal best = primal_from(L, vol, s);
  std::vector<double> best_lambda = lambda;

  // A few exact coordinate sweeps, then projected Newton; a sweep replaces
  // any Newton step that fails to ascend.
  constexpr std::int64_t kWarmSweeps = 5;
  double dual = dual_value(lambda, s, vol);
  for (std::int64_t it = 1; it <= opts.max_iter; ++it) {
    if (it <= kWarmSweeps || !newton_step(L, vol, lambda, s, dual)) coordinate_sweep(L, vol, lambda, s);
    dual = dual_value(lambda, s, vol);
    Primal p = primal_from(L, vol, s);
    if (dual > best_dual) {
      best_dual = dual;
      best_lambda = lambda;
    }
    if (p.value < best.value) best = std::move(p);
    res.iterations = it;
    const double gap = (best.value - best_dual) / std::max(best.value, 1e-300);
    if (gap <= opts.tol) break;
  }

  res.value = best.value;
  res.density = std::move(best.density);
  res.multipliers = std::move(best_lambda);
  res.dual_bound = std::min(best_dual, res.value);
  res.gap = std::max(0.0, (res.value - res.dual_bound) / std::max(res.value, 1e-300));
  if (!std::isfinite(res.value) || !std::isfinite(res.dual_bound))
    res.gap = std::numeric_limits<double>::infinity();
  res.converged = res.gap <= opts.tol;
  if (!res.converged) throw NotConvergedError(std::move(res));
  return res;
}

ModulusResult solve_modulus(const ConstraintMatrix& L, const Grid& g, const SolveOptions& opts) {
  require(L.cols == g.cells(), "solve_modulus: matrix and grid disagree on the cell count");
  const std::vector<double> vol(g.cells(), g.cell_volume);
  return solve_modulus(L, vol, opts);
}

double analytic_modulus_fibration(double a, double vol) {
  require(a > 0.0 && std::isfinite(a), "analytic_modulus_fibration: a must be positive");
  require(vol >= 0.0, "analytic_modulus_fibration: volume must be >= 0");
  const double r = 1.0 / (2.0 * a);
  return r * r * r * r * vol;
}

DensityEvaluation evaluate_density(const ConstraintMatrix& L, std::span<const double> vol,
                                   std::span<const double> density) {
  require(vol.size() == L.cols && density.size() == L.cols,
          "evaluate_density: one value per cell");
  DensityEvaluation e;
  for (std::size_t c = 0; c < L.cols; ++c) {
    require(density[c] >= 0.0, "evaluate_density: density must be >= 0");
    const double d2 = density[c] * density[c];
    e.energy += vol[c] * d2 * d2;
  }
  e.min_integral = L.rows() ? std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t i = 0; i < L.rows(); ++i) {
    double r = 0.0;
    for (std::size_t k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k)
      r += L.val[k] * density[L.col[k]];
    e.min_integral = std::min(e.min_integral, r);
  }
  e.admissible = L.rows() == 0 || e.min_integral >= 1.0 - 1e-12;
  return e;
}

std::vector<double> tube_indicator_density(const ConstraintMatrix& L, double length) {
  require(length > 0.0, "tube_indicator_density: length must be positive");
  std::vector<double> d(L.cols, 0.0);
  for (std::size_t k = 0; k < L.nnz(); ++k)
    if (L.val[k] > 0.0) d[L.col[k]] = 1.0 / length;
  return d;
}

QuasiInvarianceReport verify_quasi_invariance(const ContactMap& f, const CurveFamily& fam,
                                              double K, const Lattice& lat, const Grid& g,
                                              const SolveOptions& opts, double margin) {
  require(K >= 1.0, "verify_quasi_invariance: K must be >= 1");
  require(margin >= 0.0, "verify_quasi_invariance: margin must be >= 0");
  // Contact on the sampled starting points.
  for (std::size_t i = 0; i < fam.size(); i += std::max<std::size_t>(1, fam.size() / 16))
    (void)horizontal_differential(f, fam.curves[i].front());
  const CurveFamily image = push_family(f, lat, fam);

  QuasiInvarianceReport r;
  r.K = K;
  r.margin = margin;
  r.source = solve_modulus(assemble_constraints(fam, lat, g), g, opts);
  r.image = solve_modulus(assemble_constraints(image, lat, g, f.target), g, opts);
  const double K2 = K * K;
  r.ratio = r.image.value > 0.0 ? r.source.value / r.image.value
                                : std::numeric_limits<double>::infinity();
  r.lower_holds = r.source.dual_bound / K2 <= r.image.value * (1.0 + margin);
  r.upper_holds = r.image.dual_bound <= K2 * r.source.value * (1.0 + margin);
  return r;
}

}  // namespace crmod
