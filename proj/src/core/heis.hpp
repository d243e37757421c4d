// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "error.hpp"

namespace crmod {

// Point of the Heisenberg group H^3 in exponential coordinates (x, y, t).
struct HeisPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  bool finite() const noexcept {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(t);
  }
  friend bool operator==(const HeisPoint&, const HeisPoint&) = default;
};

inline constexpr HeisPoint kOrigin{0.0, 0.0, 0.0};

// (x,y,t)(u,v,s) = (x+u, y+v, t+s+2yu-2xv)
constexpr HeisPoint group_mul(const HeisPoint& p, const HeisPoint& q) noexcept {
  return {p.x + q.x, p.y + q.y, p.t + q.t + 2.0 * p.y * q.x - 2.0 * p.x * q.y};
}

constexpr HeisPoint group_inv(const HeisPoint& p) noexcept {
  return {-p.x, -p.y, -p.t};
}

// p^{-1} q, the displacement of q seen from p.
constexpr HeisPoint relative(const HeisPoint& p, const HeisPoint& q) noexcept {
  return group_mul(group_inv(p), q);
}

// Coordinate tangent vector dx d/dx + dy d/dy + dt d/dt at base.
struct TangentVector {
  HeisPoint base;
  double dx = 0.0;
  double dy = 0.0;
  double dt = 0.0;
};

// The contact form -1/2 y dx + 1/2 x dy + 1/4 dt evaluated on v.
constexpr double eta(const TangentVector& v) noexcept {
  return -0.5 * v.base.y * v.dx + 0.5 * v.base.x * v.dy + 0.25 * v.dt;
}

// d(eta) = dx ^ dy on a pair of tangent vectors at the same base.
constexpr double d_eta(const TangentVector& v, const TangentVector& w) noexcept {
  return v.dx * w.dy - v.dy * w.dx;
}

struct Frame {
  TangentVector X;  // d/dx + 2y d/dt
  TangentVector Y;  // d/dy - 2x d/dt
};

constexpr Frame frame_at(const HeisPoint& p) noexcept {
  return {{p, 1.0, 0.0, 2.0 * p.y}, {p, 0.0, 1.0, -2.0 * p.x}};
}

// a X + b Y at base. The embedding is horizontal by construction.
struct HorizontalVector {
  HeisPoint base;
  double a = 0.0;
  double b = 0.0;

  constexpr TangentVector embed() const noexcept {
    return {base, a, b, 2.0 * (a * base.y - b * base.x)};
  }
};

// Differential of left translation by g, applied to v.
constexpr TangentVector push_left(const HeisPoint& g, const TangentVector& v) noexcept {
  return {group_mul(g, v.base), v.dx, v.dy,
          v.dt + 2.0 * g.y * v.dx - 2.0 * g.x * v.dy};
}

// Time-s flow of X: right multiplication by (s, 0, 0).
constexpr HeisPoint flow_X(const HeisPoint& p, double s) noexcept {
  return {p.x + s, p.y, p.t + 2.0 * s * p.y};
}

// Parabolic dilation (x,y,t) -> (rx, ry, r^2 t).
HeisPoint dilate(const HeisPoint& p, double r);

// Sub-Riemannian metric on the contact plane for which {X/sqrt(K), sqrt(K) Y}
// is orthonormal. K = 1 is the Levi metric.
class MetricK {
 public:
  MetricK() = default;
  explicit MetricK(double K);

  double K() const noexcept { return K_; }
  double sqrt_k() const noexcept { return sqrt_k_; }

  // |aX + bY|_K = sqrt(K a^2 + b^2 / K)
  double norm(double a, double b) const noexcept {
    return std::hypot(sqrt_k_ * a, b / sqrt_k_);
  }

 private:
  double K_ = 1.0;
  double sqrt_k_ = 1.0;
};

inline constexpr double kDefaultHorizontalityTol = 1e-6;

struct CurveSample {
  double param = 0.0;
  HeisPoint point;
};

// Frame coefficients of one polyline segment, read off the chord p_i^{-1} p_{i+1}
// in the frame at the segment start.
struct SegmentChord {
  double a = 0.0;
  double b = 0.0;
  double eta_component = 0.0;  // eta of the chord, i.e. dt/4 at the origin
};

SegmentChord segment_chord(const HeisPoint& from, const HeisPoint& to) noexcept;

// Sampled horizontal curve. The residual is the worst per-segment ratio
// |eta(chord)| / |(a,b)|.
class LegendrianPolyline {
 public:
  LegendrianPolyline() = default;
  explicit LegendrianPolyline(std::vector<CurveSample> samples);

  static LegendrianPolyline from_points(std::span<const HeisPoint> points,
                                        double param0 = 0.0, double dparam = 1.0);

  std::span<const CurveSample> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double horizontality_residual() const noexcept { return residual_; }

  const HeisPoint& front() const { return samples_.front().point; }
  const HeisPoint& back() const { return samples_.back().point; }

  // Pointwise image; the residual is recomputed.
  LegendrianPolyline mapped(const std::function<HeisPoint(const HeisPoint&)>& f) const;

 private:
  std::vector<CurveSample> samples_;
  double residual_ = 0.0;
};

// Throws NonLegendrian when the residual exceeds tol.
double curve_length(const LegendrianPolyline& c, const MetricK& m = MetricK{},
                    double tol = kDefaultHorizontalityTol);

std::vector<double> segment_lengths(const LegendrianPolyline& c, const MetricK& m = MetricK{},
                                    double tol = kDefaultHorizontalityTol);

// Piecewise-constant scalar field on a regular box grid in (x, y, t).
class SampledField {
 public:
  SampledField(HeisPoint lo, HeisPoint hi, std::array<int, 3> dims,
               std::vector<double> values);

  static SampledField constant(HeisPoint lo, HeisPoint hi, double value);

  const HeisPoint& lo() const noexcept { return lo_; }
  const HeisPoint& hi() const noexcept { return hi_; }
  const std::array<int, 3>& dims() const noexcept { return dims_; }
  std::span<const double> values() const noexcept { return values_; }

  // Continuous cell-index coordinates of p.
  std::array<double, 3> index_coords(const HeisPoint& p) const noexcept;
  double value(std::size_t cell) const { return values_.at(cell); }

 private:
  HeisPoint lo_, hi_;
  std::array<int, 3> dims_;
  std::vector<double> values_;
};

// Sum over segments of (segment length) x (field), with segments split at
// grid faces by linear interpolation in coordinates. Throws OutOfDomain when
// any part of the curve leaves the field's box.
double line_integral(const LegendrianPolyline& c, const SampledField& sigma,
                     const MetricK& m = MetricK{}, double tol = kDefaultHorizontalityTol);

struct GridPiece {
  double lam_begin;
  double lam_end;
  std::array<int, 3> cell;
};

// Walks c(lam) = c0 + lam (c1 - c0) in cell-index coordinates, starting at
// lam_begin, through the box [0, dims). Pieces are cut at integer planes and
// classified by their midpoint. Stops at the first piece whose midpoint lies
// outside the box; returns the lam where the walk stopped (1 when it reached
// the end).
double walk_grid(const std::array<double, 3>& c0, const std::array<double, 3>& c1,
                 double lam_begin, const std::array<int, 3>& dims,
                 const std::function<void(const GridPiece&)>& visit);

}  // namespace crmod
