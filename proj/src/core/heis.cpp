// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "heis.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace crmod {

HeisPoint dilate(const HeisPoint& p, double r) {
  require(r > 0.0 && std::isfinite(r), "dilate: factor must be positive");
  return {r * p.x, r * p.y, r * r * p.t};
}

MetricK::MetricK(double K) : K_(K), sqrt_k_(std::sqrt(K)) {
  require(std::isfinite(K) && K >= 1.0, "MetricK: K must be finite and >= 1");
}

SegmentChord segment_chord(const HeisPoint& from, const HeisPoint& to) noexcept {
  const HeisPoint d = relative(from, to);
  // Frame at the origin is {d/dx, d/dy} and eta there is dt/4.
  return {d.x, d.y, 0.25 * d.t};
}

namespace {

double residual_of(std::span<const CurveSample> s) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const SegmentChord c = segment_chord(s[i].point, s[i + 1].point);
    const double h = std::hypot(c.a, c.b);
    if (h == 0.0) {
      if (c.eta_component != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, std::abs(c.eta_component) / h);
  }
  return worst;
}

}  // namespace

LegendrianPolyline::LegendrianPolyline(std::vector<CurveSample> samples)
    : samples_(std::move(samples)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    require(samples_[i].point.finite() && std::isfinite(samples_[i].param),
            "LegendrianPolyline: non-finite sample " + std::to_string(i));
    if (i > 0)
      require(samples_[i].param > samples_[i - 1].param,
              "LegendrianPolyline: params must be strictly increasing");
  }
  residual_ = residual_of(samples_);
}

LegendrianPolyline LegendrianPolyline::from_points(std::span<const HeisPoint> points,
                                                   double param0, double dparam) {
  std::vector<CurveSample> s;
  s.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    s.push_back({param0 + dparam * static_cast<double>(i), points[i]});
  return LegendrianPolyline(std::move(s));
}

LegendrianPolyline LegendrianPolyline::mapped(
    const std::function<HeisPoint(const HeisPoint&)>& f) const {
  std::vector<CurveSample> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back({s.param, f(s.point)});
  return LegendrianPolyline(std::move(out));
}

std::vector<double> segment_lengths(const LegendrianPolyline& c, const MetricK& m,
                                    double tol) {
  if (c.horizontality_residual() > tol)
    fail(ErrorCode::NonLegendrian,
         "curve is not Legendrian: horizontality residual " +
             std::to_string(c.horizontality_residual()) + " exceeds " + std::to_string(tol));
  const auto s = c.samples();
  std::vector<double> out;
  if (s.size() < 2) return out;
  out.reserve(s.size() - 1);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const SegmentChord ch = segment_chord(s[i].point, s[i + 1].point);
    out.push_back(m.norm(ch.a, ch.b));
  }
  return out;
}

double curve_length(const LegendrianPolyline& c, const MetricK& m, double tol) {
  double total = 0.0;
  for (double l : segment_lengths(c, m, tol)) total += l;
  return total;
}

SampledField::SampledField(HeisPoint lo, HeisPoint hi, std::array<int, 3> dims,
                           std::vector<double> values)
    : lo_(lo), hi_(hi), dims_(dims), values_(std::move(values)) {
  require(dims[0] > 0 && dims[1] > 0 && dims[2] > 0, "SampledField: dims must be positive");
  require(hi.x > lo.x && hi.y > lo.y && hi.t > lo.t, "SampledField: empty box");
  require(values_.size() == static_cast<std::size_t>(dims[0]) * dims[1] * dims[2],
          "SampledField: value count does not match dims");
}

SampledField SampledField::constant(HeisPoint lo, HeisPoint hi, double value) {
  return SampledField(lo, hi, {1, 1, 1}, {value});
}

std::array<double, 3> SampledField::index_coords(const HeisPoint& p) const noexcept {
  return {(p.x - lo_.x) / (hi_.x - lo_.x) * dims_[0],
          (p.y - lo_.y) / (hi_.y - lo_.y) * dims_[1],
          (p.t - lo_.t) / (hi_.t - lo_.t) * dims_[2]};
}

double walk_grid(const std::array<double, 3>& c0, const std::array<double, 3>& c1,
                 double lam_begin, const std::array<int, 3>& dims,
                 const std::function<void(const GridPiece&)>& visit) {
  std::vector<double> breaks{lam_begin, 1.0};
  for (int ax = 0; ax < 3; ++ax) {
    const double d = c1[ax] - c0[ax];
    if (d == 0.0) continue;
    for (int k = 0; k <= dims[ax]; ++k) {
      const double lam = (k - c0[ax]) / d;
      if (lam > lam_begin && lam < 1.0) breaks.push_back(lam);
    }
  }
  std::sort(breaks.begin(), breaks.end());

  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b);
    std::array<int, 3> cell{};
    for (int ax = 0; ax < 3; ++ax) {
      const double c = c0[ax] + mid * (c1[ax] - c0[ax]);
      const double f = std::floor(c);
      if (f < 0.0 || f >= dims[ax]) return a;
      cell[ax] = static_cast<int>(f);
    }
    visit({a, b, cell});
  }
  return 1.0;
}

double line_integral(const LegendrianPolyline& c, const SampledField& sigma, const MetricK& m,
                     double tol) {
  const auto lengths = segment_lengths(c, m, tol);
  const auto s = c.samples();
  const auto& dims = sigma.dims();
  double total = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const auto c0 = sigma.index_coords(s[i].point);
    const auto c1 = sigma.index_coords(s[i + 1].point);
    const double stop = walk_grid(c0, c1, 0.0, dims, [&](const GridPiece& piece) {
      const std::size_t cell =
          (static_cast<std::size_t>(piece.cell[0]) * dims[1] + piece.cell[1]) * dims[2] +
          piece.cell[2];
      total += (piece.lam_end - piece.lam_begin) * lengths[i] * sigma.value(cell);
    });
    if (stop < 1.0)
      fail(ErrorCode::OutOfDomain,
           "line_integral: segment " + std::to_string(i) + " leaves the field's domain");
  }
  return total;
}

}  // namespace crmod
