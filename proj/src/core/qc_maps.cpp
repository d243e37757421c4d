// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "qc_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace crmod {

Mat2 Mat2::rotation(double angle) noexcept {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c, -s, s, c};
}

double det3(const Mat3& m) noexcept {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

namespace {

Mat3 diag3(double a, double b, double c) { return {a, 0, 0, 0, b, 0, 0, 0, c}; }

TangentVector apply(const Mat3& j, const TangentVector& v, const HeisPoint& image) {
  return {image, j[0] * v.dx + j[1] * v.dy + j[2] * v.dt, j[3] * v.dx + j[4] * v.dy + j[5] * v.dt,
          j[6] * v.dx + j[7] * v.dy + j[8] * v.dt};
}

// Frame coefficients and eta-component of a coordinate vector.
struct Split {
  double a, b, eta;
};

Split split(const TangentVector& v) {
  // aX + bY has dx = a, dy = b; the rest of dt is the transverse part.
  return {v.dx, v.dy, eta(v)};
}

}  // namespace

ContactMap identity_map(const MetricK& target) {
  ContactMap f;
  f.name = "identity";
  f.forward = [](const HeisPoint& p) { return p; };
  f.jacobian = [](const HeisPoint&) { return diag3(1, 1, 1); };
  f.target = target;
  f.lattice_equivariant = true;
  return f;
}

ContactMap extremal_map(double K) {
  ContactMap f = identity_map(MetricK(K));
  f.name = "f0";
  return f;
}

ContactMap t_translation(double s, const MetricK& target) {
  ContactMap f;
  f.name = "t-translation";
  f.forward = [s](const HeisPoint& p) { return HeisPoint{p.x, p.y, p.t + s}; };
  f.jacobian = [](const HeisPoint&) { return diag3(1, 1, 1); };
  f.target = target;
  f.lattice_equivariant = true;
  return f;
}

ContactMap flow_x_map(double s) {
  ContactMap f;
  f.name = "flow-x";
  f.forward = [s](const HeisPoint& p) { return flow_X(p, s); };
  f.jacobian = [s](const HeisPoint&) { return Mat3{1, 0, 0, 0, 1, 0, 0, 2 * s, 1}; };
  f.lattice_equivariant = true;
  return f;
}

ContactMap dilation_map(double r) {
  require(r > 0.0, "dilation_map: factor must be positive");
  ContactMap f;
  f.name = "dilation";
  f.forward = [r](const HeisPoint& p) { return dilate(p, r); };
  f.jacobian = [r](const HeisPoint&) { return diag3(r, r, r * r); };
  return f;
}

ContactMap stretch_t_map() {
  ContactMap f;
  f.name = "stretch-t";
  f.forward = [](const HeisPoint& p) { return HeisPoint{p.x, p.y, 2.0 * p.t}; };
  f.jacobian = [](const HeisPoint&) { return diag3(1, 1, 2); };
  return f;
}

ContactMap affine_map(std::span<const double, 12> coeffs) {
  Mat3 a{};
  std::copy_n(coeffs.begin(), 9, a.begin());
  const HeisPoint b{coeffs[9], coeffs[10], coeffs[11]};
  for (double c : coeffs) require(std::isfinite(c), "affine_map: non-finite coefficient");
  ContactMap f;
  f.name = "affine";
  f.forward = [a, b](const HeisPoint& p) {
    return HeisPoint{a[0] * p.x + a[1] * p.y + a[2] * p.t + b.x,
                     a[3] * p.x + a[4] * p.y + a[5] * p.t + b.y,
                     a[6] * p.x + a[7] * p.y + a[8] * p.t + b.t};
  };
  f.jacobian = [a](const HeisPoint&) { return a; };
  return f;
}

Mat3 coordinate_jacobian_fd(const std::function<HeisPoint(const HeisPoint&)>& f,
                            const HeisPoint& q, double h) {
  Mat3 j{};
  auto column = [&](int axis, double step) {
    HeisPoint lo = q, hi = q;
    (axis == 0 ? hi.x : axis == 1 ? hi.y : hi.t) += step;
    (axis == 0 ? lo.x : axis == 1 ? lo.y : lo.t) -= step;
    const HeisPoint a = f(hi), b = f(lo);
    return std::array<double, 3>{(a.x - b.x) / (2 * step), (a.y - b.y) / (2 * step),
                                 (a.t - b.t) / (2 * step)};
  };
  for (int axis = 0; axis < 3; ++axis) {
    const auto coarse = column(axis, h);
    const auto fine = column(axis, 0.5 * h);
    for (int r = 0; r < 3; ++r) j[3 * r + axis] = (4.0 * fine[r] - coarse[r]) / 3.0;
  }
  return j;
}

namespace {

// Derivative of s -> f(q exp(sE)) pulled back to the origin by the left
// translation through f(q)^{-1}; central differences plus Richardson.
Split frame_derivative_fd(const ContactMap& f, const HeisPoint& q, const HeisPoint& dir) {
  const HeisPoint fq = f.forward(q);
  auto central = [&](double h) {
    const HeisPoint up = relative(fq, f.forward(group_mul(q, {h * dir.x, h * dir.y, 0.0})));
    const HeisPoint dn = relative(fq, f.forward(group_mul(q, {-h * dir.x, -h * dir.y, 0.0})));
    return HeisPoint{(up.x - dn.x) / (2 * h), (up.y - dn.y) / (2 * h), (up.t - dn.t) / (2 * h)};
  };
  const HeisPoint c = central(f.fd_step);
  const HeisPoint r = central(0.5 * f.fd_step);
  const HeisPoint d{(4 * r.x - c.x) / 3, (4 * r.y - c.y) / 3, (4 * r.t - c.t) / 3};
  return {d.x, d.y, 0.25 * d.t};
}

double residual(const Split& s) {
  const double h = std::hypot(s.a, s.b);
  if (h == 0.0) return s.eta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(s.eta) / h;
}

}  // namespace

DifferentialProbe probe_differential(const ContactMap& f, const HeisPoint& q,
                                     bool prefer_analytic) {
  require(static_cast<bool>(f.forward), "probe_differential: map has no forward function");
  Split sx{}, sy{};
  DifferentialProbe out;
  if (prefer_analytic && f.jacobian) {
    const Mat3 j = f.jacobian(q);
    const HeisPoint fq = f.forward(q);
    const Frame fr = frame_at(q);
    sx = split(apply(j, fr.X, fq));
    sy = split(apply(j, fr.Y, fq));
    out.analytic = true;
  } else {
    require(f.fd_step > 0.0, "probe_differential: fd_step must be positive");
    sx = frame_derivative_fd(f, q, {1.0, 0.0, 0.0});
    sy = frame_derivative_fd(f, q, {0.0, 1.0, 0.0});
  }
  out.matrix = {sx.a, sy.a, sx.b, sy.b};
  const double scale = std::max(std::hypot(sx.a, sx.b), std::hypot(sy.a, sy.b));
  out.contact_residual =
      scale == 0.0 ? residual(sx) : std::max(std::abs(sx.eta), std::abs(sy.eta)) / scale;
  return out;
}

Mat2 horizontal_differential(const ContactMap& f, const HeisPoint& q, double tol,
                             bool prefer_analytic) {
  const DifferentialProbe p = probe_differential(f, q, prefer_analytic);
  if (!(p.contact_residual <= tol))
    fail(ErrorCode::NotContact, "map '" + f.name + "' is not contact at the sample point: "
                                "eta residual " + std::to_string(p.contact_residual));
  return p.matrix;
}

namespace {

Mat2 target_scaled(const Mat2& M, const MetricK& target) {
  const double s = target.sqrt_k();
  return {s * M.a11, s * M.a12, M.a21 / s, M.a22 / s};
}

}  // namespace

DilatationReport dilatation(const Mat2& M, const MetricK& target) {
  const Mat2 N = target_scaled(M, target);
  const double g11 = N.a11 * N.a11 + N.a21 * N.a21;
  const double g12 = N.a11 * N.a12 + N.a21 * N.a22;
  const double g22 = N.a12 * N.a12 + N.a22 * N.a22;
  const double s1 = std::sqrt(0.5 * (g11 + g22 + std::hypot(g11 - g22, 2.0 * g12)));
  const double det = N.det();
  if (s1 == 0.0 || det == 0.0 || !std::isfinite(det))
    fail(ErrorCode::Degenerate, "dilatation: horizontal differential is singular");
  const double s2 = std::abs(det) / s1;
  DilatationReport r;
  r.lambda1 = s1;
  r.lambda2 = s2;
  r.K_at_q = s1 / s2;
  r.jacobian = (s1 * s2) * (s1 * s2);
  if (det > 0.0) r.mu = beltrami(M, target);
  return r;
}

std::complex<double> beltrami(const Mat2& M, const MetricK& target) {
  const Mat2 N = target_scaled(M, target);
  const double det = N.det();
  if (det == 0.0) fail(ErrorCode::Degenerate, "beltrami: singular differential");
  if (det < 0.0)
    fail(ErrorCode::OrientationReversed, "beltrami: differential reverses orientation");
  const std::complex<double> alpha(0.5 * (N.a11 + N.a22), 0.5 * (N.a21 - N.a12));
  const std::complex<double> beta(0.5 * (N.a11 - N.a22), 0.5 * (N.a21 + N.a12));
  return beta / alpha;
}

double contact_factor(const ContactMap& f, const HeisPoint& q, double tol) {
  const DifferentialProbe probe = probe_differential(f, q);
  if (!(probe.contact_residual <= kDefaultContactTol))
    fail(ErrorCode::NotContact, "contact_factor: map '" + f.name + "' is not contact at q");
  const HeisPoint fq = f.forward(q);
  TangentVector image{};
  if (f.jacobian) {
    image = apply(f.jacobian(q), {q, 0.0, 0.0, 1.0}, fq);
  } else {
    const Mat3 j = coordinate_jacobian_fd(f.forward, q, f.fd_step);
    image = apply(j, {q, 0.0, 0.0, 1.0}, fq);
  }
  // eta(d/dt) = 1/4 at every point.
  const double lambda = 4.0 * eta(image);
  const double product = std::abs(probe.matrix.det());
  if (std::abs(std::abs(lambda) - product) > tol * std::max(1.0, product))
    fail(ErrorCode::NotContact, "contact_factor: |lambda| = " + std::to_string(std::abs(lambda)) +
                                    " disagrees with lambda1*lambda2 = " + std::to_string(product));
  return lambda;
}

LegendrianPolyline push_curve(const ContactMap& f, const LegendrianPolyline& c) {
  return c.mapped(f.forward);
}

}  // namespace crmod
