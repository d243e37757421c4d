// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "heis.hpp"

namespace crmod {

// 2x2 matrix acting on frame coefficients (a, b) of aX + bY.
struct Mat2 {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  static constexpr Mat2 identity() noexcept { return {}; }
  static Mat2 rotation(double angle) noexcept;
  constexpr double det() const noexcept { return a11 * a22 - a12 * a21; }

  friend constexpr Mat2 operator*(const Mat2& l, const Mat2& r) noexcept {
    return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
            l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
  }
};

// Row-major coordinate Jacobian d(f)/d(x, y, t).
using Mat3 = std::array<double, 9>;

double det3(const Mat3& m) noexcept;

// A smooth self-map of H^3 (or of the quotient when lattice_equivariant),
// with optional analytic derivatives and the CR metric it is measured against.
struct ContactMap {
  std::string name;
  std::function<HeisPoint(const HeisPoint&)> forward;
  // Analytic coordinate Jacobian; finite differences are used when empty.
  std::function<Mat3(const HeisPoint&)> jacobian;
  double fd_step = 1e-4;
  MetricK target;
  // Commutes with the lattice action, so it descends to the quotient.
  bool lattice_equivariant = false;
};

ContactMap identity_map(const MetricK& target = MetricK{});
// The identity viewed as a map into the K-stretched structure.
ContactMap extremal_map(double K);
ContactMap t_translation(double s, const MetricK& target = MetricK{});
// Right translation by (s, 0, 0), i.e. the time-s flow of X. Not contact for s != 0.
ContactMap flow_x_map(double s);
ContactMap dilation_map(double r);
// (x, y, t) -> (x, y, 2t); not contact.
ContactMap stretch_t_map();
// p -> A p + b with A row-major in coeffs[0..8] and b in coeffs[9..11].
ContactMap affine_map(std::span<const double, 12> coeffs);

inline constexpr double kDefaultContactTol = 1e-6;

struct DifferentialProbe {
  Mat2 matrix;                    // columns: images of X and Y in the target frame
  double contact_residual = 0.0;  // max |eta(f_* E)| / |horizontal part|
  bool analytic = false;
};

// No contact check; used to inspect non-contact maps.
DifferentialProbe probe_differential(const ContactMap& f, const HeisPoint& q,
                                     bool prefer_analytic = true);

// Throws NotContact when the contact residual exceeds tol.
Mat2 horizontal_differential(const ContactMap& f, const HeisPoint& q,
                             double tol = kDefaultContactTol, bool prefer_analytic = true);

// Central differences with one Richardson step, step h.
Mat3 coordinate_jacobian_fd(const std::function<HeisPoint(const HeisPoint&)>& f,
                            const HeisPoint& q, double h);

struct DilatationReport {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double K_at_q = 1.0;
  std::optional<std::complex<double>> mu;  // empty for orientation-reversing M
  double jacobian = 1.0;
};

// Singular values of diag(sqrt K, 1/sqrt K) * M. Throws Degenerate if singular.
DilatationReport dilatation(const Mat2& M, const MetricK& target);

// mu = beta / alpha for D M written as z -> alpha z + beta conj(z).
// Throws OrientationReversed when det M < 0 and Degenerate when det M = 0.
std::complex<double> beltrami(const Mat2& M, const MetricK& target);

// lambda with f^* eta = lambda eta at q. Throws NotContact if f is not contact
// at q or if |lambda| disagrees with lambda1 * lambda2 (Levi metric) beyond tol.
double contact_factor(const ContactMap& f, const HeisPoint& q, double tol = 1e-5);

LegendrianPolyline push_curve(const ContactMap& f, const LegendrianPolyline& c);

}  // namespace crmod
