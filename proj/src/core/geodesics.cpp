// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "geodesics.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace crmod {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin(theta/2) evaluated through the nearer of 0 and 2pi for accuracy.
double half_sin(double theta) {
  return theta > kPi ? std::sin(kPi - 0.5 * theta) : std::sin(0.5 * theta);
}

double theta_minus_sin(double theta) {
  if (theta < 1e-3) {
    const double t2 = theta * theta;
    return theta * t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0));
  }
  return theta - std::sin(theta);
}

double arc_area_derivative(double theta) {
  const double s = half_sin(theta);
  return 0.25 - theta_minus_sin(theta) * std::cos(0.5 * theta) / (8.0 * s * s * s);
}

}  // namespace

double arc_area_unit_chord(double theta) {
  require(theta > 0.0 && theta < kTwoPi, "arc_area_unit_chord: theta outside (0, 2pi)");
  const double s = half_sin(theta);
  return theta_minus_sin(theta) / (8.0 * s * s);
}

double solve_turning_angle(double rho, double area) {
  require(rho > 0.0 && area > 0.0, "solve_turning_angle: rho and area must be positive");
  const double target = area / (rho * rho);

  double lo = 0.0;
  double hi = kTwoPi;
  // f(0+) = 0 < target; check the upper end of the bracket explicitly.
  const double hi_probe = std::nextafter(kTwoPi, 0.0);
  if (!(arc_area_unit_chord(hi_probe) > target)) return hi_probe;

  for (int it = 0; it < 200 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (arc_area_unit_chord(mid) < target) lo = mid;
    else hi = mid;
  }
  double theta = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double f = arc_area_unit_chord(theta) - target;
    if (f < 0.0) lo = theta;
    else hi = theta;
    double next = theta - f / arc_area_derivative(theta);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - theta);
    theta = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * theta || hi - lo < 1e-15) break;
  }
  return theta;
}

double cc_distance(const HeisPoint& p, const HeisPoint& q) {
  const HeisPoint d = relative(p, q);
  const double rho = std::hypot(d.x, d.y);
  const double area = 0.25 * std::abs(d.t);
  if (area == 0.0) return rho;
  if (rho == 0.0) return std::sqrt(kPi * std::abs(d.t));
  const double theta = solve_turning_angle(rho, area);
  return rho * theta / (2.0 * half_sin(theta));
}

HeisPoint scaled_isometry(const MetricK& m, const HeisPoint& p) {
  return {m.sqrt_k() * p.x, p.y / m.sqrt_k(), p.t};
}

double cc_distance_scaled(const MetricK& m, const HeisPoint& p, const HeisPoint& q) {
  return cc_distance(scaled_isometry(m, p), scaled_isometry(m, q));
}

namespace {

struct Arc {
  double cx, cy, radius, phi0, dphi;

  HeisPoint at(double frac) const {
    const double phi = phi0 + frac * dphi;
    // t accumulated along the lift t' = 2y x' - 2x y'.
    auto prim = [&](double f) {
      return 2.0 * (radius * cy * std::cos(f) - radius * cx * std::sin(f) - radius * radius * f);
    };
    return {cx + radius * std::cos(phi), cy + radius * std::sin(phi), prim(phi) - prim(phi0)};
  }
};

}  // namespace

GeodesicSolution geodesic(const HeisPoint& p, const HeisPoint& q, int n) {
  require(n >= 2, "geodesic: need at least two samples");
  const HeisPoint d = relative(p, q);
  const double rho = std::hypot(d.x, d.y);
  const double area = 0.25 * std::abs(d.t);

  std::vector<HeisPoint> pts(static_cast<std::size_t>(n));
  GeodesicSolution sol;
  const double inv = 1.0 / (n - 1);

  if (area == 0.0) {
    for (int i = 0; i < n; ++i) pts[i] = {d.x * i * inv, d.y * i * inv, 0.0};
    sol.length = rho;
    sol.turning_angle = 0.0;
  } else {
    Arc arc{};
    if (rho == 0.0) {
      const double r = std::sqrt(std::abs(d.t) / (4.0 * kPi));
      arc = {r, 0.0, r, kPi, d.t > 0.0 ? -kTwoPi : kTwoPi};
      sol.length = kTwoPi * r;
    } else {
      const double theta = solve_turning_angle(rho, area);
      const double r = rho / (2.0 * half_sin(theta));
      const double ux = d.x / rho, uy = d.y / rho;
      const double h = r * std::cos(0.5 * theta);
      double best_err = std::numeric_limits<double>::infinity();
      for (double side : {1.0, -1.0}) {
        const double cx = 0.5 * d.x - side * h * uy;
        const double cy = 0.5 * d.y + side * h * ux;
        const double phi0 = std::atan2(-cy, -cx);
        const double phi1 = std::atan2(d.y - cy, d.x - cx);
        double ccw = std::fmod(phi1 - phi0, kTwoPi);
        if (ccw < 0.0) ccw += kTwoPi;
        // Of the two arcs about this center, take the one spanning theta.
        const double dphi = std::abs(ccw - theta) <= std::abs(kTwoPi - ccw - theta) ? theta : -theta;
        const Arc cand{cx, cy, r, phi0, dphi};
        const double err = std::abs(cand.at(1.0).t - d.t);
        if (err < best_err) {
          best_err = err;
          arc = cand;
        }
      }
      sol.length = rho * theta / (2.0 * half_sin(theta));
    }
    for (int i = 0; i < n; ++i) pts[i] = arc.at(i * inv);
    pts.front() = kOrigin;
    sol.turning_angle = arc.dphi;
  }

  for (auto& pt : pts) pt = group_mul(p, pt);
  sol.path = LegendrianPolyline::from_points(pts, 0.0, sol.length > 0.0 ? sol.length * inv : inv);
  return sol;
}

namespace {

struct Vec2 {
  double x, y;
};

double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// t-coordinate reached from the origin by the planar increments v_i.
double lift_t(const std::vector<Vec2>& v) {
  double t = 0.0, sx = 0.0, sy = 0.0;
  for (const auto& e : v) {
    t -= 2.0 * cross({sx, sy}, e);
    sx += e.x;
    sy += e.y;
  }
  return t;
}

// Bilinear part: t(v + r c) = t(v) + r * lift_cross(v, c) + r^2 t(c).
double lift_cross(const std::vector<Vec2>& v, const std::vector<Vec2>& c) {
  double b = 0.0, vx = 0.0, vy = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    b -= 2.0 * (cross({vx, vy}, c[i]) + cross({cx, cy}, v[i]));
    vx += v[i].x;
    vy += v[i].y;
    cx += c[i].x;
    cy += c[i].y;
  }
  return b;
}

class PathModel {
 public:
  PathModel(const HeisPoint& target, int steps) : target_(target), n_(steps) {
    ccw_.resize(n_);
    cw_.resize(n_);
    const double edge = kTwoPi / n_;
    for (int i = 0; i < n_; ++i) {
      const double a = kTwoPi * (i + 0.5) / n_;
      ccw_[i] = {-std::sin(a) * edge, std::cos(a) * edge};
      cw_[i] = {ccw_[i].x, -ccw_[i].y};
    }
    q_ccw_ = lift_t(ccw_);
    q_cw_ = lift_t(cw_);
  }

  // Maps free parameters to increments meeting the endpoint exactly.
  // Returns false if no real correction exists.
  bool increments(const std::vector<double>& w, std::vector<Vec2>& v) const {
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n_; ++i) {
      mx += w[2 * i];
      my += w[2 * i + 1];
    }
    mx /= n_;
    my /= n_;
    v.resize(n_);
    for (int i = 0; i < n_; ++i)
      v[i] = {w[2 * i] - mx + target_.x / n_, w[2 * i + 1] - my + target_.y / n_};

    const double miss = lift_t(v) - target_.t;
    if (miss == 0.0) return true;
    double best_r = std::numeric_limits<double>::infinity();
    const std::vector<Vec2>* best_mode = nullptr;
    for (const auto* mode : {&ccw_, &cw_}) {
      const double qa = mode == &ccw_ ? q_ccw_ : q_cw_;
      const double b = lift_cross(v, *mode);
      const double disc = b * b - 4.0 * qa * miss;
      if (disc < 0.0) continue;
      const double sq = std::sqrt(disc);
      // Stable small root of qa r^2 + b r + miss = 0.
      const double big = -0.5 * (b + std::copysign(sq, b));
      const double r = big != 0.0 ? miss / big : 0.0;
      if (std::abs(r) < std::abs(best_r)) {
        best_r = r;
        best_mode = mode;
      }
    }
    if (!best_mode) return false;
    for (int i = 0; i < n_; ++i) {
      v[i].x += best_r * (*best_mode)[i].x;
      v[i].y += best_r * (*best_mode)[i].y;
    }
    return true;
  }

  double length(const std::vector<double>& w, std::vector<Vec2>& scratch) const {
    if (!increments(w, scratch)) return std::numeric_limits<double>::infinity();
    double len = 0.0;
    for (const auto& e : scratch) len += std::hypot(e.x, e.y);
    return len;
  }

  double endpoint_error(const std::vector<Vec2>& v) const {
    HeisPoint p{};
    for (const auto& e : v) p = group_mul(p, {e.x, e.y, 0.0});
    return std::max({std::abs(p.x - target_.x), std::abs(p.y - target_.y),
                     std::abs(p.t - target_.t)});
  }

 private:
  HeisPoint target_;
  int n_;
  std::vector<Vec2> ccw_, cw_;
  double q_ccw_ = 0.0, q_cw_ = 0.0;
};

}  // namespace

OracleResult brute_force_search(const HeisPoint& p, const HeisPoint& q,
                                const OracleBudget& budget) {
  require(budget.steps >= 3 && budget.restarts >= 0 && budget.max_sweeps > 0,
          "brute_force_search: invalid budget");
  const HeisPoint d = relative(p, q);
  if (d.x == 0.0 && d.y == 0.0 && d.t == 0.0) return {0.0, 0.0, 0};

  const int n = budget.steps;
  const PathModel model(d, n);
  const double scale = (std::hypot(d.x, d.y) + std::sqrt(std::abs(d.t))) / n;
  std::mt19937_64 rng(budget.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  OracleResult best{std::numeric_limits<double>::infinity(), 0.0, 0};
  std::vector<Vec2> scratch;
  std::vector<double> w(2 * static_cast<std::size_t>(n));

  for (int start = 0; start <= budget.restarts; ++start) {
    for (auto& wi : w) wi = start == 0 ? 0.0 : gauss(rng) * scale;
    std::vector<double> step(w.size(), budget.initial_step * scale);
    double cur = model.length(w, scratch);
    int sweeps = 0;
    for (; sweeps < budget.max_sweeps; ++sweeps) {
      bool improved = false;
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (step[k] < budget.min_step * scale) continue;
        const double keep = w[k];
        bool moved = false;
        for (double dir : {1.0, -1.0}) {
          w[k] = keep + dir * step[k];
          const double trial = model.length(w, scratch);
          if (trial < cur) {
            cur = trial;
            moved = true;
            break;
          }
        }
        if (moved) {
          step[k] *= 1.6;
          improved = true;
        } else {
          w[k] = keep;
          step[k] *= 0.5;
        }
      }
      if (!improved && *std::max_element(step.begin(), step.end()) < budget.min_step * scale)
        break;
    }
    if (cur < best.length) {
      model.increments(w, scratch);
      best = {cur, model.endpoint_error(scratch), sweeps};
    }
  }

  if (!std::isfinite(best.length) || best.endpoint_error > budget.endpoint_tol)
    fail(ErrorCode::BudgetExhausted,
         "brute_force_search: endpoint error " + std::to_string(best.endpoint_error) +
             " above tolerance");
  return best;
}

}  // namespace crmod
