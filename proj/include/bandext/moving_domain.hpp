// Rigidly moving object in [-1, 1]^2 and an analytic diffusion solution, used
// to measure extrapolation error at nodes uncovered by the moving boundary.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "bandext/extrapolation.hpp"
#include "bandext/geometry.hpp"
#include "bandext/grid.hpp"
#include "bandext/stencils.hpp"

namespace bandext {

/// Translation from start to end over t in [0, 1] with rotation angle
/// angular_rate * t (half a turn by default).
struct RigidMotion {
  Point<2> start{-0.51, 0.52};
  Point<2> end{0.49, -0.48};
  double angular_rate = std::numbers::pi;

  Point<2> center(double t) const {
    return {start[0] + t * (end[0] - start[0]), start[1] + t * (end[1] - start[1])};
  }
};

/// Global-to-local coordinates: xi = R(t) (r - c(t)) with
/// R = [[cos, sin], [-sin, cos]] of angle angular_rate * t.
inline Point<2> local_coords(const RigidMotion& motion, double t, const Point<2>& r) {
  const Point<2> c = motion.center(t);
  const double dx = r[0] - c[0], dy = r[1] - c[1];
  const double th = motion.angular_rate * t;
  const double cs = std::cos(th), sn = std::sin(th);
  return {cs * dx + sn * dy, -sn * dx + cs * dy};
}

/// Disk of radius r0 in local coordinates; positive inside.
struct SmoothObject {
  double r0 = 0.25;
  double operator()(const Point<2>& xi) const { return r0 - std::hypot(xi[0], xi[1]); }
};

/// Union of two disks (radii r0 and r0*q) centered at (-+xi0, 0), with
/// xi0 = r0 sqrt(1 + q^2) / 2. Positive inside.
struct TwoDiskObject {
  double r0 = 0.25;
  double q = 0.7;

  double xi0() const { return 0.5 * r0 * std::sqrt(1.0 + q * q); }
  double operator()(const Point<2>& xi) const {
    const double s = xi0();
    return std::max(r0 - std::hypot(xi[0] + s, xi[1]), r0 * q - std::hypot(xi[0] - s, xi[1]));
  }
  /// The two points where the disk boundaries cross (local coordinates).
  std::array<Point<2>, 2> kink_points() const {
    const double s = xi0();
    const double x = r0 * r0 * (1.0 - q * q) / (4.0 * s);
    const double y = std::sqrt(r0 * r0 - (x + s) * (x + s));
    return {Point<2>{x, y}, Point<2>{x, -y}};
  }
};

struct MovingShape {
  std::variant<SmoothObject, TwoDiskObject> base = SmoothObject{};
  RigidMotion motion{};

  /// Object level set in local coordinates (positive inside the object).
  double object(const Point<2>& xi) const {
    return std::visit([&](const auto& b) { return b(xi); }, base);
  }
  /// Solution-domain level set: positive inside the object, the solution
  /// domain is where it is negative.
  double phi_domain(double t, const Point<2>& r) const { return object(local_coords(motion, t, r)); }

  ScalarField<2> sample_phi(double t, const GridSpec<2>& g) const {
    return sample(g, [&](const Point<2>& r) { return phi_domain(t, r); });
  }
};

/// Cosine-series solution of u_t = D lap(u) on [-1, 1]^2 with homogeneous
/// Neumann conditions on the box.
struct TestSolution {
  std::array<std::array<double, 4>, 4> a{{{-0.5, -0.1, -0.5, 0.6},
                                          {-0.6, -0.5, -0.1, -0.1},
                                          {0.2, -0.2, -0.2, 0.4},
                                          {0.1, -0.9, 0.8, 0.4}}};
  double diffusivity = 1.0;
};

inline double eval_test_solution(const TestSolution& sol, double t, const Point<2>& r) {
  constexpr double half_pi = 0.5 * std::numbers::pi;
  double u = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double cx = std::cos(i * half_pi * (r[0] + 1.0));
    for (int j = 0; j < 4; ++j) {
      const double cy = std::cos(j * half_pi * (r[1] + 1.0));
      const double decay = std::exp(-sol.diffusivity * half_pi * half_pi * (i * i + j * j) * t);
      u += sol.a[i][j] * cx * cy * decay;
    }
  }
  return u;
}

/// Analytic gradient of the test solution.
inline Point<2> eval_test_gradient(const TestSolution& sol, double t, const Point<2>& r) {
  constexpr double half_pi = 0.5 * std::numbers::pi;
  Point<2> g{0.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    const double ax = i * half_pi * (r[0] + 1.0);
    for (int j = 0; j < 4; ++j) {
      const double ay = j * half_pi * (r[1] + 1.0);
      const double decay = std::exp(-sol.diffusivity * half_pi * half_pi * (i * i + j * j) * t);
      g[0] += -sol.a[i][j] * i * half_pi * std::sin(ax) * std::cos(ay) * decay;
      g[1] += -sol.a[i][j] * j * half_pi * std::cos(ax) * std::sin(ay) * decay;
    }
  }
  return g;
}

/// max |v_n| = |d(phi)/dt| / |grad(phi)| over nodes whose solution-domain
/// level set changes sign with an axis neighbor. The time derivative is a
/// centered difference with step 1e-6.
inline double normal_speed_max(const MovingShape& shape, double t, const GridSpec<2>& g) {
  constexpr double dt = 1e-6;
  const ScalarField<2> phi = shape.sample_phi(t, g);
  double vmax = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.unflat(k);
    const bool inside = phi[k] > 0.0;
    bool adjacent = false;
    for (int a = 0; a < 2 && !adjacent; ++a) {
      const std::size_t s = g.stride(a);
      if (idx[a] > 0 && (phi[k - s] > 0.0) != inside) adjacent = true;
      if (idx[a] + 1 < g.n(a) && (phi[k + s] > 0.0) != inside) adjacent = true;
    }
    if (!adjacent) continue;
    any = true;
    const Point<2> r = node_coord(g, k);
    const double phi_t = (shape.phi_domain(t + dt, r) - shape.phi_domain(t - dt, r)) / (2.0 * dt);
    const double gx = d1(phi, idx, k, 0), gy = d1(phi, idx, k, 1);
    const double norm = std::hypot(gx, gy);
    if (norm == 0.0) continue;
    vmax = std::max(vmax, std::abs(phi_t) / norm);
  }
  if (!any) throw std::runtime_error("normal_speed_max: the object boundary does not cross the grid");
  return vmax;
}

/// Step limiting boundary travel to f cell diagonals, clamped to end at t = 1.
inline double adaptive_dt(const MovingShape& shape, double t, const GridSpec<2>& g, double f) {
  if (!(f > 0.0)) throw std::invalid_argument("adaptive_dt: f must be positive");
  const double remaining = 1.0 - t;
  const double v = normal_speed_max(shape, t, g);
  if (v == 0.0) return remaining;
  return std::min(remaining, f * g.diagonal() / v);
}

struct SweepStep {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  std::size_t uncovered = 0;
  double error = 0.0;  // max error over the uncovered nodes, 0 when none
};

struct SweepLog {
  std::vector<SweepStep> steps;
  double max_error = 0.0;
  bool converged = true;
};

/// Marches t over [0, 1]. At t_n the exact solution is kept where the
/// solution-domain level set is <= 0, zeroed elsewhere, and extrapolated into
/// the object; at t_{n+1} the extrapolated values are compared with the exact
/// u(t_n) at nodes that entered the solution domain.
inline SweepLog run_sweep_demo(const MovingShape& shape, const TestSolution& sol, const GridSpec<2>& g,
                               const ExtrapolationConfig& cfg, double f) {
  cfg.validate();
  const double band = cfg.band_factor * g.diagonal();
  SweepLog log;
  double t = 0.0;
  ScalarField<2> phi = shape.sample_phi(t, g);
  int step = 0;
  while (t < 1.0) {
    if (band_touches_boundary(phi, band))
      throw std::runtime_error("run_sweep_demo: narrow band reaches the box boundary at t = " + std::to_string(t));
    ScalarField<2> u(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (phi[k] <= 0.0) u[k] = eval_test_solution(sol, t, node_coord(g, k));
    const auto ext = extrapolate(u, phi, cfg);
    log.converged = log.converged && ext.converged;

    const double dt = adaptive_dt(shape, t, g, f);
    const double t_next = (1.0 - (t + dt) < 1e-14) ? 1.0 : t + dt;
    ScalarField<2> phi_next = shape.sample_phi(t_next, g);

    SweepStep row{++step, t_next, t_next - t, 0, 0.0};
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (phi[k] < 0.0 || !(phi_next[k] < 0.0)) continue;
      ++row.uncovered;
      row.error = std::max(row.error, std::abs(ext.q_ext[k] - eval_test_solution(sol, t, node_coord(g, k))));
    }
    log.max_error = std::max(log.max_error, row.error);
    log.steps.push_back(row);
    t = t_next;
    phi = std::move(phi_next);
  }
  return log;
}

}  // namespace bandext
