// Finite-difference kernels: second-order central derivatives (one-sided at
// the box boundary), the minmod limiter, and first/second-order upwind
// transport terms n . grad f.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include "bandext/grid.hpp"

namespace bandext {

namespace detail {

// Weights of a derivative operator along one axis: value = sum w[m] * f[k + off[m] * stride] / h^p.
struct AxisWeights {
  std::array<int, 4> off{};
  std::array<double, 4> w{};
  int count = 0;
};

inline AxisWeights first_weights(std::size_t i, std::size_t n) {
  if (i == 0) return {{0, 1, 2, 0}, {-1.5, 2.0, -0.5, 0.0}, 3};
  if (i + 1 == n) return {{0, -1, -2, 0}, {1.5, -2.0, 0.5, 0.0}, 3};
  return {{1, -1, 0, 0}, {0.5, -0.5, 0.0, 0.0}, 2};
}

inline AxisWeights second_weights(std::size_t i, std::size_t n) {
  if (i == 0) return {{0, 1, 2, 3}, {2.0, -5.0, 4.0, -1.0}, 4};
  if (i + 1 == n) return {{0, -1, -2, -3}, {2.0, -5.0, 4.0, -1.0}, 4};
  return {{1, 0, -1, 0}, {1.0, -2.0, 1.0, 0.0}, 3};
}

}  // namespace detail

/// df/dx_a at node k.
template <int Dim>
double d1(const ScalarField<Dim>& f, const std::type_identity_t<Index<Dim>>& idx, std::size_t k, int a) {
  const auto& g = f.grid();
  const auto st = detail::first_weights(idx[a], g.n(a));
  const auto s = static_cast<std::ptrdiff_t>(g.stride(a));
  const double* p = f.data() + k;
  double acc = 0.0;
  for (int m = 0; m < st.count; ++m) acc += st.w[m] * p[st.off[m] * s];
  return acc / g.h(a);
}

/// d2f/dx_a^2 at node k.
template <int Dim>
double d2(const ScalarField<Dim>& f, const std::type_identity_t<Index<Dim>>& idx, std::size_t k, int a) {
  const auto& g = f.grid();
  const auto st = detail::second_weights(idx[a], g.n(a));
  const auto s = static_cast<std::ptrdiff_t>(g.stride(a));
  const double* p = f.data() + k;
  double acc = 0.0;
  for (int m = 0; m < st.count; ++m) acc += st.w[m] * p[st.off[m] * s];
  return acc / (g.h(a) * g.h(a));
}

/// d2f/dx_a dx_b at node k, a != b. Tensor product of the first-derivative
/// operators; away from the boundary this is the 4-point corner stencil.
template <int Dim>
double d11(const ScalarField<Dim>& f, const std::type_identity_t<Index<Dim>>& idx, std::size_t k, int a, int b) {
  const auto& g = f.grid();
  const auto sa = detail::first_weights(idx[a], g.n(a));
  const auto sb = detail::first_weights(idx[b], g.n(b));
  const auto ta = static_cast<std::ptrdiff_t>(g.stride(a));
  const auto tb = static_cast<std::ptrdiff_t>(g.stride(b));
  const double* p = f.data() + k;
  double acc = 0.0;
  for (int m = 0; m < sa.count; ++m)
    for (int l = 0; l < sb.count; ++l) acc += sa.w[m] * sb.w[l] * p[sa.off[m] * ta + sb.off[l] * tb];
  return acc / (g.h(a) * g.h(b));
}

/// Gradient and Hessian of f at every node.
template <int Dim>
std::pair<VectorField<Dim>, SymTensorField<Dim>> central_derivatives(const ScalarField<Dim>& f) {
  const auto& g = f.grid();
  std::pair<VectorField<Dim>, SymTensorField<Dim>> out{VectorField<Dim>(g), SymTensorField<Dim>(g)};
  auto& [grad, hess] = out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.unflat(k);
    for (int a = 0; a < Dim; ++a) {
      grad[a][k] = d1(f, idx, k, a);
      hess(a, a)[k] = d2(f, idx, k, a);
      for (int b = 0; b < a; ++b) hess(a, b)[k] = d11(f, idx, k, a, b);
    }
  }
  return out;
}

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) <= std::abs(b) ? a : b;
}

struct UpwindTerm {
  double value = 0.0;
};

/// Upwind neighbor and weight |n_a| / h_a along each axis of one node. An axis
/// with zero normal component, or whose upwind neighbor lies outside the box,
/// contributes nothing (weight 0, offset 0).
template <int Dim>
struct UpwindAxes {
  std::array<std::ptrdiff_t, Dim> offset{};
  std::array<double, Dim> weight{};
  std::array<double, Dim> curvature_weight{};  // |n_a| h_a / 2
};

template <int Dim>
UpwindAxes<Dim> upwind_axes(const GridSpec<Dim>& g, const std::type_identity_t<Index<Dim>>& idx,
                            const std::type_identity_t<Point<Dim>>& n) {
  UpwindAxes<Dim> ax;
  for (int a = 0; a < Dim; ++a) {
    const auto s = static_cast<std::ptrdiff_t>(g.stride(a));
    if (n[a] > 0.0 && idx[a] > 0) {
      ax.offset[a] = -s;
      ax.weight[a] = n[a] / g.h(a);
      ax.curvature_weight[a] = 0.5 * n[a] * g.h(a);
    } else if (n[a] < 0.0 && idx[a] + 1 < g.n(a)) {
      ax.offset[a] = s;
      ax.weight[a] = -n[a] / g.h(a);
      ax.curvature_weight[a] = -0.5 * n[a] * g.h(a);
    }
  }
  return ax;
}

/// First-order upwind n . grad f at flat index k.
template <int Dim>
inline double upwind_first_term(const double* f, std::size_t k, const UpwindAxes<Dim>& ax) {
  const double fk = f[k];
  double acc = 0.0;
  for (int a = 0; a < Dim; ++a) acc += ax.weight[a] * (fk - f[k + ax.offset[a]]);
  return acc;
}

/// Minmod curvature correction of the second-order upwind term; fss[a] holds
/// the pure second derivative along axis a.
template <int Dim>
inline double upwind_minmod_correction(const std::type_identity_t<std::array<const double*, Dim>>& fss, std::size_t k,
                                       const UpwindAxes<Dim>& ax) {
  double acc = 0.0;
  for (int a = 0; a < Dim; ++a) {
    if (ax.curvature_weight[a] == 0.0) continue;
    acc += ax.curvature_weight[a] * minmod(fss[a][k], fss[a][k + ax.offset[a]]);
  }
  return acc;
}

template <int Dim>
UpwindTerm upwind_first(const ScalarField<Dim>& f, const VectorField<Dim>& normals, const std::type_identity_t<Index<Dim>>& node) {
  const auto& g = f.grid();
  const std::size_t k = g.flat(node);
  return {upwind_first_term(f.data(), k, upwind_axes(g, node, normals.at(k)))};
}

/// Second-order upwind term with minmod-limited curvature; f_second[a] is the
/// pure second derivative of f along axis a.
template <int Dim>
UpwindTerm upwind_second_minmod(const ScalarField<Dim>& f, const VectorField<Dim>& f_second,
                                const VectorField<Dim>& normals, const std::type_identity_t<Index<Dim>>& node) {
  const auto& g = f.grid();
  const std::size_t k = g.flat(node);
  const auto ax = upwind_axes(g, node, normals.at(k));
  std::array<const double*, Dim> fss;
  for (int a = 0; a < Dim; ++a) fss[a] = f_second[a].data();
  return {upwind_first_term(f.data(), k, ax) + upwind_minmod_correction(fss, k, ax)};
}

}  // namespace bandext
