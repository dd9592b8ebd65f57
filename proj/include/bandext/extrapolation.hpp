// PDE-based extrapolation of a scalar field across the zero level set of phi,
// from phi <= 0 into phi > 0, by pseudo-time advection along the normal.
//
// Two families are provided:
//   Method::ND  extends the normal derivatives q_nn, then q_n, then q.
//   Method::WCD extends the Cartesian Hessian, then the gradient, then q; the
//               normal only weights the transport and source terms, so kinks
//               in the interface do not pollute the extended derivatives.
//
// Each stage is iterated to its own steady state (explicit Euler in pseudo
// time, Jacobi updates) before the next one starts; source terms are frozen
// copies of the previous stage's converged output.
#pragma once

#include <array>
#include <atomic>
#include <functional>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bandext/geometry.hpp"
#include "bandext/grid.hpp"
#include "bandext/parallel.hpp"
#include "bandext/stencils.hpp"

namespace bandext {

enum class Method { ND, WCD };
enum class Order { Constant, Linear, Quadratic };

/// Explicit pseudo-time integrator: forward Euler or TVD Runge-Kutta.
enum class PseudoTime { Euler, RK2, RK3 };

inline std::string_view to_string(Method m) { return m == Method::ND ? "nd" : "wcd"; }
inline std::string_view to_string(Order o) {
  switch (o) {
    case Order::Constant: return "constant";
    case Order::Linear: return "linear";
    case Order::Quadratic: return "quadratic";
  }
  return "?";
}
inline Method parse_method(std::string_view s) {
  if (s == "nd") return Method::ND;
  if (s == "wcd") return Method::WCD;
  throw std::invalid_argument("unknown method '" + std::string(s) + "' (expected nd or wcd)");
}
inline Order parse_order(std::string_view s) {
  if (s == "constant") return Order::Constant;
  if (s == "linear") return Order::Linear;
  if (s == "quadratic") return Order::Quadratic;
  throw std::invalid_argument("unknown order '" + std::string(s) + "' (expected constant, linear or quadratic)");
}

struct ExtrapolationConfig {
  Method method = Method::WCD;
  Order order = Order::Quadratic;
  double tol = 1e-12;
  int max_iters = 2000;
  /// Stopping band half-width in units of the cell diagonal.
  double band_factor = 2.0;
  std::optional<double> dtau_override;
  /// WCD only: evaluate the minmod corrections of the q stage once.
  bool minmod_cache = true;
  MaskRule mask_rule = MaskRule::Strict;
  bool record_history = false;
  /// ND only: integrator of the q stage. With the limiter re-evaluated every
  /// iteration, forward Euler settles into a bounded cycle instead of a steady state.
  PseudoTime nd_q_scheme = PseudoTime::RK3;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("ExtrapolationConfig: tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("ExtrapolationConfig: max_iters must be >= 1");
    if (!(band_factor > 0.0)) throw std::invalid_argument("ExtrapolationConfig: band_factor must be positive");
    if (dtau_override && !(*dtau_override > 0.0))
      throw std::invalid_argument("ExtrapolationConfig: dtau_override must be positive");
  }
};

/// Stage 1 extends second derivatives, stage 2 first derivatives, stage 3 q.
inline constexpr int kNumStages = 3;

template <int Dim>
struct ExtrapolationResult {
  ScalarField<Dim> q_ext;
  /// 0 for stages that do not run at the requested order.
  std::array<int, kNumStages> iterations_per_stage{};
  /// Band-restricted max step difference per iteration (when recorded).
  std::array<std::vector<double>, kNumStages> residual_history;
  std::array<double, kNumStages> final_residual{};
  bool converged = true;
  /// Set when the stopping band held no updated node in some stage.
  bool empty_band = false;
};

struct Residual {
  double value = 0.0;
  bool empty_band = false;
};

/// max over band nodes of |next - prev|.
template <int Dim>
Residual residual(const ScalarField<Dim>& prev, const ScalarField<Dim>& next, const Mask<Dim>& band) {
  Residual r{0.0, true};
  for (std::size_t k = 0; k < prev.size(); ++k) {
    if (!band[k]) continue;
    r.empty_band = false;
    r.value = std::max(r.value, std::abs(next[k] - prev[k]));
  }
  return r;
}

/// Pseudo-time step: min(h)/2 in 2D, min(h)/3 in 3D.
template <int Dim>
double default_dtau(const GridSpec<Dim>& g) {
  return g.min_h() / static_cast<double>(Dim);
}

/// q_n = grad(q) . n and q_nn = n . Hess(q) . n + n . grad(n) . grad(q), by
/// central differences at every node. Only meaningful where the stencils read
/// valid data.
template <int Dim>
std::pair<ScalarField<Dim>, ScalarField<Dim>> nd_normal_derivatives(const ScalarField<Dim>& q,
                                                                    const VectorField<Dim>& normals) {
  const auto& g = q.grid();
  std::pair<ScalarField<Dim>, ScalarField<Dim>> out{ScalarField<Dim>(g), ScalarField<Dim>(g)};
  auto& [qn, qnn] = out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.unflat(k);
    const Point<Dim> n = normals.at(k);
    Point<Dim> grad;
    for (int a = 0; a < Dim; ++a) grad[a] = d1(q, idx, k, a);
    double dn = 0.0, hess_nn = 0.0, curv = 0.0;
    for (int a = 0; a < Dim; ++a) {
      dn += grad[a] * n[a];
      for (int b = 0; b < Dim; ++b) {
        const double qab = a == b ? d2(q, idx, k, a) : d11(q, idx, k, a, b);
        hess_nn += n[a] * qab * n[b];
        // n_a d_a(n_b) q_b
        curv += n[a] * d1(normals[b], idx, k, a) * grad[b];
      }
    }
    qn[k] = dn;
    qnn[k] = hess_nn + curv;
  }
  return out;
}

namespace detail {

/// Nodes updated by one stage, with their cached upwind stencils.
template <int Dim>
struct StagePlan {
  std::vector<std::size_t> nodes;
  std::vector<UpwindAxes<Dim>> axes;
  std::vector<std::uint8_t> in_band;
};

template <int Dim>
StagePlan<Dim> make_plan(const Mask<Dim>& mask, const VectorField<Dim>& normals, const Mask<Dim>& stop_band) {
  const auto& g = mask.grid();
  StagePlan<Dim> plan;
  const std::size_t count = mask.count();
  plan.nodes.reserve(count);
  plan.axes.reserve(count);
  plan.in_band.reserve(count);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!mask[k]) continue;
    plan.nodes.push_back(k);
    plan.axes.push_back(upwind_axes(g, g.unflat(k), normals.at(k)));
    plan.in_band.push_back(stop_band[k]);
  }
  return plan;
}

struct StageStats {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool empty_band = true;
  std::vector<double> history;
};

/// Shu-Osher coefficients of one explicit pseudo-time sub-step:
/// f <- keep * f^k + (1 - keep) * (f + dtau * L(f)).
inline std::span<const double> substep_weights(PseudoTime scheme) {
  static constexpr double euler[] = {0.0};
  static constexpr double rk2[] = {0.0, 0.5};
  static constexpr double rk3[] = {0.0, 0.75, 1.0 / 3.0};
  switch (scheme) {
    case PseudoTime::Euler: return euler;
    case PseudoTime::RK2: return rk2;
    case PseudoTime::RK3: return rk3;
  }
  return euler;
}

/// Iterates f_c <- f_c - dtau * rhs(c, i) over the plan nodes until the
/// band-restricted max change per pseudo-time step drops to tol. rhs reads
/// the current iterate only; all components are written after every node
/// has been evaluated.
template <int Dim, std::size_t C, class Rhs, class Prepare>
StageStats iterate_stage(std::string_view stage, std::array<ScalarField<Dim>*, C> fields, const StagePlan<Dim>& plan,
                         double dtau, const ExtrapolationConfig& cfg, PseudoTime scheme, Rhs&& rhs,
                         Prepare&& prepare) {
  StageStats st;
  const std::size_t m = plan.nodes.size();
  for (std::size_t i = 0; i < m; ++i) st.empty_band = st.empty_band && !plan.in_band[i];
  const auto keep = substep_weights(scheme);

  std::vector<double> base(m * C), next(m * C);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    parallel_for(m, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i)
        for (std::size_t c = 0; c < C; ++c) base[i * C + c] = (*fields[c])[plan.nodes[i]];
    });
    double res = 0.0;
    for (std::size_t sub = 0; sub < keep.size(); ++sub) {
      prepare(it);
      const double w = keep[sub];
      std::atomic<bool> bad{false};
      res = parallel_max(m, [&](std::size_t b, std::size_t e) {
        double local = 0.0;
        for (std::size_t i = b; i < e; ++i) {
          const std::size_t k = plan.nodes[i];
          for (std::size_t c = 0; c < C; ++c) {
            const double euler = (*fields[c])[k] - dtau * rhs(c, i, k);
            const double f0 = base[i * C + c];
            const double v = w == 0.0 ? euler : w * f0 + (1.0 - w) * euler;
            if (!std::isfinite(v)) bad.store(true, std::memory_order_relaxed);
            next[i * C + c] = v;
            if (plan.in_band[i]) local = std::max(local, std::abs(v - f0));
          }
        }
        return local;
      });
      if (bad.load()) {
        std::ostringstream msg;
        msg << "extrapolate: non-finite value in stage '" << stage << "' at iteration " << it;
        throw std::runtime_error(msg.str());
      }
      parallel_for(m, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
          for (std::size_t c = 0; c < C; ++c) (*fields[c])[plan.nodes[i]] = next[i * C + c];
      });
    }
    st.iterations = it;
    st.residual = res;
    if (cfg.record_history) st.history.push_back(res);
    if (res <= cfg.tol) {
      st.converged = true;
      break;
    }
  }
  return st;
}

template <int Dim>
void record(ExtrapolationResult<Dim>& out, int stage, StageStats&& st) {
  out.iterations_per_stage[stage] = st.iterations;
  out.final_residual[stage] = st.residual;
  out.residual_history[stage] = std::move(st.history);
  out.converged = out.converged && st.converged;
  out.empty_band = out.empty_band || st.empty_band;
}

inline void no_prepare(int) {}

}  // namespace detail

/// Extends q from phi <= 0 into phi > 0. Values of q at phi > 0 nodes are the
/// initial iterate of the last stage; derivative unknowns start at zero.
template <int Dim>
ExtrapolationResult<Dim> extrapolate(const ScalarField<Dim>& q, const ScalarField<Dim>& phi,
                                     const ExtrapolationConfig& cfg) {
  cfg.validate();
  if (!(q.grid() == phi.grid())) throw std::invalid_argument("extrapolate: q and phi live on different grids");
  const auto& g = q.grid();
  const double dtau = cfg.dtau_override.value_or(default_dtau(g));
  const VectorField<Dim> normals = compute_normals(phi);
  const MaskSet<Dim> masks = build_masks(phi, cfg.mask_rule);
  const Mask<Dim> stop_band = band_mask(phi, cfg.band_factor * g.diagonal(), BandKind::TwoSided);

  ExtrapolationResult<Dim> out{q, {}, {}, {}, true, false};
  const bool quadratic = cfg.order == Order::Quadratic;
  const bool with_derivs = cfg.order != Order::Constant;
  const Method method = cfg.order == Order::Constant ? Method::ND : cfg.method;  // both coincide

  // Frozen per-node source of the q stage: q_n (ND) or n . q_grad (WCD).
  ScalarField<Dim> q_source(g, 0.0);
  // Pure second derivatives of q used by the minmod correction (WCD: the
  // extended Hessian diagonal).
  std::optional<VectorField<Dim>> q_second;

  if (method == Method::ND && with_derivs) {
    ScalarField<Dim> qn(g), qnn(g, 0.0);
    {
      auto [qn0, qnn0] = nd_normal_derivatives(q, normals);
      qn = std::move(qn0);
      if (quadratic) qnn = std::move(qnn0);
    }
    if (quadratic) {
      for (std::size_t k = 0; k < g.size(); ++k)
        if (masks.h_hess[k]) qnn[k] = 0.0;
      const auto plan = detail::make_plan(masks.h_hess, normals, stop_band);
      std::array<ScalarField<Dim>*, 1> f{&qnn};
      detail::record(out, 0,
                     detail::iterate_stage<Dim, 1>(
                         "q_nn", f, plan, dtau, cfg, PseudoTime::Euler,
                         [&](std::size_t, std::size_t i, std::size_t k) {
                           return upwind_first_term(qnn.data(), k, plan.axes[i]);
                         },
                         detail::no_prepare));
    }
    for (std::size_t k = 0; k < g.size(); ++k)
      if (masks.h_grad[k]) qn[k] = 0.0;
    {
      const auto plan = detail::make_plan(masks.h_grad, normals, stop_band);
      std::array<ScalarField<Dim>*, 1> f{&qn};
      detail::record(out, 1,
                     detail::iterate_stage<Dim, 1>(
                         "q_n", f, plan, dtau, cfg, PseudoTime::Euler,
                         [&](std::size_t, std::size_t i, std::size_t k) {
                           return upwind_first_term(qn.data(), k, plan.axes[i]) - qnn[k];
                         },
                         detail::no_prepare));
    }
    q_source = std::move(qn);
  } else if (method == Method::WCD && with_derivs) {
    auto [grad, hess] = central_derivatives(q);
    if (quadratic) {
      constexpr int NC = SymTensorField<Dim>::num_components;
      for (int c = 0; c < NC; ++c)
        for (std::size_t k = 0; k < g.size(); ++k)
          if (masks.h_hess[k]) hess.component(c)[k] = 0.0;
      const auto plan = detail::make_plan(masks.h_hess, normals, stop_band);
      std::array<ScalarField<Dim>*, NC> f;
      std::array<const double*, NC> data;
      for (int c = 0; c < NC; ++c) {
        f[c] = &hess.component(c);
        data[c] = hess.component(c).data();
      }
      detail::record(out, 0,
                     detail::iterate_stage<Dim, NC>(
                         "Q_hess", f, plan, dtau, cfg, PseudoTime::Euler,
                         [&](std::size_t c, std::size_t i, std::size_t k) {
                           return upwind_first_term(data[c], k, plan.axes[i]);
                         },
                         detail::no_prepare));
      q_second.emplace(g);
      for (int a = 0; a < Dim; ++a) (*q_second)[a] = hess(a, a);
    }
    for (int a = 0; a < Dim; ++a)
      for (std::size_t k = 0; k < g.size(); ++k)
        if (masks.h_grad[k]) grad[a][k] = 0.0;
    {
      const auto plan = detail::make_plan(masks.h_grad, normals, stop_band);
      // Frozen source n . Q at every plan node, per component.
      std::vector<double> src(quadratic ? plan.nodes.size() * Dim : 0, 0.0);
      if (quadratic) {
        for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
          const std::size_t k = plan.nodes[i];
          for (int a = 0; a < Dim; ++a) {
            double s = 0.0;
            for (int b = 0; b < Dim; ++b) s += normals[b][k] * hess(a, b)[k];
            src[i * Dim + a] = s;
          }
        }
      }
      std::array<ScalarField<Dim>*, Dim> f;
      std::array<const double*, Dim> data;
      for (int a = 0; a < Dim; ++a) {
        f[a] = &grad[a];
        data[a] = grad[a].data();
      }
      detail::record(out, 1,
                     detail::iterate_stage<Dim, Dim>(
                         "q_grad", f, plan, dtau, cfg, PseudoTime::Euler,
                         [&](std::size_t c, std::size_t i, std::size_t k) {
                           const double t = upwind_first_term(data[c], k, plan.axes[i]);
                           return quadratic ? t - src[i * Dim + c] : t;
                         },
                         detail::no_prepare));
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
      double s = 0.0;
      for (int a = 0; a < Dim; ++a) s += normals[a][k] * grad[a][k];
      q_source[k] = s;
    }
  }

  // Stage 3: q itself.
  ScalarField<Dim>& qe = out.q_ext;
  const auto plan = detail::make_plan(masks.h_phi, normals, stop_band);
  std::array<ScalarField<Dim>*, 1> f{&qe};
  const double* src = q_source.data();

  if (!quadratic) {
    detail::record(out, 2,
                   detail::iterate_stage<Dim, 1>(
                       "q", f, plan, dtau, cfg, PseudoTime::Euler,
                       [&](std::size_t, std::size_t i, std::size_t k) {
                         return upwind_first_term(qe.data(), k, plan.axes[i]) - src[k];
                       },
                       detail::no_prepare));
    return out;
  }

  // Minmod curvature correction per plan node: recomputed from the evolving q
  // every iteration (ND), or from the frozen extended Hessian (WCD, once when
  // minmod_cache is set).
  std::vector<double> correction(plan.nodes.size(), 0.0);
  std::function<void(int)> prepare;
  std::vector<std::size_t> curvature_nodes;
  std::vector<std::uint8_t> curvature_edge;
  VectorField<Dim> q_ss(g);
  if (method == Method::ND) {
    // Second derivatives are needed at plan nodes and their upwind neighbors.
    Mask<Dim> needed(g);
    for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
      const std::size_t k = plan.nodes[i];
      needed.set(k, true);
      for (int a = 0; a < Dim; ++a) needed.set(k + plan.axes[i].offset[a], true);
    }
    for (std::size_t k = 0; k < g.size(); ++k)
      if (needed[k]) curvature_nodes.push_back(k);
    curvature_edge.resize(curvature_nodes.size());
    for (std::size_t j = 0; j < curvature_nodes.size(); ++j)
      curvature_edge[j] = g.on_boundary(g.unflat(curvature_nodes[j]));
  }
  auto refresh_corrections = [&](const VectorField<Dim>& second) {
    std::array<const double*, Dim> fss;
    for (int a = 0; a < Dim; ++a) fss[a] = second[a].data();
    parallel_for(plan.nodes.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i)
        correction[i] = upwind_minmod_correction(fss, plan.nodes[i], plan.axes[i]);
    });
  };
  if (method == Method::ND) {
    prepare = [&](int) {
      parallel_for(curvature_nodes.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
          const std::size_t k = curvature_nodes[j];
          if (curvature_edge[j]) {
            const auto idx = g.unflat(k);
            for (int a = 0; a < Dim; ++a) q_ss[a][k] = d2(qe, idx, k, a);
            continue;
          }
          const double* p = qe.data() + k;
          for (int a = 0; a < Dim; ++a) {
            const std::size_t st = g.stride(a);
            q_ss[a][k] = (p[st] - 2.0 * p[0] + p[-static_cast<std::ptrdiff_t>(st)]) / (g.h(a) * g.h(a));
          }
        }
      });
      refresh_corrections(q_ss);
    };
  } else {
    prepare = [&](int it) {
      if (it == 1 || !cfg.minmod_cache) refresh_corrections(*q_second);
    };
  }
  detail::record(out, 2,
                 detail::iterate_stage<Dim, 1>(
                     "q", f, plan, dtau, cfg, method == Method::ND ? cfg.nd_q_scheme : PseudoTime::Euler,
                     [&](std::size_t, std::size_t i, std::size_t k) {
                       return upwind_first_term(qe.data(), k, plan.axes[i]) + correction[i] - src[k];
                     },
                     prepare));
  return out;
}

}  // namespace bandext
