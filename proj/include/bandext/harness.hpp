// Experiment drivers behind the bandext CLI: resolution sweeps, single runs
// with field dumps, and the moving-object sweep demo.
#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bandext/extrapolation.hpp"
#include "bandext/geometry.hpp"
#include "bandext/grid.hpp"
#include "bandext/io.hpp"
#include "bandext/metrics.hpp"
#include "bandext/moving_domain.hpp"

namespace bandext {

inline constexpr std::string_view kConvergenceCsvHeader =
    "N,h,error,pairwise_order,iterations_stage1,iterations_stage2,iterations_stage3,converged,wall_ms";
inline constexpr std::string_view kSweepCsvHeader = "step,t,dt,uncovered_count,uncovered_linf";

struct RunConfig {
  std::string shape = "disk2d";
  /// Empty picks the default for the shape's dimension.
  std::string field;
  ExtrapolationConfig extrapolation;
  std::vector<std::size_t> resolutions{64, 128, 256};
  /// Record wall-clock time in the CSV (otherwise 0, keeping output deterministic).
  bool timing = false;
  /// Apply the known order bounds for the shape/method/order combination.
  bool check = false;
  std::optional<double> min_order;
  std::optional<double> max_order;

  void validate() const {
    if (resolutions.empty()) throw std::invalid_argument("RunConfig: no resolutions given");
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
      if (resolutions[i] < 32) throw std::invalid_argument("RunConfig: resolutions must be >= 32");
      if (i && resolutions[i] <= resolutions[i - 1])
        throw std::invalid_argument("RunConfig: resolutions must be strictly increasing");
    }
    extrapolation.validate();
  }
};

inline std::string default_field(int dim) { return dim == 2 ? "sincos2d" : "sincosexp3d"; }

/// Analytic test fields by key: "sincos2d" = sin(pi x) cos(pi y),
/// "sincosexp3d" = sin(pi x) cos(pi y) exp(z), "constant" = 7.3.
template <int Dim>
std::function<double(const Point<Dim>&)> make_test_field(const std::string& key) {
  constexpr double pi = std::numbers::pi;
  if (key == "constant") return [](const Point<Dim>&) { return 7.3; };
  if constexpr (Dim == 2) {
    if (key == "sincos2d") return [](const Point<2>& r) { return std::sin(pi * r[0]) * std::cos(pi * r[1]); };
  } else {
    if (key == "sincosexp3d")
      return [](const Point<3>& r) { return std::sin(pi * r[0]) * std::cos(pi * r[1]) * std::exp(r[2]); };
  }
  throw std::invalid_argument("unknown " + std::to_string(Dim) + "D test field '" + key + "'");
}

/// Fitted-order bounds that a --check run must satisfy, when known for the
/// combination.
struct OrderBounds {
  std::optional<double> min;
  std::optional<double> max;
};

inline OrderBounds expected_order_bounds(const std::string& shape, Method m, Order o) {
  if (o == Order::Constant) return {};
  const bool linear = o == Order::Linear;
  if (shape == "disk2d") return {linear ? 1.75 : 2.7, std::nullopt};
  if (shape == "sphere3d") return {linear ? 1.75 : 2.5, std::nullopt};
  if (shape == "union2d" || shape == "intersection2d") {
    if (m == Method::ND) return {std::nullopt, 1.5};
    return {linear ? 1.75 : 2.5, std::nullopt};
  }
  if (shape == "union3d" && !linear) {
    if (m == Method::ND) return {std::nullopt, 1.5};
    return {2.5, std::nullopt};
  }
  return {};
}

/// One extrapolation of a test field at a single resolution.
template <int Dim>
struct SingleRun {
  GridSpec<Dim> grid;
  ScalarField<Dim> phi;
  ScalarField<Dim> q_exact;
  ExtrapolationResult<Dim> result;
  double band_width = 0.0;
  double band_error = 0.0;
};

template <int Dim>
SingleRun<Dim> run_single(const Shape& shape, const std::string& field, std::size_t n, const ExtrapolationConfig& cfg) {
  const auto grid = GridSpec<Dim>::cube(n);
  const auto q_fn = make_test_field<Dim>(field);
  ScalarField<Dim> phi = eval_shape(shape, grid);
  ScalarField<Dim> exact = sample(grid, q_fn);
  // Exterior values must come from the extrapolation, never from the sample.
  ScalarField<Dim> q = exact;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (phi[k] > 0.0) q[k] = 0.0;
  auto result = extrapolate(q, phi, cfg);
  const double width = 2.0 * grid.diagonal();
  const double err = band_linf_error(result.q_ext, q_fn, phi, width);
  return {grid, std::move(phi), std::move(exact), std::move(result), width, err};
}

struct ConvergenceOutcome {
  ConvergenceReport report;
  std::string csv;
  bool check_passed = true;
  std::vector<std::string> check_failures;
};

namespace detail {

template <int Dim>
ConvergenceRow convergence_row(const RunConfig& cfg, const Shape& shape, const std::string& field, std::size_t n) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto run = run_single<Dim>(shape, field, n, cfg.extrapolation);
  const auto t1 = std::chrono::steady_clock::now();
  ConvergenceRow row;
  row.resolution = n;
  row.h = run.grid.h(0);
  row.error = run.band_error;
  row.iterations.assign(run.result.iterations_per_stage.begin(), run.result.iterations_per_stage.end());
  row.converged = run.result.converged;
  if (cfg.timing) row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return row;
}

}  // namespace detail

inline std::string convergence_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << kConvergenceCsvHeader << '\n';
  // Pairwise orders are only defined between consecutive converged rows.
  std::size_t conv_index = 0;
  for (const auto& r : rep.rows) {
    os << r.resolution << ',' << format_sci(r.h) << ',' << format_sci(r.error) << ',';
    if (r.converged) {
      if (conv_index > 0 && conv_index - 1 < rep.orders.pairwise.size())
        os << format_sci(rep.orders.pairwise[conv_index - 1]);
      ++conv_index;
    }
    for (int s = 0; s < kNumStages; ++s) os << ',' << (s < static_cast<int>(r.iterations.size()) ? r.iterations[s] : 0);
    os << ',' << (r.converged ? 1 : 0) << ',' << format_sci(r.wall_ms) << '\n';
  }
  return os.str();
}

inline ConvergenceOutcome cmd_convergence(const RunConfig& cfg) {
  cfg.validate();
  const Shape shape = make_shape(cfg.shape);
  const int dim = shape_dim(shape);
  const std::string field = cfg.field.empty() ? default_field(dim) : cfg.field;

  std::vector<ConvergenceRow> rows;
  for (std::size_t n : cfg.resolutions) {
    rows.push_back(dim == 2 ? detail::convergence_row<2>(cfg, shape, field, n)
                            : detail::convergence_row<3>(cfg, shape, field, n));
  }
  ConvergenceOutcome out{make_report(std::move(rows)), {}, true, {}};
  out.csv = convergence_csv(out.report);

  // Non-convergence fails the run whether or not bounds are checked.
  for (const auto& r : out.report.rows)
    if (!r.converged) {
      out.check_passed = false;
      out.check_failures.push_back("N=" + std::to_string(r.resolution) + " hit max_iters before reaching tol");
    }
  OrderBounds bounds;
  if (cfg.check) bounds = expected_order_bounds(cfg.shape, cfg.extrapolation.method, cfg.extrapolation.order);
  if (cfg.min_order) bounds.min = cfg.min_order;
  if (cfg.max_order) bounds.max = cfg.max_order;
  if (bounds.min || bounds.max) {
    const double p = out.report.orders.fitted;
    const bool have = !out.report.orders.pairwise.empty();
    if (!have) {
      out.check_passed = false;
      out.check_failures.push_back("fewer than two converged rows, no fitted order");
    } else {
      if (bounds.min && p < *bounds.min) {
        out.check_passed = false;
        out.check_failures.push_back("fitted order " + format_real(p) + " < " + format_real(*bounds.min));
      }
      if (bounds.max && p > *bounds.max) {
        out.check_passed = false;
        out.check_failures.push_back("fitted order " + format_real(p) + " > " + format_real(*bounds.max));
      }
    }
  }
  return out;
}

struct ExtrapolateOutcome {
  FieldDump dump;
  double band_error = 0.0;
  bool converged = true;
  std::array<int, kNumStages> iterations{};
  std::string summary;
};

namespace detail {

template <int Dim>
ExtrapolateOutcome extrapolate_dump(const Shape& shape, const std::string& field, std::size_t n,
                                    const ExtrapolationConfig& cfg) {
  const auto run = run_single<Dim>(shape, field, n, cfg);
  const auto& g = run.grid;
  const Mask<Dim> band = band_mask(run.phi, run.band_width, BandKind::Exterior);
  ScalarField<Dim> err(g, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (band[k]) err[k] = std::abs(run.result.q_ext[k] - run.q_exact[k]);
  const auto masks = build_masks(run.phi, cfg.mask_rule);

  ExtrapolateOutcome out;
  out.dump = FieldDump::for_grid(g);
  out.dump.add("phi", run.phi);
  out.dump.add("q_exact", run.q_exact);
  out.dump.add("q_ext", run.result.q_ext);
  out.dump.add("error", err);
  out.dump.add("h_phi", masks.h_phi.to_field());
  out.dump.add("h_grad", masks.h_grad.to_field());
  out.dump.add("h_hess", masks.h_hess.to_field());
  out.band_error = run.band_error;
  out.converged = run.result.converged;
  out.iterations = run.result.iterations_per_stage;
  return out;
}

}  // namespace detail

inline ExtrapolateOutcome cmd_extrapolate(const std::string& shape_key, const std::string& field_key, std::size_t n,
                                          const ExtrapolationConfig& cfg) {
  cfg.validate();
  const Shape shape = make_shape(shape_key);
  const int dim = shape_dim(shape);
  const std::string field = field_key.empty() ? default_field(dim) : field_key;
  auto out = dim == 2 ? detail::extrapolate_dump<2>(shape, field, n, cfg)
                      : detail::extrapolate_dump<3>(shape, field, n, cfg);
  std::ostringstream s;
  s << "shape=" << shape_key << " field=" << field << " N=" << n << " method=" << to_string(cfg.method)
    << " order=" << to_string(cfg.order) << " band_linf=" << format_sci(out.band_error)
    << " iterations=" << out.iterations[0] << '/' << out.iterations[1] << '/' << out.iterations[2]
    << " converged=" << (out.converged ? "yes" : "no");
  out.summary = s.str();
  return out;
}

inline MovingShape make_moving_shape(const std::string& object) {
  MovingShape s;
  if (object == "smooth") s.base = SmoothObject{};
  else if (object == "nonsmooth") s.base = TwoDiskObject{};
  else throw std::invalid_argument("unknown object '" + object + "' (expected smooth or nonsmooth)");
  return s;
}

inline std::string sweep_csv(const SweepLog& log) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& s : log.steps)
    os << s.step << ',' << format_sci(s.t) << ',' << format_sci(s.dt) << ',' << s.uncovered << ','
       << format_sci(s.error) << '\n';
  return os.str();
}

struct SweepOutcome {
  SweepLog log;
  std::string csv;
};

inline SweepOutcome cmd_sweep_demo(const std::string& object, std::size_t n, const ExtrapolationConfig& cfg, double f,
                                   double diffusivity = 1.0) {
  TestSolution sol;
  sol.diffusivity = diffusivity;
  auto log = run_sweep_demo(make_moving_shape(object), sol, GridSpec<2>::cube(n), cfg, f);
  auto csv = sweep_csv(log);
  return {std::move(log), std::move(csv)};
}

}  // namespace bandext
