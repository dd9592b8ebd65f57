// Band-restricted error norms and convergence-order estimates.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "bandext/geometry.hpp"
#include "bandext/grid.hpp"

namespace bandext {

/// max |numeric - exact| over the exterior band 0 < phi <= width. An empty
/// band means the grid is too coarse for the protocol and is an error.
template <int Dim, class Exact>
double band_linf_error(const ScalarField<Dim>& numeric, Exact&& exact, const ScalarField<Dim>& phi, double width) {
  const Mask<Dim> band = band_mask(phi, width, BandKind::Exterior);
  const auto& g = numeric.grid();
  double err = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!band[k]) continue;
    any = true;
    err = std::max(err, std::abs(numeric[k] - exact(node_coord(g, k))));
  }
  if (!any) throw std::runtime_error("band_linf_error: exterior band contains no grid node");
  return err;
}

struct ConvergenceRow {
  std::size_t resolution = 0;  // nodes per axis
  double h = 0.0;
  double error = 0.0;
  std::vector<int> iterations;
  bool converged = true;
  double wall_ms = 0.0;
};

struct OrderFit {
  std::vector<double> pairwise;  // one per adjacent pair of rows
  double fitted = 0.0;           // least-squares slope of log e against log h
};

/// Rows must be ordered by decreasing h with strictly positive errors.
inline OrderFit fit_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size()) throw std::invalid_argument("fit_order: h and error lists differ in length");
  if (h.size() < 2) throw std::invalid_argument("fit_order: need at least two rows");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(err[i] > 0.0)) throw std::invalid_argument("fit_order: errors must be strictly positive");
    if (!(h[i] > 0.0)) throw std::invalid_argument("fit_order: spacings must be strictly positive");
  }
  OrderFit fit;
  for (std::size_t i = 0; i + 1 < h.size(); ++i)
    fit.pairwise.push_back(std::log(err[i] / err[i + 1]) / std::log(h[i] / h[i + 1]));

  const double n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_order: spacings must differ");
  fit.fitted = (n * sxy - sx * sy) / denom;
  return fit;
}

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // decreasing h
  OrderFit orders;                   // over converged rows only
  bool all_converged = true;
};

/// Sorts rows by decreasing h and fits orders over the converged ones.
inline ConvergenceReport make_report(std::vector<ConvergenceRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.h > b.h; });
  ConvergenceReport rep{std::move(rows), {}, true};
  std::vector<double> h, e;
  for (const auto& r : rep.rows) {
    rep.all_converged = rep.all_converged && r.converged;
    if (!r.converged) continue;
    h.push_back(r.h);
    e.push_back(r.error);
  }
  if (h.size() >= 2) rep.orders = fit_order(h, e);
  return rep;
}

}  // namespace bandext
