// Uniform node-centered Cartesian grids and node-sampled fields.
//
// Storage is flat, x fastest: k = i + n_x * (j + n_y * l).
#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace bandext {

template <int Dim>
using Point = std::array<double, Dim>;

template <int Dim>
using Index = std::array<std::size_t, Dim>;

template <int Dim>
class GridSpec {
  static_assert(Dim == 2 || Dim == 3, "only 2D and 3D grids are supported");

 public:
  static constexpr int dim = Dim;

  GridSpec(Index<Dim> n, Point<Dim> lo, Point<Dim> hi) : n_(n), lo_(lo), hi_(hi) {
    std::size_t stride = 1;
    for (int a = 0; a < Dim; ++a) {
      if (n_[a] < 4) {
        throw std::invalid_argument("GridSpec: need at least 4 nodes per axis, axis " +
                                    std::to_string(a) + " has " + std::to_string(n_[a]));
      }
      if (!(hi_[a] > lo_[a])) {
        throw std::invalid_argument("GridSpec: hi must exceed lo on axis " + std::to_string(a));
      }
      h_[a] = (hi_[a] - lo_[a]) / static_cast<double>(n_[a] - 1);
      stride_[a] = stride;
      stride *= n_[a];
    }
    size_ = stride;
  }

  /// n nodes per axis over [lo, hi]^Dim.
  static GridSpec cube(std::size_t n, double lo = -1.0, double hi = 1.0) {
    Index<Dim> nn;
    Point<Dim> l, u;
    nn.fill(n);
    l.fill(lo);
    u.fill(hi);
    return GridSpec(nn, l, u);
  }

  std::size_t n(int a) const { return n_[a]; }
  const Index<Dim>& n() const { return n_; }
  double lo(int a) const { return lo_[a]; }
  double hi(int a) const { return hi_[a]; }
  double h(int a) const { return h_[a]; }
  const Point<Dim>& h() const { return h_; }
  std::size_t stride(int a) const { return stride_[a]; }
  std::size_t size() const { return size_; }

  double min_h() const {
    double m = h_[0];
    for (int a = 1; a < Dim; ++a) m = std::min(m, h_[a]);
    return m;
  }
  double max_h() const {
    double m = h_[0];
    for (int a = 1; a < Dim; ++a) m = std::max(m, h_[a]);
    return m;
  }
  /// Length of the cell diagonal, sqrt(sum h_a^2).
  double diagonal() const {
    double s = 0.0;
    for (int a = 0; a < Dim; ++a) s += h_[a] * h_[a];
    return std::sqrt(s);
  }

  std::size_t flat(const std::type_identity_t<Index<Dim>>& idx) const {
    std::size_t k = 0;
    for (int a = 0; a < Dim; ++a) {
      assert(idx[a] < n_[a]);
      k += idx[a] * stride_[a];
    }
    return k;
  }

  Index<Dim> unflat(std::size_t k) const {
    assert(k < size_);
    Index<Dim> idx;
    for (int a = 0; a < Dim; ++a) {
      idx[a] = k % n_[a];
      k /= n_[a];
    }
    return idx;
  }

  bool on_boundary(const std::type_identity_t<Index<Dim>>& idx) const {
    for (int a = 0; a < Dim; ++a)
      if (idx[a] == 0 || idx[a] + 1 == n_[a]) return true;
    return false;
  }

  bool operator==(const GridSpec& o) const { return n_ == o.n_ && lo_ == o.lo_ && hi_ == o.hi_; }

 private:
  Index<Dim> n_;
  Point<Dim> lo_;
  Point<Dim> hi_;
  Point<Dim> h_{};
  Index<Dim> stride_{};
  std::size_t size_ = 0;
};

/// Coordinates of a node. Out-of-range indices are a contract violation.
template <int Dim>
Point<Dim> node_coord(const GridSpec<Dim>& grid, const std::type_identity_t<Index<Dim>>& idx) {
  Point<Dim> r;
  for (int a = 0; a < Dim; ++a) {
    assert(idx[a] < grid.n(a));
    r[a] = grid.lo(a) + static_cast<double>(idx[a]) * grid.h(a);
  }
  return r;
}

template <int Dim>
Point<Dim> node_coord(const GridSpec<Dim>& grid, std::size_t k) {
  return node_coord(grid, grid.unflat(k));
}

template <int Dim>
class ScalarField {
 public:
  explicit ScalarField(const GridSpec<Dim>& grid, double value = 0.0)
      : grid_(grid), values_(grid.size(), value) {}
  ScalarField(const GridSpec<Dim>& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("ScalarField: value count does not match grid node count");
    }
  }

  const GridSpec<Dim>& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(const std::type_identity_t<Index<Dim>>& idx) { return values_[grid_.flat(idx)]; }
  double at(const std::type_identity_t<Index<Dim>>& idx) const { return values_[grid_.flat(idx)]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  void fill(double v) { std::fill(values_.begin(), values_.end(), v); }

 private:
  GridSpec<Dim> grid_;
  std::vector<double> values_;
};

template <int Dim>
class VectorField {
 public:
  explicit VectorField(const GridSpec<Dim>& grid) : comps_{make(grid)} {}

  const GridSpec<Dim>& grid() const { return comps_[0].grid(); }
  ScalarField<Dim>& operator[](int a) { return comps_[a]; }
  const ScalarField<Dim>& operator[](int a) const { return comps_[a]; }

  Point<Dim> at(std::size_t k) const {
    Point<Dim> v;
    for (int a = 0; a < Dim; ++a) v[a] = comps_[a][k];
    return v;
  }

 private:
  static std::array<ScalarField<Dim>, Dim> make(const GridSpec<Dim>& g) {
    if constexpr (Dim == 2) {
      return {ScalarField<Dim>(g), ScalarField<Dim>(g)};
    } else {
      return {ScalarField<Dim>(g), ScalarField<Dim>(g), ScalarField<Dim>(g)};
    }
  }
  std::array<ScalarField<Dim>, Dim> comps_;
};

/// Symmetric tensor storage. Component order: xx, xy, yy[, xz, yz, zz].
template <int Dim>
class SymTensorField {
 public:
  static constexpr int num_components = Dim * (Dim + 1) / 2;

  explicit SymTensorField(const GridSpec<Dim>& grid) : comps_(num_components, ScalarField<Dim>(grid)) {}

  /// Storage slot of entry (a, b); (a, b) and (b, a) share one slot.
  static constexpr int slot(int a, int b) {
    if (a > b) std::swap(a, b);
    return b * (b + 1) / 2 + a;
  }

  const GridSpec<Dim>& grid() const { return comps_[0].grid(); }
  ScalarField<Dim>& operator()(int a, int b) { return comps_[slot(a, b)]; }
  const ScalarField<Dim>& operator()(int a, int b) const { return comps_[slot(a, b)]; }
  ScalarField<Dim>& component(int s) { return comps_[s]; }
  const ScalarField<Dim>& component(int s) const { return comps_[s]; }

 private:
  std::vector<ScalarField<Dim>> comps_;
};

/// Samples f at every node; a non-finite sample is an error naming the node.
template <int Dim, class F>
ScalarField<Dim> sample(const GridSpec<Dim>& grid, F&& f) {
  ScalarField<Dim> out(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point<Dim> r = node_coord(grid, k);
    const double v = f(r);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "sample: non-finite value at node (";
      const auto idx = grid.unflat(k);
      for (int a = 0; a < Dim; ++a) msg << (a ? ", " : "") << idx[a];
      msg << ")";
      throw std::domain_error(msg.str());
    }
    out[k] = v;
  }
  return out;
}

}  // namespace bandext
