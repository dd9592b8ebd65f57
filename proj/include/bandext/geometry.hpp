// Analytic level-set shapes, interface normals, discrete Heaviside masks and
// narrow-band membership. phi < 0 inside the domain, phi > 0 outside.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bandext/grid.hpp"
#include "bandext/stencils.hpp"

namespace bandext {

template <int Dim>
struct Ball {
  Point<Dim> center{};
  double radius = 0.501;

  double operator()(const Point<Dim>& r) const {
    double s = 0.0;
    for (int a = 0; a < Dim; ++a) s += (r[a] - center[a]) * (r[a] - center[a]);
    return std::sqrt(s) - radius;
  }
};

struct Disk2D {
  static constexpr int dim = 2;
  Ball<2> ball{{0.0, 0.0}, 0.501};
  double operator()(const Point<2>& r) const { return ball(r); }
};

/// Five-petal star: rho - radius - amplitude * sin(5 theta).
struct Star2D {
  static constexpr int dim = 2;
  double radius = 0.501;
  double amplitude = 0.25;
  double operator()(const Point<2>& r) const {
    const double x = r[0], y = r[1];
    const double rho2 = x * x + y * y;
    const double rho = std::sqrt(rho2);
    if (rho == 0.0) return -radius;
    const double x2 = x * x, y2 = y * y;
    const double num = y2 * y2 * y + 5.0 * x2 * x2 * y - 10.0 * x2 * y2 * y;
    return rho - radius - amplitude * num / (rho2 * rho2 * rho);
  }
};

struct Union2D {
  static constexpr int dim = 2;
  Ball<2> first{{-0.1, -0.3}, 0.501};
  Ball<2> second{{0.2, 0.2}, 0.401};
  double operator()(const Point<2>& r) const { return std::min(first(r), second(r)); }
};

struct Intersection2D {
  static constexpr int dim = 2;
  Ball<2> first{{0.0, 0.0}, 0.501};
  Ball<2> second{{0.4, 0.3}, 0.401};
  double operator()(const Point<2>& r) const { return std::max(first(r), second(r)); }
};

struct Sphere3D {
  static constexpr int dim = 3;
  Ball<3> ball{{0.0, 0.0, 0.0}, 0.501};
  double operator()(const Point<3>& r) const { return ball(r); }
};

/// Star petals modulated along z by cos(pi z / (2 radius)).
struct Star3D {
  static constexpr int dim = 3;
  double radius = 0.501;
  double amplitude = 0.15;
  double operator()(const Point<3>& r) const {
    const double x = r[0], y = r[1], z = r[2];
    const double rho2 = x * x + y * y + z * z;
    const double rho = std::sqrt(rho2);
    if (rho == 0.0) return -radius;
    const double x2 = x * x, y2 = y * y;
    const double num = y2 * y2 * y + 5.0 * x2 * x2 * y - 10.0 * x2 * y2 * y;
    return rho - radius -
           amplitude * num / (rho2 * rho2 * rho) * std::cos(0.5 * std::numbers::pi * z / radius);
  }
};

struct Union3D {
  static constexpr int dim = 3;
  Ball<3> first{{-0.1, -0.3, -0.2}, 0.501};
  Ball<3> second{{0.2, 0.2, 0.1}, 0.401};
  double operator()(const Point<3>& r) const { return std::min(first(r), second(r)); }
};

struct Intersection3D {
  static constexpr int dim = 3;
  Ball<3> first{{0.0, 0.0, 0.0}, 0.501};
  Ball<3> second{{0.4, 0.3, 0.2}, 0.401};
  double operator()(const Point<3>& r) const { return std::max(first(r), second(r)); }
};

using Shape = std::variant<Disk2D, Star2D, Union2D, Intersection2D, Sphere3D, Star3D, Union3D, Intersection3D>;

inline constexpr std::array<std::string_view, 8> kShapeKeys = {
    "disk2d", "star2d", "union2d", "intersection2d", "sphere3d", "star3d", "union3d", "intersection3d"};

/// Shape with default constants for a CLI key; unknown keys throw.
inline Shape make_shape(std::string_view key) {
  if (key == "disk2d") return Disk2D{};
  if (key == "star2d") return Star2D{};
  if (key == "union2d") return Union2D{};
  if (key == "intersection2d") return Intersection2D{};
  if (key == "sphere3d") return Sphere3D{};
  if (key == "star3d") return Star3D{};
  if (key == "union3d") return Union3D{};
  if (key == "intersection3d") return Intersection3D{};
  throw std::invalid_argument("unknown shape '" + std::string(key) + "'");
}

inline int shape_dim(const Shape& s) {
  return std::visit([](const auto& sh) { return std::decay_t<decltype(sh)>::dim; }, s);
}

/// Samples a shape's level set on the grid. The shape's dimension must match.
template <int Dim>
ScalarField<Dim> eval_shape(const Shape& shape, const GridSpec<Dim>& grid) {
  return std::visit(
      [&](const auto& sh) -> ScalarField<Dim> {
        if constexpr (std::decay_t<decltype(sh)>::dim == Dim) {
          return sample(grid, sh);
        } else {
          throw std::invalid_argument("eval_shape: shape dimension does not match grid");
        }
      },
      shape);
}

/// Unit normals grad(phi)/|grad(phi)| by central differences (one-sided at the
/// box boundary). Where |grad(phi)| < 1e-10 max(h) the normal is zero; the
/// number of such nodes is written to *degenerate when given.
template <int Dim>
VectorField<Dim> compute_normals(const ScalarField<Dim>& phi, std::size_t* degenerate = nullptr) {
  const auto& g = phi.grid();
  VectorField<Dim> n(g);
  const double eps = 1e-10 * g.max_h();
  std::size_t count = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.unflat(k);
    Point<Dim> grad;
    double norm2 = 0.0;
    for (int a = 0; a < Dim; ++a) {
      grad[a] = d1(phi, idx, k, a);
      norm2 += grad[a] * grad[a];
    }
    const double norm = std::sqrt(norm2);
    if (norm < eps) {
      ++count;
      continue;
    }
    for (int a = 0; a < Dim; ++a) n[a][k] = grad[a] / norm;
  }
  if (degenerate) *degenerate = count;
  return n;
}

/// Node-wise 0/1 field.
template <int Dim>
class Mask {
 public:
  explicit Mask(const GridSpec<Dim>& grid, std::uint8_t value = 0) : grid_(grid), bits_(grid.size(), value) {}

  const GridSpec<Dim>& grid() const { return grid_; }
  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t k) const { return bits_[k]; }
  void set(std::size_t k, bool v) { bits_[k] = v ? 1 : 0; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto b : bits_) c += b;
    return c;
  }
  ScalarField<Dim> to_field() const {
    ScalarField<Dim> f(grid_);
    for (std::size_t k = 0; k < bits_.size(); ++k) f[k] = bits_[k];
    return f;
  }

 private:
  GridSpec<Dim> grid_;
  std::vector<std::uint8_t> bits_;
};

/// Strict requires phi <= 0 at the node itself as well as at its neighbors
/// for a mask value of 0. PaperLiteral checks the neighbors only.
enum class MaskRule { Strict, PaperLiteral };

template <int Dim>
struct MaskSet {
  Mask<Dim> h_phi;   // 1 where phi > 0
  Mask<Dim> h_grad;  // 0 where first derivatives of data are trustworthy
  Mask<Dim> h_hess;  // 0 where second derivatives of data are trustworthy
};

/// h_grad checks the 2*Dim face neighbors; h_hess checks the whole 3^Dim
/// block. Nodes on the box boundary always get 1 in h_grad and h_hess.
template <int Dim>
MaskSet<Dim> build_masks(const ScalarField<Dim>& phi, MaskRule rule = MaskRule::Strict) {
  const auto& g = phi.grid();
  MaskSet<Dim> m{Mask<Dim>(g), Mask<Dim>(g, 1), Mask<Dim>(g, 1)};

  // Offsets of the 3^Dim block minus the center, flagged face/non-face.
  std::vector<std::ptrdiff_t> face, other;
  const int block = Dim == 2 ? 9 : 27;
  for (int c = 0; c < block; ++c) {
    int rem = c, nonzero = 0;
    std::ptrdiff_t off = 0;
    for (int a = 0; a < Dim; ++a) {
      const int d = rem % 3 - 1;
      rem /= 3;
      nonzero += d != 0;
      off += d * static_cast<std::ptrdiff_t>(g.stride(a));
    }
    if (nonzero == 1) face.push_back(off);
    else if (nonzero > 1) other.push_back(off);
  }

  const double* p = phi.data();
  for (std::size_t k = 0; k < g.size(); ++k) {
    m.h_phi.set(k, p[k] > 0.0);
    if (g.on_boundary(g.unflat(k))) continue;
    bool grad_ok = rule == MaskRule::PaperLiteral || p[k] <= 0.0;
    for (auto off : face) grad_ok = grad_ok && p[k + off] <= 0.0;
    bool hess_ok = grad_ok;
    for (auto off : other) hess_ok = hess_ok && p[k + off] <= 0.0;
    m.h_grad.set(k, !grad_ok);
    m.h_hess.set(k, !hess_ok);
  }
  return m;
}

enum class BandKind {
  Exterior,  // 0 < phi <= width
  TwoSided,  // |phi| <= width
};

template <int Dim>
Mask<Dim> band_mask(const ScalarField<Dim>& phi, double width, BandKind kind) {
  if (!(width > 0.0)) throw std::invalid_argument("band_mask: width must be positive");
  Mask<Dim> band(phi.grid());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double v = phi[k];
    band.set(k, kind == BandKind::Exterior ? (v > 0.0 && v <= width) : std::abs(v) <= width);
  }
  return band;
}

/// True when some box-boundary node lies in the two-sided band.
template <int Dim>
bool band_touches_boundary(const ScalarField<Dim>& phi, double width) {
  const auto& g = phi.grid();
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(phi[k]) <= width && g.on_boundary(g.unflat(k))) return true;
  return false;
}

}  // namespace bandext
