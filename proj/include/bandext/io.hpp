// Text serialization: CSV number formatting and legacy VTK structured-points
// field dumps.
//
// Dump layout (ASCII, '\n' line endings):
//   # vtk DataFile Version 3.0
//   <title line>
//   ASCII
//   DATASET STRUCTURED_POINTS
//   DIMENSIONS nx ny nz          (nz = 1 for 2D)
//   ORIGIN x0 y0 z0              (z0 = 0 for 2D)
//   SPACING dx dy dz             (dz = 1 for 2D)
//   POINT_DATA n
// then per array:
//   SCALARS <name> double 1
//   LOOKUP_TABLE default
//   n lines, one value each, x fastest
// Reals are written in shortest round-trip form, so reading a dump back
// reproduces every array bit for bit.
#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bandext/grid.hpp"

namespace bandext {

/// Shortest representation that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Scientific notation with 17 significant digits (CSV convention).
inline std::string format_sci(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

inline double parse_real(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("parse_real: malformed number '" + s + "'");
  return v;
}

/// Grid header plus named node arrays.
struct FieldDump {
  int dim = 2;
  std::array<std::size_t, 3> n{1, 1, 1};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::vector<std::pair<std::string, std::vector<double>>> arrays;

  std::size_t points() const { return n[0] * n[1] * n[2]; }

  const std::vector<double>& array(const std::string& name) const {
    for (const auto& [k, v] : arrays)
      if (k == name) return v;
    throw std::out_of_range("FieldDump: no array named '" + name + "'");
  }

  template <int Dim>
  static FieldDump for_grid(const GridSpec<Dim>& g) {
    FieldDump d;
    d.dim = Dim;
    for (int a = 0; a < Dim; ++a) {
      d.n[a] = g.n(a);
      d.origin[a] = g.lo(a);
      d.spacing[a] = g.h(a);
    }
    return d;
  }

  template <int Dim>
  void add(const std::string& name, const ScalarField<Dim>& f) {
    if (f.size() != points()) throw std::invalid_argument("FieldDump: array size does not match header");
    arrays.emplace_back(name, f.values());
  }
};

inline void write_dump(std::ostream& os, const FieldDump& d, const std::string& title = "bandext field dump") {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << d.n[0] << ' ' << d.n[1] << ' ' << d.n[2] << '\n';
  os << "ORIGIN " << format_real(d.origin[0]) << ' ' << format_real(d.origin[1]) << ' '
     << format_real(d.origin[2]) << '\n';
  os << "SPACING " << format_real(d.spacing[0]) << ' ' << format_real(d.spacing[1]) << ' '
     << format_real(d.spacing[2]) << '\n';
  os << "POINT_DATA " << d.points() << '\n';
  for (const auto& [name, values] : d.arrays) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) os << format_real(v) << '\n';
  }
}

inline FieldDump read_dump(std::istream& is) {
  auto expect = [](bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error("read_dump: " + what);
  };
  std::string line, tok;
  expect(static_cast<bool>(std::getline(is, line)) && line.rfind("# vtk DataFile", 0) == 0, "missing vtk header");
  expect(static_cast<bool>(std::getline(is, line)), "missing title");
  expect(std::getline(is, line) && line == "ASCII", "only ASCII dumps are supported");
  expect(std::getline(is, line) && line == "DATASET STRUCTURED_POINTS", "expected STRUCTURED_POINTS");

  FieldDump d;
  is >> tok;
  expect(tok == "DIMENSIONS", "expected DIMENSIONS");
  is >> d.n[0] >> d.n[1] >> d.n[2];
  auto read3 = [&](const char* key, std::array<double, 3>& out) {
    is >> tok;
    expect(tok == key, std::string("expected ") + key);
    for (auto& v : out) {
      is >> tok;
      v = parse_real(tok);
    }
  };
  read3("ORIGIN", d.origin);
  read3("SPACING", d.spacing);
  std::size_t count = 0;
  is >> tok >> count;
  expect(tok == "POINT_DATA" && count == d.points(), "POINT_DATA count does not match DIMENSIONS");
  d.dim = d.n[2] == 1 ? 2 : 3;

  while (is >> tok) {
    expect(tok == "SCALARS", "expected SCALARS, got '" + tok + "'");
    std::string name, type, table, def;
    int ncomp = 0;
    is >> name >> type >> ncomp >> table >> def;
    expect(type == "double" && ncomp == 1 && table == "LOOKUP_TABLE", "unsupported SCALARS block '" + name + "'");
    std::vector<double> values(count);
    for (auto& v : values) {
      expect(static_cast<bool>(is >> tok), "truncated array '" + name + "'");
      v = parse_real(tok);
    }
    d.arrays.emplace_back(std::move(name), std::move(values));
  }
  return d;
}

inline void write_dump_file(const std::string& path, const FieldDump& d) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dump(os, d);
}

inline FieldDump read_dump_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "' for reading");
  return read_dump(is);
}

}  // namespace bandext
