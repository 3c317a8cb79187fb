#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stochaction/errors.hpp"

namespace stochaction {

using Complex = std::complex<double>;

// A configuration-space point. Only the first `dim` components are used.
using Point = std::array<double, 2>;

enum class Boundary { dirichlet_zero, periodic };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

// One axis of a cell-centred uniform grid: `points` cells of width
// (hi - lo) / points, centres at lo + (j + 1/2) h.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 8;

  double spacing() const { return (hi - lo) / static_cast<double>(points); }
  double center(std::size_t j) const { return lo + (static_cast<double>(j) + 0.5) * spacing(); }
  double length() const { return hi - lo; }

  bool operator==(const Axis&) const = default;
};

// Uniform cell-centred discretization of a 1D or 2D configuration space.
// Storage is row-major: index = ix * ny + iy, so the last axis is contiguous.
class SpatialGrid {
 public:
  SpatialGrid() = default;

  static SpatialGrid line(double lo, double hi, std::size_t points);
  static SpatialGrid plane(Axis x, Axis y);

  int dim() const { return dim_; }
  const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  std::size_t points(int a) const { return axis(a).points; }
  double spacing(int a) const { return axis(a).spacing(); }
  std::size_t size() const;
  double cell_volume() const;

  // Distance in flat index between neighbours along `a`.
  std::size_t stride(int a) const { return (dim_ == 2 && a == 0) ? axes_[1].points : 1; }
  // Cell index along axis `a` of flat index `idx`.
  std::size_t coordinate_index(std::size_t idx, int a) const {
    return (idx / stride(a)) % points(a);
  }
  std::size_t flat_index(std::size_t ix, std::size_t iy = 0) const {
    return dim_ == 2 ? ix * axes_[1].points + iy : ix;
  }
  Point point(std::size_t idx) const;
  bool contains(const Point& q) const;

  bool operator==(const SpatialGrid&) const = default;

 private:
  SpatialGrid(int dim, std::array<Axis, 2> axes);

  int dim_ = 1;
  std::array<Axis, 2> axes_{};
};

// Values sampled at grid cell centres.
template <class T>
class Field {
 public:
  Field() = default;
  explicit Field(SpatialGrid grid, T fill = T{}) : grid_(grid), values_(grid.size(), fill) {}
  Field(SpatialGrid grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw ConfigurationError("core_numerics", "field value count does not match grid size");
    }
  }

  template <class F>
  static Field sample(const SpatialGrid& grid, F&& f) {
    Field out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.point(i));
    return out;
  }

  const SpatialGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;

 private:
  SpatialGrid grid_;
  std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;
using MaskField = Field<unsigned char>;

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* module);

// Cells and weights for multilinear interpolation at an arbitrary point.
// Points in the outer half-cell are clamped to the edge centre (Dirichlet)
// or wrapped (periodic).
struct InterpolationStencil {
  std::array<std::size_t, 4> index{};
  std::array<double, 4> weight{};
  int count = 0;
};

InterpolationStencil locate(const SpatialGrid& grid, Boundary boundary, const Point& q);

inline double interpolate(const RealField& f, const InterpolationStencil& s) {
  double v = 0.0;
  for (int k = 0; k < s.count; ++k) v += s.weight[k] * f[s.index[k]];
  return v;
}

double interpolate(const RealField& f, Boundary boundary, const Point& q);

// Index of the cell containing q, clamped to the grid.
std::size_t containing_cell(const SpatialGrid& grid, const Point& q);

}  // namespace stochaction
