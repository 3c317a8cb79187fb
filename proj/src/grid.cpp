#include "stochaction/grid.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace stochaction {

std::string to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "dirichlet";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "dirichlet" || s == "dirichlet_zero") return Boundary::dirichlet_zero;
  if (s == "periodic") return Boundary::periodic;
  throw ConfigurationError("core_numerics", "unknown boundary kind '" + s + "'");
}

namespace {

void check_axis(const Axis& a) {
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) {
    throw ConfigurationError("core_numerics", "grid extent must be finite");
  }
  if (!(a.hi > a.lo)) throw ConfigurationError("core_numerics", "grid extent must satisfy lo < hi");
  if (a.points < 8) throw ConfigurationError("core_numerics", "grid needs at least 8 points per axis");
}

}  // namespace

SpatialGrid::SpatialGrid(int dim, std::array<Axis, 2> axes) : dim_(dim), axes_(axes) {
  for (int a = 0; a < dim_; ++a) check_axis(axes_[static_cast<std::size_t>(a)]);
}

SpatialGrid SpatialGrid::line(double lo, double hi, std::size_t points) {
  return SpatialGrid(1, {Axis{lo, hi, points}, Axis{0.0, 1.0, 1}});
}

SpatialGrid SpatialGrid::plane(Axis x, Axis y) { return SpatialGrid(2, {x, y}); }

std::size_t SpatialGrid::size() const {
  return dim_ == 2 ? axes_[0].points * axes_[1].points : axes_[0].points;
}

double SpatialGrid::cell_volume() const {
  return dim_ == 2 ? axes_[0].spacing() * axes_[1].spacing() : axes_[0].spacing();
}

Point SpatialGrid::point(std::size_t idx) const {
  if (dim_ == 1) return {axes_[0].center(idx), 0.0};
  return {axes_[0].center(idx / axes_[1].points), axes_[1].center(idx % axes_[1].points)};
}

bool SpatialGrid::contains(const Point& q) const {
  for (int a = 0; a < dim_; ++a) {
    const Axis& ax = axes_[static_cast<std::size_t>(a)];
    const double x = q[static_cast<std::size_t>(a)];
    if (!(x >= ax.lo && x <= ax.hi)) return false;
  }
  return true;
}

template <class T>
bool Field<T>::all_finite() const {
  for (const T& v : values_) {
    if constexpr (std::is_same_v<T, Complex>) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

template class Field<double>;
template class Field<Complex>;
template class Field<unsigned char>;

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* module) {
  if (!(a == b)) throw ConfigurationError(module, "fields are defined on different grids");
}

namespace {

// Lower cell index and fractional weight of the upper neighbour along one axis.
struct AxisWeights {
  std::size_t lower;
  std::size_t upper;
  double frac;
};

AxisWeights axis_weights(const Axis& ax, Boundary boundary, double x) {
  const double h = ax.spacing();
  const double s = (x - ax.lo) / h - 0.5;  // position in units of cell centres
  const auto n = static_cast<long>(ax.points);
  if (boundary == Boundary::periodic) {
    double fl = std::floor(s);
    double frac = s - fl;
    long lo = static_cast<long>(fl) % n;
    if (lo < 0) lo += n;
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>((lo + 1) % n), frac};
  }
  if (s <= 0.0) return {0, 0, 0.0};
  if (s >= static_cast<double>(n - 1)) {
    return {static_cast<std::size_t>(n - 1), static_cast<std::size_t>(n - 1), 0.0};
  }
  const double fl = std::floor(s);
  const auto lo = static_cast<std::size_t>(fl);
  return {lo, lo + 1, s - fl};
}

}  // namespace

InterpolationStencil locate(const SpatialGrid& grid, Boundary boundary, const Point& q) {
  InterpolationStencil st;
  const AxisWeights wx = axis_weights(grid.axis(0), boundary, q[0]);
  if (grid.dim() == 1) {
    st.count = 2;
    st.index = {wx.lower, wx.upper, 0, 0};
    st.weight = {1.0 - wx.frac, wx.frac, 0.0, 0.0};
    return st;
  }
  const AxisWeights wy = axis_weights(grid.axis(1), boundary, q[1]);
  st.count = 4;
  st.index = {grid.flat_index(wx.lower, wy.lower), grid.flat_index(wx.lower, wy.upper),
              grid.flat_index(wx.upper, wy.lower), grid.flat_index(wx.upper, wy.upper)};
  st.weight = {(1.0 - wx.frac) * (1.0 - wy.frac), (1.0 - wx.frac) * wy.frac,
               wx.frac * (1.0 - wy.frac), wx.frac * wy.frac};
  return st;
}

double interpolate(const RealField& f, Boundary boundary, const Point& q) {
  return interpolate(f, locate(f.grid(), boundary, q));
}

std::size_t containing_cell(const SpatialGrid& grid, const Point& q) {
  std::array<std::size_t, 2> ij{0, 0};
  for (int a = 0; a < grid.dim(); ++a) {
    const Axis& ax = grid.axis(a);
    const double s = std::floor((q[static_cast<std::size_t>(a)] - ax.lo) / ax.spacing());
    const double clamped = std::clamp(s, 0.0, static_cast<double>(ax.points - 1));
    ij[static_cast<std::size_t>(a)] = static_cast<std::size_t>(clamped);
  }
  return grid.flat_index(ij[0], ij[1]);
}

}  // namespace stochaction
