#include "obslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "obslab/kernels.hpp"

namespace obslab {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t ipow(std::size_t base, int e) {
  std::size_t out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

std::size_t GridSpec::dofs() const { return ipow(points_per_axis, dim); }

double GridSpec::frequency(std::size_t i) const {
  const auto n = static_cast<long long>(points_per_axis);
  long long k = static_cast<long long>(i);
  if (k >= n / 2) k -= n;
  return std::numbers::pi / half_extent * static_cast<double>(k);
}

Point GridSpec::point(std::size_t flat) const {
  Point p{0.0, 0.0, 0.0};
  for (int a = dim - 1; a >= 0; --a) {
    p[static_cast<std::size_t>(a)] = coordinate(flat % points_per_axis);
    flat /= points_per_axis;
  }
  return p;
}

GridSpec make_grid(int dim, double half_extent, std::size_t points_per_axis, std::size_t dof_budget) {
  if (dim < 1 || dim > 3) throw Error("grid dimension must be 1, 2 or 3");
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) throw Error("grid half extent must be positive");
  if (points_per_axis < 8 || !is_power_of_two(points_per_axis))
    throw Error("points per axis must be a power of two >= 8");
  GridSpec g{dim, half_extent, points_per_axis};
  // Overflow-safe budget check.
  double dofs = std::pow(static_cast<double>(points_per_axis), dim);
  if (dofs > static_cast<double>(dof_budget))
    throw Error("grid exceeds dof budget (" + std::to_string(static_cast<long long>(dofs)) + " > " +
                std::to_string(dof_budget) + ")");
  return g;
}

std::vector<double> radius_squared(const GridSpec& grid) {
  std::vector<double> out(grid.dofs());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point p = grid.point(i);
    out[i] = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
  }
  return out;
}

std::vector<double> frequency_squared(const GridSpec& grid) {
  const std::size_t n = grid.points_per_axis;
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i) axis[i] = grid.frequency(i) * grid.frequency(i);
  std::vector<double> out(grid.dofs());
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t rest = i;
    double s = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      s += axis[rest % n];
      rest /= n;
    }
    out[i] = s;
  }
  return out;
}

Field Field::zeros(const GridSpec& grid) { return Field{grid, std::vector<Complex>(grid.dofs())}; }

bool RegionMask::contains_r2(double r2) const {
  switch (kind) {
    case Kind::ball_interior: return r2 <= radius * radius;
    case Kind::ball_exterior: return r2 > radius * radius;
    case Kind::open_ball: return r2 < radius * radius;
    case Kind::all: return true;
  }
  return false;
}

std::vector<std::uint8_t> RegionMask::indicator(const GridSpec& grid) const {
  const auto r2 = radius_squared(grid);
  std::vector<std::uint8_t> out(r2.size());
  for (std::size_t i = 0; i < r2.size(); ++i) out[i] = contains_r2(r2[i]) ? 1 : 0;
  return out;
}

std::string RegionMask::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::ball_interior: os << "|x|<=" << radius; break;
    case Kind::ball_exterior: os << "|x|>" << radius; break;
    case Kind::open_ball: os << "|x|<" << radius; break;
    case Kind::all: os << "all"; break;
  }
  return os.str();
}

void check_same_grid(const Field& a, const Field& b) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) throw Error("fields live on different grids");
}

double mass(const Field& f) { return kernels::sum_norm2(f.values) * f.grid.cell_volume(); }

double l2_norm(const Field& f) { return std::sqrt(mass(f)); }

Complex inner(const Field& a, const Field& b) {
  check_same_grid(a, b);
  return kernels::dot(a.values, b.values) * a.grid.cell_volume();
}

double mass_in_region(const Field& f, const RegionMask& mask) {
  if (mask.kind == RegionMask::Kind::all) return mass(f);
  const auto keep = mask.indicator(f.grid);
  return kernels::sum_norm2_masked(f.values, keep) * f.grid.cell_volume();
}

Field apply_mask(const Field& f, const RegionMask& mask) {
  Field out = f;
  if (mask.kind == RegionMask::Kind::all) return out;
  const auto keep = mask.indicator(f.grid);
  kernels::mask(out.values, keep);
  return out;
}

double boundary_mass(const Field& f, double layer) {
  const GridSpec& g = f.grid;
  const double edge = (1.0 - layer) * g.half_extent;
  std::vector<std::uint8_t> keep(g.dofs());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const Point p = g.point(i);
    double m = 0.0;
    for (int a = 0; a < g.dim; ++a) m = std::max(m, std::abs(p[static_cast<std::size_t>(a)]));
    keep[i] = m >= edge ? 1 : 0;
  }
  return kernels::sum_norm2_masked(f.values, keep) * g.cell_volume();
}

double support_radius(const Field& f, double rel) {
  double peak = 0.0;
  for (const auto& v : f.values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  const auto r2 = radius_squared(f.grid);
  double r = 0.0;
  for (std::size_t i = 0; i < r2.size(); ++i)
    if (std::abs(f.values[i]) > rel * peak) r = std::max(r, r2[i]);
  return std::sqrt(r);
}

Field concentrate(const Field& f, int k) {
  if (k < 1) throw Error("concentration factor must be a positive integer");
  const GridSpec& g = f.grid;
  if (k == 1) return f;
  const double shrunk = support_radius(f) / k;
  if (shrunk < 8.0 * g.spacing())
    throw Error("concentrated support spans fewer than 8 cells; refine the grid");
  const auto n = static_cast<long long>(g.points_per_axis);
  const long long offset = static_cast<long long>(k - 1) * n / 2;
  const double amp = std::pow(static_cast<double>(k), 0.5 * g.dim);
  Field out = Field::zeros(g);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    std::size_t rest = i;
    std::size_t src = 0;
    std::size_t stride = 1;
    bool inside = true;
    for (int a = 0; a < g.dim; ++a) {
      const auto j = static_cast<long long>(rest % g.points_per_axis);
      rest /= g.points_per_axis;
      const long long m = k * j - offset;
      if (m < 0 || m >= n) {
        inside = false;
        break;
      }
      src += static_cast<std::size_t>(m) * stride;
      stride *= g.points_per_axis;
    }
    if (inside) out.values[i] = amp * f.values[src];
  }
  return out;
}

}  // namespace obslab
