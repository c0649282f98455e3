#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace obslab {

using Complex = std::complex<double>;
using Point = std::array<double, 3>;

/// Thrown for invalid inputs and violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultDofBudget = std::size_t{1} << 22;

/// Periodic box [-L, L)^dim sampled with n points per axis.
struct GridSpec {
  int dim = 1;
  double half_extent = 1.0;
  std::size_t points_per_axis = 8;

  double spacing() const { return 2.0 * half_extent / static_cast<double>(points_per_axis); }
  double cell_volume() const;
  std::size_t dofs() const;
  double coordinate(std::size_t i) const { return -half_extent + static_cast<double>(i) * spacing(); }
  /// Angular frequency of FFT bin i (FFT ordering, Nyquist bin negative).
  double frequency(std::size_t i) const;
  /// Point with unused trailing components set to zero.
  Point point(std::size_t flat) const;

  bool operator==(const GridSpec&) const = default;
};

/// Validates and builds a grid. Throws when n is not a power of two >= 8,
/// dim is outside 1..3 or the dof count exceeds the budget.
GridSpec make_grid(int dim, double half_extent, std::size_t points_per_axis,
                   std::size_t dof_budget = kDefaultDofBudget);

/// Per-point |x|^2 in flat (row-major, axis 0 slowest) order.
std::vector<double> radius_squared(const GridSpec& grid);

/// Per-bin |xi|^2 in FFT order.
std::vector<double> frequency_squared(const GridSpec& grid);

struct Field {
  GridSpec grid;
  std::vector<Complex> values;

  static Field zeros(const GridSpec& grid);

  template <class F>
  static Field sample(const GridSpec& grid, F&& f) {
    Field out = zeros(grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = Complex(f(grid.point(i)));
    return out;
  }

  std::size_t size() const { return values.size(); }
  std::span<Complex> span() { return values; }
  std::span<const Complex> span() const { return values; }
};

/// Region used for masks. Boundary points with |x| == R belong to the
/// closed interior; `open_ball` excludes them.
struct RegionMask {
  enum class Kind { ball_interior, ball_exterior, open_ball, all };
  Kind kind = Kind::all;
  double radius = 0.0;

  static RegionMask interior(double r) { return {Kind::ball_interior, r}; }
  static RegionMask exterior(double r) { return {Kind::ball_exterior, r}; }
  static RegionMask open(double r) { return {Kind::open_ball, r}; }
  static RegionMask everywhere() { return {Kind::all, 0.0}; }

  bool contains_r2(double r2) const;
  /// 0/1 indicator in flat order.
  std::vector<std::uint8_t> indicator(const GridSpec& grid) const;
  std::string describe() const;
};

double l2_norm(const Field& f);
double mass(const Field& f);
Complex inner(const Field& a, const Field& b);
double mass_in_region(const Field& f, const RegionMask& mask);
Field apply_mask(const Field& f, const RegionMask& mask);

/// Mass within the outer `layer` fraction of the box (max_i |x_i| >= (1-layer) L).
double boundary_mass(const Field& f, double layer = 0.1);

/// Discrete version of U_k f(x) = k^{dim/2} f(k x) for integer k >= 1.
/// Sample j reads the source sample at k j - (k-1) n/2 when that index is on
/// the grid and zero otherwise. Throws when the shrunk support would span
/// fewer than 8 cells.
Field concentrate(const Field& f, int k);

/// Largest |x| among samples with |f| above `rel` times the peak.
double support_radius(const Field& f, double rel = 1e-12);

void check_same_grid(const Field& a, const Field& b);

}  // namespace obslab
