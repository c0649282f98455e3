#include "obslab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "obslab/kernels.hpp"

namespace obslab {

namespace {

constexpr double kDilationStep = 1e-4;

Point dilate(const Point& x, double f) { return {x[0] * f, x[1] * f, x[2] * f}; }

std::vector<double> sample(const GridSpec& g, const std::function<double(const Point&)>& fn) {
  std::vector<double> out(g.dofs());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(g.point(i));
  return out;
}

// Frequency along `axis` for every flat index (FFT order).
std::vector<double> axis_frequency(const GridSpec& g, int axis) {
  std::vector<double> out(g.dofs());
  std::size_t stride = 1;
  for (int a = g.dim - 1; a > axis; --a) stride *= g.points_per_axis;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t j = (i / stride) % g.points_per_axis;
    const bool nyquist = j == g.points_per_axis / 2;
    out[i] = nyquist ? 0.0 : g.frequency(j);
  }
  return out;
}

Field spectral_derivative(const Field& f, int axis) {
  const auto xi = axis_frequency(f.grid, axis);
  FourierTransform fft(f.grid);
  Field out = f;
  fft.forward(out.values);
  for (std::size_t i = 0; i < xi.size(); ++i) out.values[i] *= Complex(0.0, xi[i]);
  fft.inverse(out.values);
  return out;
}

}  // namespace

double PotentialSpec::dilation_derivative(const Point& x) const {
  if (radial_derivative) return radial_derivative(x);
  const double e = kDilationStep;
  return ((*this)(dilate(x, 1.0 + e)) - (*this)(dilate(x, 1.0 - e))) / (2.0 * e);
}

double PotentialSpec::dilation_second_derivative(const Point& x) const {
  const double e = kDilationStep;
  return (dilation_derivative(dilate(x, 1.0 + e)) - dilation_derivative(dilate(x, 1.0 - e))) / (2.0 * e);
}

PotentialSpec PotentialSpec::scaled(double R) const {
  PotentialSpec out;
  std::ostringstream os;
  os << name << "@" << R;
  out.name = os.str();
  auto base = *this;
  out.value = [base, R](const Point& x) { return R * R * base(dilate(x, R)); };
  if (radial_derivative) {
    auto d = radial_derivative;
    out.radial_derivative = [d, R](const Point& x) { return R * R * d(dilate(x, R)); };
  }
  return out;
}

PotentialSpec make_potential(const std::string& raw, double beta, double c, double rho) {
  std::string name = raw;
  const auto paren = raw.find('(');
  if (paren != std::string::npos) {
    const auto close = raw.find(')', paren);
    if (close == std::string::npos) throw Error("malformed potential name: " + raw);
    name = raw.substr(0, paren);
    c = std::stod(raw.substr(paren + 1, close - paren - 1));
  }
  auto r2 = [](const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; };
  PotentialSpec v;
  v.name = raw;
  if (name == "zero") {
    v.value = [](const Point&) { return 0.0; };
    v.radial_derivative = [](const Point&) { return 0.0; };
  } else if (name == "gaussian_repulsive" || name == "gaussian_well") {
    const double b = name == "gaussian_well" ? -beta : beta;
    v.value = [b, r2](const Point& x) { return b * std::exp(-r2(x)); };
    v.radial_derivative = [b, r2](const Point& x) { return -2.0 * b * r2(x) * std::exp(-r2(x)); };
  } else if (name == "ball_indicator") {
    v.value = [beta, r2](const Point& x) { return r2(x) <= 1.0 ? beta : 0.0; };
  } else if (name == "inverse_square") {
    v.value = [c, rho, r2](const Point& x) { return -c / (r2(x) + rho * rho); };
    v.radial_derivative = [c, rho, r2](const Point& x) {
      const double d = r2(x) + rho * rho;
      return 2.0 * c * r2(x) / (d * d);
    };
  } else {
    throw Error("unknown potential: " + raw);
  }
  return v;
}

std::string to_string(HamiltonianKind k) {
  switch (k) {
    case HamiltonianKind::free: return "free";
    case HamiltonianKind::fractional: return "fractional";
    case HamiltonianKind::potential: return "potential";
    case HamiltonianKind::inverse_square: return "inverse_square";
  }
  return "?";
}

std::string to_string(KineticConvention c) { return c == KineticConvention::half ? "half" : "full"; }

HamiltonianKind hamiltonian_kind_from_string(const std::string& s) {
  if (s == "free") return HamiltonianKind::free;
  if (s == "fractional") return HamiltonianKind::fractional;
  if (s == "potential") return HamiltonianKind::potential;
  if (s == "inverse_square") return HamiltonianKind::inverse_square;
  throw Error("unknown hamiltonian kind: " + s);
}

KineticConvention convention_from_string(const std::string& s) {
  if (s == "full") return KineticConvention::full;
  if (s == "half") return KineticConvention::half;
  throw Error("unknown kinetic convention: " + s);
}

HamiltonianSpec HamiltonianSpec::free(const GridSpec& g, KineticConvention conv) {
  HamiltonianSpec h;
  h.kind = HamiltonianKind::free;
  h.grid = g;
  h.convention = conv;
  return h;
}

HamiltonianSpec HamiltonianSpec::fractional(const GridSpec& g, double s, KineticConvention conv) {
  if (!(s >= 1.0) || !std::isfinite(s)) throw Error("fractional exponent must satisfy s >= 1");
  HamiltonianSpec h = free(g, conv);
  h.kind = HamiltonianKind::fractional;
  h.exponent = s;
  return h;
}

HamiltonianSpec HamiltonianSpec::with_potential(const GridSpec& g, PotentialSpec v, KineticConvention conv) {
  if (!v.value) throw Error("potential has no value function");
  HamiltonianSpec h = free(g, conv);
  h.kind = HamiltonianKind::potential;
  h.potential = std::move(v);
  return h;
}

HamiltonianSpec HamiltonianSpec::inverse_square(const GridSpec& g, double c, KineticConvention conv) {
  const double hardy = (g.dim - 2.0) * (g.dim - 2.0) / 4.0;
  if (!(c < hardy)) throw Error("inverse-square coupling must lie below the Hardy constant (n-2)^2/4");
  HamiltonianSpec h = free(g, conv);
  h.kind = HamiltonianKind::inverse_square;
  h.coupling = c;
  h.potential = make_potential("inverse_square", 0.0, c, 2.0 * g.spacing());
  return h;
}

double HamiltonianSpec::group_velocity(double theta) const {
  const double f = kinetic_factor();
  const double s = symbol_exponent();
  if (theta <= 0.0) return 0.0;
  return f * s * std::pow(theta / f, (s - 1.0) / s);
}

std::string HamiltonianSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind) << "[" << to_string(convention);
  if (kind == HamiltonianKind::fractional) os << ",s=" << exponent;
  if (kind == HamiltonianKind::inverse_square) os << ",c=" << coupling;
  if (kind == HamiltonianKind::potential && potential) os << ",V=" << potential->name;
  os << "] dim=" << grid.dim << " L=" << grid.half_extent << " n=" << grid.points_per_axis;
  return os.str();
}

std::vector<double> kinetic_symbol(const HamiltonianSpec& h) {
  auto xi2 = frequency_squared(h.grid);
  const double f = h.kinetic_factor();
  if (h.kind == HamiltonianKind::fractional) {
    const double e = h.exponent / 2.0;
    for (auto& v : xi2) v = f * std::pow(v, e);
  } else {
    for (auto& v : xi2) v *= f;
  }
  return xi2;
}

std::vector<double> sample_potential(const HamiltonianSpec& h) {
  if (!h.has_potential() || !h.potential) return std::vector<double>(h.grid.dofs(), 0.0);
  const auto& v = *h.potential;
  return sample(h.grid, [&v](const Point& x) { return v(x); });
}

HamiltonianOperator::HamiltonianOperator(const HamiltonianSpec& h)
    : spec_(h), fft_(h.grid), symbol_(kinetic_symbol(h)), potential_(sample_potential(h)) {}

Field HamiltonianOperator::apply(const Field& f) const {
  if (!(f.grid == spec_.grid)) throw Error("field and hamiltonian use different grids");
  Field out = f;
  fft_.forward(out.values);
  kernels::scale(out.values, symbol_);
  fft_.inverse(out.values);
  if (spec_.has_potential())
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += potential_[i] * f.values[i];
  return out;
}

Field apply_h(const HamiltonianSpec& h, const Field& f) { return HamiltonianOperator(h).apply(f); }

Eigen::MatrixXd dense_matrix(const HamiltonianSpec& h) {
  const std::size_t n = h.grid.dofs();
  if (n > kDenseDofLimit) throw Error("dense assembly exceeds " + std::to_string(kDenseDofLimit) + " dofs");
  Eigen::MatrixXd m(n, n);
  const auto v = sample_potential(h);
  if (h.grid.dim == 1) {
    std::vector<Complex> col(n);
    const auto sym = kinetic_symbol(h);
    for (std::size_t i = 0; i < n; ++i) col[i] = sym[i];
    FourierTransform(h.grid).inverse(col);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) m(j, l) = col[(j + n - l) % n].real();
    for (std::size_t j = 0; j < n; ++j) m(j, j) += v[j];
  } else {
    HamiltonianOperator op(h);
    Field e = Field::zeros(h.grid);
    for (std::size_t l = 0; l < n; ++l) {
      std::fill(e.values.begin(), e.values.end(), Complex(0.0));
      e.values[l] = 1.0;
      const Field col = op.apply(e);
      for (std::size_t j = 0; j < n; ++j) m(j, l) = col.values[j].real();
    }
  }
  return 0.5 * (m + m.transpose());
}

HamiltonianSpec scale_hamiltonian(const HamiltonianSpec& h, double R) {
  if (!(R > 0.0)) throw Error("scale must be positive");
  if (h.kind != HamiltonianKind::potential) return h;
  return HamiltonianSpec::with_potential(h.grid, h.potential->scaled(R), h.convention);
}

double kato_norm(const PotentialSpec& v, const GridSpec& g) {
  if (g.dim != 3) throw Error("Kato norm needs a 3-D grid");
  const std::size_t n = g.points_per_axis;
  const std::size_t m = 2 * n;
  const GridSpec pad = make_grid(3, 2.0 * g.half_extent, m);
  const double h = g.spacing();
  const double cell = h * h * h;
  const double a = std::cbrt(3.0 * cell / (4.0 * std::numbers::pi));

  std::vector<Complex> src(pad.dofs(), 0.0), ker(pad.dofs(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double val = std::abs(v(g.point((i * n + j) * n + k)));
        if (!std::isfinite(val)) return std::numeric_limits<double>::infinity();
        src[(i * m + j) * m + k] = val;
      }
  auto wrap = [m](std::size_t i) { return i < m / 2 ? static_cast<double>(i) : static_cast<double>(i) - m; };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        const double r = h * std::sqrt(wrap(i) * wrap(i) + wrap(j) * wrap(j) + wrap(k) * wrap(k));
        ker[(i * m + j) * m + k] = r == 0.0 ? 2.0 * std::numbers::pi * a * a : cell / r;
      }
  FourierTransform fft(pad);
  fft.forward(src);
  fft.forward(ker);
  kernels::multiply(src, ker);
  fft.inverse(src);
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) best = std::max(best, src[(i * m + j) * m + k].real());
  return best;
}

RepulsivityDiagnostic check_repulsive(const PotentialSpec& v, const GridSpec& g, std::uint64_t seed,
                                      double tolerance, int samples) {
  RepulsivityDiagnostic out;
  out.min_value = std::numeric_limits<double>::infinity();
  std::array<std::vector<double>, 3> weight;
  weight[0] = sample(g, [&v](const Point& x) { return v(x); });
  weight[1] = sample(g, [&v](const Point& x) { return v.dilation_derivative(x); });
  weight[2] = sample(g, [&v](const Point& x) { return v.dilation_second_derivative(x); });
  for (double d : weight[1]) out.min_value = std::min(out.min_value, -d);
  out.repulsive = out.min_value >= -tolerance;

  const auto sym = kinetic_symbol(HamiltonianSpec::free(g, KineticConvention::half));
  const auto xi2 = frequency_squared(g);
  double xi_max = 0.0;
  for (double x : xi2) xi_max = std::max(xi_max, x);
  const double band2 = xi_max / 16.0;  // |xi| <= xi_max / 4

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  FourierTransform fft(g);
  for (int s = 0; s < samples; ++s) {
    Field f = Field::zeros(g);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (xi2[i] <= band2) f.values[i] = Complex(normal(rng), normal(rng));
    fft.inverse(f.values);
    Field h0f = f;
    fft.forward(h0f.values);
    kernels::scale(h0f.values, sym);
    fft.inverse(h0f.values);
    const double denom = l2_norm(h0f) + l2_norm(f);
    for (int k = 0; k < 3; ++k) {
      Field w = f;
      kernels::scale(w.values, weight[static_cast<std::size_t>(k)]);
      out.relative_bounds[static_cast<std::size_t>(k)] =
          std::max(out.relative_bounds[static_cast<std::size_t>(k)], l2_norm(w) / denom);
    }
  }
  return out;
}

Eigen::MatrixXcd momentum_matrix(const GridSpec& g, bool zero_nyquist) {
  if (g.dim != 1) throw Error("momentum matrix is built on 1-D grids");
  const std::size_t n = g.points_per_axis;
  if (n > kDenseDofLimit) throw Error("dense assembly exceeds " + std::to_string(kDenseDofLimit) + " dofs");
  std::vector<Complex> col(n);
  for (std::size_t k = 0; k < n; ++k) col[k] = (zero_nyquist && k == n / 2) ? 0.0 : g.frequency(k);
  FourierTransform(g).inverse(col);
  Eigen::MatrixXcd p(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) p(j, l) = col[(j + n - l) % n];
  return p;
}

DilationMatrix dilation_generator(const GridSpec& g) {
  const Eigen::MatrixXcd p = momentum_matrix(g, true);
  const std::size_t n = g.points_per_axis;
  Eigen::VectorXd x(n);
  for (std::size_t j = 0; j < n; ++j) x(j) = g.coordinate(j);
  const Eigen::MatrixXcd a = 0.5 * (x.asDiagonal() * p + p * x.asDiagonal());
  DilationMatrix out;
  out.hermiticity_defect = (a - a.adjoint()).norm() / a.norm();
  out.matrix = 0.5 * (a + a.adjoint());
  return out;
}

HardyResult hardy_check(const Field& f) {
  const GridSpec& g = f.grid;
  const auto r2 = radius_squared(g);
  double weighted = 0.0;
  for (std::size_t i = 0; i < r2.size(); ++i)
    if (r2[i] > 0.0) weighted += std::norm(f.values[i]) / r2[i];
  if (g.dim != 3) throw Error("Hardy check runs on 3-D grids");
  HardyResult out;
  out.lhs = weighted * g.cell_volume();
  for (int a = 0; a < g.dim; ++a) out.rhs += mass(spectral_derivative(f, a));
  out.rhs *= 4.0 / ((g.dim - 2.0) * (g.dim - 2.0));
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-3);
  return out;
}

}  // namespace obslab
