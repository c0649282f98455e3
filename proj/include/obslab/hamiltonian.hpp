#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "obslab/fft.hpp"
#include "obslab/grid.hpp"

namespace obslab {

/// A real potential V and optionally its radial derivative x . grad V.
/// When the derivative is missing it is taken by a centered difference in
/// the dilation parameter, (V((1+e)x) - V((1-e)x)) / (2e).
struct PotentialSpec {
  std::string name = "zero";
  std::function<double(const Point&)> value;
  std::function<double(const Point&)> radial_derivative;

  double operator()(const Point& x) const { return value ? value(x) : 0.0; }
  double dilation_derivative(const Point& x) const;
  /// (x . grad)^2 V, by differencing dilation_derivative.
  double dilation_second_derivative(const Point& x) const;

  /// x -> R^2 V(R x)
  PotentialSpec scaled(double R) const;
};

/// Named potentials: zero, gaussian_repulsive (beta e^{-|x|^2}),
/// gaussian_well (-beta e^{-|x|^2}), ball_indicator (beta on |x| <= 1),
/// inverse_square (-c / (|x|^2 + rho^2)). A literal "inverse_square(0.2)"
/// sets c.
PotentialSpec make_potential(const std::string& name, double beta = 1.0, double c = 0.0, double rho = 0.0);

enum class HamiltonianKind { free, fractional, potential, inverse_square };
/// full: symbol |xi|^s. half: (1/2)|xi|^s.
enum class KineticConvention { full, half };

std::string to_string(HamiltonianKind k);
std::string to_string(KineticConvention c);
HamiltonianKind hamiltonian_kind_from_string(const std::string& s);
KineticConvention convention_from_string(const std::string& s);

struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::free;
  GridSpec grid;
  KineticConvention convention = KineticConvention::full;
  double exponent = 2.0;  // s, fractional only
  double coupling = 0.0;  // c, inverse_square only
  std::optional<PotentialSpec> potential;

  static HamiltonianSpec free(const GridSpec& g, KineticConvention conv = KineticConvention::full);
  static HamiltonianSpec fractional(const GridSpec& g, double s, KineticConvention conv = KineticConvention::full);
  static HamiltonianSpec with_potential(const GridSpec& g, PotentialSpec v,
                                        KineticConvention conv = KineticConvention::full);
  /// -Delta - c / (|x|^2 + rho^2) with rho two grid cells. Requires c below
  /// the Hardy constant (dim-2)^2/4.
  static HamiltonianSpec inverse_square(const GridSpec& g, double c,
                                        KineticConvention conv = KineticConvention::full);

  double kinetic_factor() const { return convention == KineticConvention::half ? 0.5 : 1.0; }
  double symbol_exponent() const { return kind == HamiltonianKind::fractional ? exponent : 2.0; }
  bool has_potential() const { return kind == HamiltonianKind::potential || kind == HamiltonianKind::inverse_square; }
  /// Minimal group velocity of the kinetic symbol at energy theta.
  double group_velocity(double theta) const;
  std::string describe() const;
};

/// Kinetic symbol in FFT order.
std::vector<double> kinetic_symbol(const HamiltonianSpec& h);
/// Potential sampled on the grid (zeros for free and fractional kinds).
std::vector<double> sample_potential(const HamiltonianSpec& h);

/// Reusable H application: FFT, symbol multiply, inverse FFT, plus V f.
class HamiltonianOperator {
 public:
  explicit HamiltonianOperator(const HamiltonianSpec& h);
  Field apply(const Field& f) const;
  const HamiltonianSpec& spec() const { return spec_; }
  const std::vector<double>& symbol() const { return symbol_; }
  const std::vector<double>& potential() const { return potential_; }

 private:
  HamiltonianSpec spec_;
  FourierTransform fft_;
  std::vector<double> symbol_;
  std::vector<double> potential_;
};

Field apply_h(const HamiltonianSpec& h, const Field& f);

inline constexpr std::size_t kDenseDofLimit = 4096;

/// Real symmetric matrix of H on the grid (the kinetic kernel is even).
Eigen::MatrixXd dense_matrix(const HamiltonianSpec& h);

/// H_R with H_R = R^2 U_R^* H U_R; V_R(x) = R^2 V(R x). Kinetic-only kinds are
/// returned unchanged. The regularized inverse square is kept as is.
HamiltonianSpec scale_hamiltonian(const HamiltonianSpec& h, double R);

/// sup_x int |V(y)| / |x - y| dy on a 3-D grid by zero-padded FFT
/// convolution. The singular cell uses the ball of equal volume.
/// Returns +inf when the sampled potential is not finite.
double kato_norm(const PotentialSpec& v, const GridSpec& grid3);

struct RepulsivityDiagnostic {
  double min_value = 0.0;           // min over the grid of -(x . grad V)
  bool repulsive = false;           // min_value >= -tolerance
  std::array<double, 3> relative_bounds{};  // sup ||(x.grad)^k V f|| / (||H0 f|| + ||f||), k=0,1,2
};

/// Samples -(x . grad V) >= 0 and estimates relative-bound constants over
/// random band-limited states. H0 uses the half convention.
RepulsivityDiagnostic check_repulsive(const PotentialSpec& v, const GridSpec& grid, std::uint64_t seed = 0x5EED,
                                      double tolerance = 1e-10, int samples = 32);

/// Symmetrized dilation generator A = (XP + PX)/2 on a 1-D grid, with P the
/// spectral momentum whose Nyquist entry is zeroed.
struct DilationMatrix {
  Eigen::MatrixXcd matrix;
  double hermiticity_defect = 0.0;  // ||A - A^*||_F / ||A||_F before symmetrization
};
DilationMatrix dilation_generator(const GridSpec& grid);

/// Spectral momentum matrix used by the dilation generator.
Eigen::MatrixXcd momentum_matrix(const GridSpec& grid, bool zero_nyquist = true);

struct HardyResult {
  double lhs = 0.0;  // int |f|^2 / |x|^2
  double rhs = 0.0;  // 4 / (n-2)^2 int |grad f|^2
  bool holds = false;
};
/// Checks the Hardy inequality with spectral gradients. The sample at the
/// origin is skipped, so f should vanish near 0.
HardyResult hardy_check(const Field& f);

}  // namespace obslab
