#pragma once

#include <optional>
#include <string>
#include <vector>

#include "obslab/norm.hpp"
#include "obslab/propagate.hpp"
#include "obslab/spectral.hpp"

namespace obslab {

// ---- bump data --------------------------------------------------------------

/// exp(-1 / (1 - |x/r|^2)) inside |x| < r, normalized in L2. With `odd` the
/// profile is multiplied by x_0 / r, which removes the zero moment.
Field smooth_bump(const GridSpec& g, double radius, bool odd = false);
Field normalized(const Field& f);

// ---- uncertainty ------------------------------------------------------------

struct UncertaintyOptions {
  PowerIterationOptions power;
  bool exclude_zero_mode = false;  // drop lambda == 0 from chi(H <= delta)
  std::shared_ptr<const EigenDecomposition> decomposition;  // potential kinds
};

struct UncertaintyResult {
  double radius = 0.0;
  double delta = 0.0;
  double norm = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// ||chi(|x| <= R) chi(H <= delta)|| by power iteration.
UncertaintyResult uncertainty_norm(const HamiltonianSpec& h, double R, double delta,
                                   const UncertaintyOptions& opt = {});

/// Same norm as the largest singular value of the mask-row by band-column
/// block of the mode basis. Reasonable only for small bands.
double uncertainty_norm_dense(const HamiltonianSpec& h, double R, double delta, const UncertaintyOptions& opt = {});

struct UncertaintyScan {
  std::vector<double> radii;
  std::vector<double> deltas;
  std::vector<std::vector<UncertaintyResult>> table;  // [radius][delta]
  int monotonicity_violations = 0;
  /// Largest relative spread of norms sharing R delta^{1/s}; empty when no
  /// invariant value repeats or H is not homogeneous.
  std::optional<double> collapse_spread;
  int collapse_groups = 0;
};

UncertaintyScan uncertainty_scan(const HamiltonianSpec& h, const std::vector<double>& radii,
                                 const std::vector<double>& deltas, const UncertaintyOptions& opt = {},
                                 double monotonicity_tolerance = 1e-8);

/// Largest delta with ||chi(|x|<=R) chi(H<=delta)|| <= threshold, by bisection
/// in log delta.
struct EnergyFloor {
  double delta = 0.0;
  double norm = 0.0;
  double velocity = 0.0;  // minimal group velocity at delta
};
EnergyFloor certified_energy_floor(const HamiltonianSpec& h, double R, double threshold,
                                   const UncertaintyOptions& opt = {});

// ---- decay laws -------------------------------------------------------------

struct DecaySeries {
  std::vector<double> times;
  std::vector<double> values;
  std::size_t fit_start = 0;  // first index used by the fit
  PowerLawFit fit;
  double max_wrap_mass = 0.0;
  bool wrap_flag = false;
};

/// Fits the tail of a series, skipping the first `skip_fraction` of samples.
void fit_tail(DecaySeries& s, double skip_fraction);

/// Interior mass ||chi(|x| < v t) exp(-itH) psi||^2 at each time.
DecaySeries minimal_velocity_decay(const Propagator& p, const Field& psi, double v, const std::vector<double>& times,
                                   double skip_fraction = 0.2);

struct EnssOptions {
  double theta = 0.0;  // lower bound on i[H, A] on the window; v < sqrt(theta)
  double observation_radius = 0.0;
  PowerIterationOptions power;
  double skip_fraction = 0.2;
  double bound_exponent = 0.9;
};

struct EnssSeries {
  double shift = 0.0;  // a
  DecaySeries series;  // operator norms
  double bound_constant = 0.0;  // sup_t norm(t) (1 + t)^m
  int unconverged = 0;
};

/// Norms of E_r chi^-(A - a - v t) exp(-itH) g(H) chi^+(A - a) E_r where E_r
/// localizes to |x| <= r. All operators act in dense eigenbases.
std::vector<EnssSeries> enss_decay(const EigenDecomposition& h, const EigenDecomposition& a, const GridSpec& grid,
                                   const SpectralFunction& g, const std::vector<double>& shifts, double v,
                                   const std::vector<double>& times, const EnssOptions& opt);

/// The same operator as a dense matrix, for oracles.
Eigen::MatrixXcd enss_operator(const EigenDecomposition& h, const EigenDecomposition& a, const GridSpec& grid,
                                const SpectralFunction& g, double shift, double v, double t, double radius);

// ---- observability ----------------------------------------------------------

struct ObservabilityResult {
  double radius = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double sigma = 0.0;
  double outer_radius = 0.0;    // sigma (t2 - t1) / R^{p-1}
  double lhs = 0.0;             // ||u0||^2
  double interior_t1 = 0.0;     // ||chi(|x|<=R) u(t1)||^2
  double exterior_t1 = 0.0;     // ||chi(|x|>R) u(t1)||^2
  double exterior_t2 = 0.0;     // ||chi(|x|>outer) u(t2)||^2
  double ratio = 0.0;           // lhs / (exterior_t1 + exterior_t2)
  bool window_ok = false;       // t2 - t1 > R^p T0
  double max_wrap_mass = 0.0;
};

ObservabilityResult observability_ratio(const Propagator& p, const Field& u0, double R, double t1, double t2,
                                        double sigma, double T0);

// ---- sharpness --------------------------------------------------------------

struct SharpnessRow {
  int k = 1;
  double norm = 0.0;
  double exterior_mass = 0.0;  // ||chi(|x| > r1) f_k||^2
  double interior_mass = 0.0;  // ||chi(|x| <= sigma t) exp(-itH) f_k||^2
  double wrap_mass = 0.0;
};

struct SharpnessTable {
  std::vector<SharpnessRow> rows;
  bool exterior_decreasing = false;
  bool interior_decreasing = false;
  double exterior_ratio = 0.0;  // last / first
  double interior_ratio = 0.0;
};

/// f_k = U_k f, then both masses per k.
SharpnessTable sharpness_sequence(const Propagator& p, const Field& f, const std::vector<int>& ks, double r1,
                                  double sigma, double t);

}  // namespace obslab
