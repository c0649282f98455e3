#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <vector>

#include "obslab/cutoff.hpp"
#include "obslab/hamiltonian.hpp"

namespace obslab {

/// Energy interval. Half-open [lo, hi) unless include_hi is set.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool include_hi = false;

  static Interval half_open(double lo, double hi) { return {lo, hi, false}; }
  static Interval closed(double lo, double hi) { return {lo, hi, true}; }
  static Interval at_most(double d) { return {-std::numeric_limits<double>::infinity(), d, true}; }
  static Interval at_least(double d) { return {d, std::numeric_limits<double>::infinity(), false}; }

  bool contains(double lambda) const { return lambda >= lo && (lambda < hi || (include_hi && lambda == hi)); }
  Interval intersect(const Interval& o) const;
  bool empty() const { return lo > hi || (lo == hi && !include_hi); }
};

/// Dense Hermitian eigendecomposition with eigenvalues ascending.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // columns, orthonormal in the plain inner product

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  /// max_j ||M v_j - lambda_j v_j|| / (1 + |lambda_j|)
  double residual(const Eigen::MatrixXcd& m) const;
  double orthonormality_defect() const;
};

/// Real solver for H (the grid matrix is real symmetric).
std::shared_ptr<const EigenDecomposition> diagonalize(const HamiltonianSpec& h);
std::shared_ptr<const EigenDecomposition> diagonalize(const Eigen::MatrixXcd& hermitian);
std::shared_ptr<const EigenDecomposition> diagonalize(const DilationMatrix& a);

/// f(H) realized either as a Fourier multiplier (kinetic-only H) or in a
/// dense eigenbasis. Weights are per FFT bin or per eigenvalue.
class SpectralProjector {
 public:
  enum class Realization { multiplier, eigenbasis };

  static SpectralProjector multiplier(const HamiltonianSpec& h, const SpectralFunction& f);
  static SpectralProjector eigenbasis(std::shared_ptr<const EigenDecomposition> d, const SpectralFunction& f);

  Field apply(const Field& f) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  /// Dense matrix of the operator (eigenbasis realization only).
  Eigen::MatrixXcd matrix() const;

  Realization realization() const { return kind_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Number of weights that are not zero.
  std::size_t rank() const;
  const std::shared_ptr<const EigenDecomposition>& decomposition() const { return decomp_; }

 private:
  Realization kind_ = Realization::multiplier;
  std::vector<double> weights_;
  std::vector<Eigen::Index> active_;
  std::shared_ptr<const EigenDecomposition> decomp_;
  std::shared_ptr<FourierTransform> fft_;
};

SpectralFunction indicator(const Interval& i);

/// chi_I(H). Uses the Fourier multiplier for free and fractional H and the
/// eigenbasis (computed here unless supplied) for potential kinds.
SpectralProjector energy_projector(const HamiltonianSpec& h, const Interval& i,
                                   std::shared_ptr<const EigenDecomposition> d = nullptr);
Field project_energy(const HamiltonianSpec& h, const Interval& i, const Field& f,
                     std::shared_ptr<const EigenDecomposition> d = nullptr);

/// g(H) for a smooth g, same realization rules as energy_projector.
SpectralProjector smooth_projector(const HamiltonianSpec& h, const SpectralFunction& g,
                                   std::shared_ptr<const EigenDecomposition> d = nullptr);

/// g(H / 2^k)
Field dyadic_cutoff(const HamiltonianSpec& h, const SpectralFunction& g, int k, const Field& f,
                    std::shared_ptr<const EigenDecomposition> d = nullptr);

/// chi^+(A - a) = chi(A >= a) or chi^-(A - a) = chi(A < a). The boundary
/// eigenvalue goes to the + side.
SpectralProjector project_dilation(std::shared_ptr<const EigenDecomposition> a, int sign, double shift);

}  // namespace obslab
