#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "obslab/cutoff.hpp"
#include "obslab/norm.hpp"
#include "obslab/spectral.hpp"

namespace obslab {

/// phi_N(x) = phi(x / N) for the dyadic bump, with psi_N = i phi_N'.
struct ScaledBump {
  double scale = 1.0;
  double operator()(double x) const { return DyadicBump{}(x / scale); }
  double derivative(double x) const { return DyadicBump{}.derivative(x / scale) / scale; }
  double second_derivative(double x) const {
    return DyadicBump{}.second_derivative(x / scale) / (scale * scale);
  }
};
ScaledBump bump_profile(double N);

/// Operator pair (A, B) of bounded commutator. A is Hermitian and given with
/// its eigendecomposition.
struct CommutatorPair {
  Eigen::MatrixXcd a;
  Eigen::MatrixXcd b;
  std::shared_ptr<const EigenDecomposition> decomposition;
  double commutator_norm = 0.0;  // M_AB = ||[A, B]||
  double spectral_radius = 0.0;
};

/// A = P + (pi / h) I, the shifted spectral momentum with spectrum in
/// [0, 2 pi / h); B = tanh((L / (pi w)) sin(pi x / L)), a smooth periodic
/// profile with |B'| <= 1 / w. The lattice symbol of A wraps from 2 pi / h
/// to 0, so the discrete ||[A, B]|| is much larger than 1 / w.
CommutatorPair momentum_profile_pair(const GridSpec& grid, double width = 4.0);

/// ||[phi_N(A), B]||
double commutator_norm(const CommutatorPair& pair, double N);

struct ScalingFit {
  std::vector<double> Ns;
  std::vector<double> norms;
  std::vector<double> bounds;  // C M_AB N^{-3/4}, C the smallest constant covering every N
  std::vector<bool> within_bound;
  double constant = 0.0;
  PowerLawFit fit;
  bool bound_holds = false;
};

/// Measures the commutator norms and checks the N^{-3/4} bound. Each N
/// must lie in (0, spectral_radius / 2]; at least 5 of them. A commuting
/// pair passes with fit.valid == false.
ScalingFit scaling_fit(const CommutatorPair& pair, const std::vector<double>& Ns);

/// L2 norms of psi_N and psi_N' by quadrature and the exponents of their
/// N-dependence, together with the Bernstein-type bound
/// ||psi_N||_2^{1/2} ||psi_N'||_2^{1/2} on ||psi_N||_{FL1}.
struct FourierL1Scaling {
  std::vector<double> Ns;
  std::vector<double> psi_l2;
  std::vector<double> dpsi_l2;
  std::vector<double> bernstein;
  double psi_slope = 0.0;
  double dpsi_slope = 0.0;
  double bernstein_slope = 0.0;
};
FourierL1Scaling fourier_l1_scaling(const std::vector<double>& Ns, int samples_per_unit = 4000);

}  // namespace obslab
