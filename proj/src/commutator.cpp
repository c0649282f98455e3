#include "obslab/commutator.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

namespace obslab {

ScaledBump bump_profile(double N) {
  if (!(N > 0.0)) throw Error("bump scale must be positive");
  return ScaledBump{N};
}

CommutatorPair momentum_profile_pair(const GridSpec& g, double width) {
  if (!(width > 0.0)) throw Error("profile width must be positive");
  CommutatorPair pair;
  const std::size_t n = g.points_per_axis;
  const double h = g.spacing();
  const double L = g.half_extent;
  pair.a = momentum_matrix(g, false);
  pair.a.diagonal().array() += std::numbers::pi / h;
  pair.a = 0.5 * (pair.a + pair.a.adjoint()).eval();
  pair.b = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.coordinate(j);
    pair.b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
        std::tanh(L / (std::numbers::pi * width) * std::sin(std::numbers::pi * x / L));
  }
  pair.decomposition = diagonalize(pair.a);
  pair.commutator_norm = dense_operator_norm(pair.a * pair.b - pair.b * pair.a);
  pair.spectral_radius = pair.decomposition->eigenvalues.cwiseAbs().maxCoeff();
  return pair;
}

double commutator_norm(const CommutatorPair& pair, double N) {
  const auto phi = bump_profile(N);
  const auto proj = SpectralProjector::eigenbasis(pair.decomposition, [phi](double x) { return phi(x); });
  const Eigen::MatrixXcd f = proj.matrix();
  return dense_operator_norm(f * pair.b - pair.b * f);
}

ScalingFit scaling_fit(const CommutatorPair& pair, const std::vector<double>& Ns) {
  if (Ns.size() < 5) throw Error("scaling fit needs at least 5 values of N");
  ScalingFit out;
  out.Ns = Ns;
  for (double N : Ns) {
    if (!(N > 0.0) || N > 0.5 * pair.spectral_radius)
      throw Error("N must lie within half the spectral radius of A");
    out.norms.push_back(commutator_norm(pair, N));
  }
  out.fit = fit_power_law(out.Ns, out.norms);
  const double m = pair.commutator_norm;
  // Smallest C with norm <= C M N^{-3/4} on every sampled N.
  out.constant = 0.0;
  if (m > 0.0)
    for (std::size_t i = 0; i < Ns.size(); ++i)
      out.constant = std::max(out.constant, out.norms[i] * std::pow(Ns[i], 0.75) / m);
  out.bound_holds = true;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    const double b = out.constant * m * std::pow(Ns[i], -0.75);
    out.bounds.push_back(b);
    const bool ok = out.norms[i] <= b * (1.0 + 1e-9) + 1e-12;
    out.within_bound.push_back(ok);
    out.bound_holds = out.bound_holds && ok;
  }
  return out;
}

FourierL1Scaling fourier_l1_scaling(const std::vector<double>& Ns, int samples_per_unit) {
  FourierL1Scaling out;
  out.Ns = Ns;
  for (double N : Ns) {
    const auto phi = bump_profile(N);
    // Support of psi_N is [5N/8, 3N/2]; integrate with the midpoint rule on a
    // fixed number of samples per unit of rescaled support.
    const double lo = 0.625 * N;
    const double hi = 1.5 * N;
    const int m = static_cast<int>(std::ceil((hi - lo) / N * samples_per_unit));
    const double dx = (hi - lo) / m;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double x = lo + (i + 0.5) * dx;
      const double d1 = phi.derivative(x);
      const double d2 = phi.second_derivative(x);
      s1 += d1 * d1;
      s2 += d2 * d2;
    }
    out.psi_l2.push_back(std::sqrt(s1 * dx));
    out.dpsi_l2.push_back(std::sqrt(s2 * dx));
    out.bernstein.push_back(std::sqrt(out.psi_l2.back() * out.dpsi_l2.back()));
  }
  out.psi_slope = fit_power_law(out.Ns, out.psi_l2).slope;
  out.dpsi_slope = fit_power_law(out.Ns, out.dpsi_l2).slope;
  out.bernstein_slope = fit_power_law(out.Ns, out.bernstein).slope;
  return out;
}

}  // namespace obslab
