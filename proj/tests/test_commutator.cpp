#include "obslab/commutator.hpp"

#include <Eigen/SVD>
#include <numbers>

#include "testing.hpp"

using namespace obslab;

namespace {

// phi_N(A) built from the plane-wave basis, A = P + pi/h.
Eigen::MatrixXcd plane_wave_phi(const GridSpec& g, double N) {
  const auto n = static_cast<Eigen::Index>(g.points_per_axis);
  const double shift = std::numbers::pi / g.spacing();
  const auto phi = bump_profile(N);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < g.points_per_axis; ++k) {
    const double w = phi(g.frequency(k) + shift);
    if (w == 0.0) continue;
    Eigen::VectorXcd e(n);
    for (Eigen::Index j = 0; j < n; ++j)
      e(j) = std::polar(1.0 / std::sqrt(double(n)), g.frequency(k) * g.coordinate(static_cast<std::size_t>(j)));
    m += w * e * e.adjoint();
  }
  return m;
}

}  // namespace

TEST_CASE("bump profile") {
  for (double N : {1.0, 8.0, 100.0}) {
    const auto phi = bump_profile(N);
    CHECK(phi(N) == 1.0);
    CHECK(phi(N / 4) == 0.0);
    CHECK(phi(N / 2) == 0.0);
    CHECK(phi(2 * N) == 0.0);
    double tv = 0.0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
      const double x = 2.5 * N * (i + 0.5) / m;
      tv += std::abs(phi.derivative(x)) * 2.5 * N / m;
    }
    CHECK(tv == doctest::Approx(2.0).epsilon(1e-6));
  }
  CHECK_THROWS_AS(bump_profile(0.0), Error);
}

TEST_CASE("commuting pairs give zero") {
  const auto g = make_grid(1, 4.0, 128);
  CommutatorPair pair = momentum_profile_pair(g);
  const double rho = pair.spectral_radius;
  Eigen::MatrixXcd b = pair.b;
  pair.b = Eigen::MatrixXcd::Identity(pair.a.rows(), pair.a.cols());
  CHECK(commutator_norm(pair, 20.0) < 1e-12);
  const Eigen::MatrixXcd a = pair.a / rho;
  pair.b = a * a + 3.0 * a;
  CHECK(commutator_norm(pair, 20.0) < 1e-12);
  pair.commutator_norm = 0.0;
  pair.b = Eigen::MatrixXcd::Identity(pair.a.rows(), pair.a.cols());
  const auto fit = scaling_fit(pair, {2, 4, 8, 16, 32});
  CHECK(fit.bound_holds);
  CHECK(!fit.fit.valid);
}

TEST_CASE("momentum / tanh pair") {
  const auto g = make_grid(1, 4.0, 128);
  const auto pair = momentum_profile_pair(g);
  CHECK((pair.a - pair.a.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(pair.decomposition->eigenvalues.minCoeff() > -1e-9);
  CHECK(pair.spectral_radius < 2 * std::numbers::pi / g.spacing());
  CHECK(pair.commutator_norm > 0.0);
  CHECK(std::isfinite(pair.commutator_norm));
  const double bnorm = pair.b.cwiseAbs().maxCoeff();
  for (double N : {8.0, 16.0, 32.0}) {
    const Eigen::MatrixXcd f = plane_wave_phi(g, N);
    const double ref = Eigen::JacobiSVD<Eigen::MatrixXcd>(f * pair.b - pair.b * f).singularValues()(0);
    CHECK(commutator_norm(pair, N) == doctest::Approx(ref).epsilon(1e-9));
    CHECK(commutator_norm(pair, N) <= 2 * bnorm);
    const auto proj = SpectralProjector::eigenbasis(pair.decomposition, bump_profile(N));
    for (double w : proj.weights()) {
      CHECK(w >= 0.0);
      CHECK(w <= 1.0);
    }
  }
}

TEST_CASE("scaling fit on the momentum / tanh pair") {
  const auto g = make_grid(1, 12.0, 1024);
  const auto pair = momentum_profile_pair(g);
  const auto fit = scaling_fit(pair, {8, 16, 32, 64, 128});
  CHECK(fit.fit.valid);
  for (std::size_t i = 0; i < fit.Ns.size(); ++i) CHECK(fit.within_bound[i]);
  CHECK(fit.fit.slope <= -0.70);
  CHECK(fit.bound_holds);
  CHECK_THROWS_AS(scaling_fit(pair, {8, 16, 32, 64, 1000}), Error);
  CHECK_THROWS_AS(scaling_fit(pair, {8, 16}), Error);
}

TEST_CASE("Fourier L1 ingredient") {
  const auto s = fourier_l1_scaling({8, 16, 32, 64, 128});
  CHECK(s.psi_slope == doctest::Approx(-0.5).epsilon(0.05));
  CHECK(s.dpsi_slope == doctest::Approx(-1.5).epsilon(0.05));
  // The two exponents combine to N^{-1}, inside the N^{-3/4} bound.
  CHECK(s.bernstein_slope == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(s.bernstein_slope <= -0.75);
  // Exact rescaling: N^{1/2} ||psi_N||_2 is constant.
  for (std::size_t i = 0; i < s.Ns.size(); ++i)
    CHECK(s.psi_l2[i] * std::sqrt(s.Ns[i]) == doctest::Approx(s.psi_l2[0] * std::sqrt(s.Ns[0])).epsilon(1e-9));
}
