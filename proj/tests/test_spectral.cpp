#include "obslab/spectral.hpp"

#include "obslab/lab.hpp"
#include "testing.hpp"

using namespace obslab;

namespace {

Eigen::VectorXcd as_vector(const Field& f) {
  return Eigen::Map<const Eigen::VectorXcd>(f.values.data(), static_cast<Eigen::Index>(f.size()));
}

const GridSpec kGrid = make_grid(1, 16.0, 256);

HamiltonianSpec potential_h() { return HamiltonianSpec::with_potential(kGrid, make_potential("gaussian_repulsive")); }

}  // namespace

TEST_CASE("eigendecomposition quality") {
  const auto h = potential_h();
  const auto d = diagonalize(h);
  CHECK(d->residual(dense_matrix(h).cast<Complex>()) <= 1e-8);
  CHECK(d->orthonormality_defect() <= 1e-8);
  for (Eigen::Index j = 1; j < d->eigenvalues.size(); ++j) CHECK(d->eigenvalues(j) >= d->eigenvalues(j - 1));
  const auto a = diagonalize(dilation_generator(kGrid));
  CHECK(a->residual(dilation_generator(kGrid).matrix) <= 1e-8);
  CHECK(a->orthonormality_defect() <= 1e-8);
}

TEST_CASE("sharp projectors are idempotent and Hermitian") {
  const auto d = diagonalize(potential_h());
  const auto p = SpectralProjector::eigenbasis(d, indicator(Interval::half_open(0.5, 3.0)));
  const Eigen::MatrixXcd m = p.matrix();
  CHECK((m * m - m).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
  const auto s = SpectralProjector::eigenbasis(d, SmoothWindow{0.5, 3.0, 0.5});
  for (double w : s.weights()) {
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
  }
}

TEST_CASE("project_energy examples") {
  const auto free = HamiltonianSpec::free(kGrid);
  const Field f = testing::random_field(kGrid, 1);
  CHECK(testing::rel_diff(project_energy(free, Interval::at_least(0.0), f), f) < 1e-12);
  const double xi0 = kGrid.frequency(20);
  const Field wave = Field::sample(kGrid, [xi0](const Point& x) { return std::polar(1.0, xi0 * x[0]); });
  const Field cut = project_energy(free, Interval::at_most(xi0 * xi0 * 0.99), wave);
  CHECK(l2_norm(cut) < 1e-12);
  // Potential kind: ||P f||^2 = sum over the window of |<v_j, f>|^2.
  const auto h = potential_h();
  const auto d = diagonalize(h);
  const Interval win = Interval::closed(0.2, 5.0);
  const Field pf = project_energy(h, win, f, d);
  const Eigen::VectorXcd v = as_vector(f);
  double expect = 0.0;
  for (Eigen::Index j = 0; j < d->eigenvalues.size(); ++j)
    if (win.contains(d->eigenvalues(j))) expect += std::norm(d->eigenvectors.col(j).dot(v));
  CHECK(mass(pf) / kGrid.cell_volume() == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(energy_projector(HamiltonianSpec::with_potential(make_grid(1, 8.0, 8192), make_potential("zero")),
                                   win),
                  Error);
}

TEST_CASE("multiplier and eigenbasis realizations agree on free H") {
  const auto free = HamiltonianSpec::free(kGrid);
  const auto d = diagonalize(free);
  for (const Interval& iv : {Interval::half_open(1.0, 4.0), Interval::at_most(2.5), Interval::at_least(7.0)}) {
    const auto pm = energy_projector(free, iv);
    const auto pe = SpectralProjector::eigenbasis(d, indicator(iv));
    double worst = 0.0;
    for (int probe = 0; probe < 64; ++probe) {
      const Field f = testing::random_field(kGrid, 100 + probe);
      worst = std::max(worst, testing::abs_diff(pm.apply(f), pe.apply(f)) / l2_norm(f));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("dyadic cutoffs") {
  const auto free = HamiltonianSpec::free(kGrid);
  const DyadicBump g;
  const int k = 3;
  // Spectrum inside [3/4, 5/4] 2^k: unchanged.
  const Field f = testing::random_field(kGrid, 7);
  const Field inside = project_energy(free, Interval::closed(0.75 * 8, 1.25 * 8), f);
  CHECK(testing::rel_diff(dyadic_cutoff(free, g, k, inside), inside) < 1e-10);
  // Spectrum in [0, 2^{k-2}]: annihilated.
  const Field low = project_energy(free, Interval::closed(0.0, 2.0), f);
  CHECK(l2_norm(dyadic_cutoff(free, g, k, low)) < 1e-12);
  // Telescoping partition of unity with the low-pass remainder beta(2H).
  const auto sym = kinetic_symbol(free);
  const double top = *std::max_element(sym.begin(), sym.end());
  int K = 0;
  while (std::ldexp(0.625, K) < top) ++K;
  Field sum = smooth_projector(free, [](double x) { return DyadicBump::low_pass(2.0 * x); }).apply(f);
  for (int j = 0; j <= K; ++j) {
    const Field part = dyadic_cutoff(free, g, j, f);
    for (std::size_t i = 0; i < f.size(); ++i) sum.values[i] += part.values[i];
  }
  CHECK(testing::abs_diff(sum, f) <= 1e-6 * l2_norm(f));
  // Eigenbasis path for a potential.
  const auto h = potential_h();
  const auto d = diagonalize(h);
  Field sum2 = smooth_projector(h, [](double x) { return DyadicBump::low_pass(2.0 * x); }, d).apply(f);
  for (int j = 0; j <= K + 1; ++j) {
    const Field part = dyadic_cutoff(h, g, j, f, d);
    for (std::size_t i = 0; i < f.size(); ++i) sum2.values[i] += part.values[i];
  }
  CHECK(testing::abs_diff(sum2, f) <= 1e-6 * l2_norm(f));
}

TEST_CASE("projector calculus on the eigenbasis") {
  const auto d = diagonalize(potential_h());
  const Interval a = Interval::half_open(0.3, 4.0), b = Interval::closed(2.0, 9.0);
  const auto pa = SpectralProjector::eigenbasis(d, indicator(a));
  const auto pb = SpectralProjector::eigenbasis(d, indicator(b));
  const auto pab = SpectralProjector::eigenbasis(d, indicator(a.intersect(b)));
  for (std::size_t j = 0; j < d->size(); ++j) CHECK(pa.weights()[j] * pb.weights()[j] == pab.weights()[j]);
  const Field f = testing::random_field(kGrid, 8);
  CHECK(testing::abs_diff(pa.apply(pb.apply(f)), pab.apply(f)) <= 1e-10 * l2_norm(f));
}

TEST_CASE("dilation projections") {
  const auto a = diagonalize(dilation_generator(kGrid));
  const Field f = testing::random_field(kGrid, 9);
  for (double shift : {-5.0, 0.0, 3.0}) {
    const auto plus = project_dilation(a, 1, shift);
    const auto minus = project_dilation(a, -1, shift);
    Field s = plus.apply(f);
    const Field m = minus.apply(f);
    for (std::size_t i = 0; i < f.size(); ++i) s.values[i] += m.values[i];
    CHECK(testing::abs_diff(s, f) <= 1e-10 * l2_norm(f));
    CHECK(inner(f, plus.apply(f)).real() >= 0.0);
  }
  const double below = a->eigenvalues(0) - 1.0;
  CHECK(testing::abs_diff(project_dilation(a, 1, below).apply(f), f) <= 1e-10 * l2_norm(f));
  // Boundary eigenvalue goes to the + side.
  const double edge = a->eigenvalues(100);
  CHECK(project_dilation(a, 1, edge).weights()[100] == 1.0);
  CHECK(project_dilation(a, -1, edge).weights()[100] == 0.0);
  CHECK_THROWS_AS(project_dilation(a, 0, 0.0), Error);
}

TEST_CASE("Mourre positivity on an energy window") {
  const auto h = HamiltonianSpec::free(kGrid, KineticConvention::half);
  const Eigen::MatrixXcd a = dilation_generator(kGrid).matrix;
  const Eigen::MatrixXcd m = dense_matrix(h).cast<Complex>();
  const double lo = 1.0, hi = 2.0;
  const Field packet = Field::sample(kGrid, [](const Point& x) { return std::polar(std::exp(-x[0] * x[0] / 8), 1.7 * x[0]); });
  const Field psi = smooth_projector(h, SmoothWindow{lo, hi, 0.25}).apply(packet);
  CHECK(boundary_mass(psi) < 1e-2 * mass(psi));
  const Eigen::VectorXcd v = as_vector(psi);
  const double form = v.dot(Complex(0, 1) * (m * (a * v) - a * (m * v))).real();
  CHECK(form >= 2 * lo * v.squaredNorm() * (1.0 - 0.05));
}
