#include <Eigen/Eigenvalues>
#include <numbers>

#include "obslab/hamiltonian.hpp"
#include "obslab/lab.hpp"
#include "obslab/spectral.hpp"
#include "testing.hpp"

using namespace obslab;

namespace {

Field gaussian(const GridSpec& g, double w = 1.0, double x0 = 0.0) {
  return Field::sample(g, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) r2 += (x[a] - (a == 0 ? x0 : 0.0)) * (x[a] - (a == 0 ? x0 : 0.0));
    return Complex(std::exp(-r2 / (2 * w * w)));
  });
}

// Kinetic matrix from the explicit mode sum, independent of the FFT path.
Eigen::MatrixXcd kinetic_by_mode_sum(const GridSpec& g, double factor) {
  const std::size_t n = g.points_per_axis;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = g.frequency(k);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        m(j, l) += factor * xi * xi * std::polar(1.0 / n, xi * (g.coordinate(j) - g.coordinate(l)));
  }
  return m;
}

Eigen::VectorXcd as_vector(const Field& f) {
  return Eigen::Map<const Eigen::VectorXcd>(f.values.data(), static_cast<Eigen::Index>(f.size()));
}

}  // namespace

TEST_CASE("free plane wave is an eigenstate") {
  const auto g = make_grid(1, 8.0, 128);
  const double xi0 = g.frequency(5);
  const Field f = Field::sample(g, [xi0](const Point& x) { return std::polar(1.0, xi0 * x[0]); });
  const Field hf = apply_h(HamiltonianSpec::free(g), f);
  Field expect = f;
  for (auto& z : expect.values) z *= xi0 * xi0;
  CHECK(testing::rel_diff(hf, expect) < 1e-10);
  const Field half = apply_h(HamiltonianSpec::free(g, KineticConvention::half), f);
  for (auto& z : expect.values) z *= 0.5;
  CHECK(testing::rel_diff(half, expect) < 1e-10);
}

TEST_CASE("fractional s = 2 reproduces the free symbol") {
  const auto g = make_grid(2, 4.0, 32);
  CHECK(kinetic_symbol(HamiltonianSpec::fractional(g, 2.0)) == kinetic_symbol(HamiltonianSpec::free(g)));
  const Field f = testing::random_field(g, 4);
  CHECK(testing::rel_diff(apply_h(HamiltonianSpec::fractional(g, 2.0), f), apply_h(HamiltonianSpec::free(g), f)) <
        1e-12);
  CHECK_THROWS_AS(HamiltonianSpec::fractional(g, 0.5), Error);
  // Radial monotone symbol.
  const auto g1 = make_grid(1, 4.0, 64);
  const auto sym = kinetic_symbol(HamiltonianSpec::fractional(g1, 1.5));
  for (std::size_t k = 1; k < 32; ++k) CHECK(sym[k] > sym[k - 1]);
}

TEST_CASE("potential hamiltonian against an explicit dense oracle") {
  const auto g = make_grid(1, 8.0, 256);
  const auto h = HamiltonianSpec::with_potential(g, make_potential("gaussian_repulsive", 2.0));
  Eigen::MatrixXcd m = kinetic_by_mode_sum(g, 1.0);
  for (std::size_t j = 0; j < 256; ++j) m(j, j) += 2.0 * std::exp(-g.coordinate(j) * g.coordinate(j));
  const Field f = gaussian(g, 1.0, 0.5);
  const Eigen::VectorXcd expect = m * as_vector(f);
  const Eigen::VectorXcd got = as_vector(apply_h(h, f));
  CHECK((got - expect).norm() / expect.norm() < 1e-10);
  const Eigen::MatrixXd dm = dense_matrix(h);
  CHECK((dm.cast<Complex>() - m).norm() / m.norm() < 1e-12);
}

TEST_CASE("hermiticity and nonnegativity") {
  const auto g = make_grid(1, 8.0, 256);
  const std::vector<HamiltonianSpec> specs = {
      HamiltonianSpec::free(g), HamiltonianSpec::fractional(g, 1.0, KineticConvention::half),
      HamiltonianSpec::with_potential(g, make_potential("gaussian_repulsive")),
      HamiltonianSpec::inverse_square(g, 0.2)};
  for (const auto& h : specs) {
    const Field f = testing::random_field(g, 21), k = testing::random_field(g, 22);
    const Complex a = inner(apply_h(h, f), k);
    const Complex b = inner(f, apply_h(h, k));
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
    const Eigen::MatrixXd m = dense_matrix(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    // An attractive well always binds in 1-D, so only the kinetic and
    // repulsive cases are nonnegative here.
    if (h.kind != HamiltonianKind::inverse_square) CHECK(es.eigenvalues()(0) >= -1e-10 * top);
    else CHECK(es.eigenvalues()(0) < 0.0);
  }
  CHECK_THROWS_AS(HamiltonianSpec::inverse_square(g, 0.25), Error);
  CHECK_THROWS_AS(HamiltonianSpec::inverse_square(make_grid(2, 4.0, 16), 0.0), Error);
  CHECK_NOTHROW(HamiltonianSpec::inverse_square(make_grid(3, 4.0, 16), 0.2));
}

TEST_CASE("scaling of hamiltonians") {
  const auto g = make_grid(1, 16.0, 1024);
  const auto inv = HamiltonianSpec::inverse_square(g, 0.1);
  const auto same = scale_hamiltonian(inv, 3.0);
  CHECK(same.kind == inv.kind);
  CHECK(sample_potential(same) == sample_potential(inv));
  const auto h = HamiltonianSpec::with_potential(g, make_potential("gaussian_repulsive"));
  CHECK(sample_potential(scale_hamiltonian(h, 1.0)) == sample_potential(h));
  const auto h2 = scale_hamiltonian(h, 2.0);
  for (double x : {0.0, 0.3, -1.1}) CHECK((*h2.potential)({x, 0, 0}) == doctest::Approx(4 * std::exp(-4 * x * x)));
  // H_R U_R f = R^2 U_R H f
  const Field f = gaussian(g, 1.0, 0.2);
  const Field lhs = apply_h(h2, concentrate(f, 2));
  Field rhs = concentrate(apply_h(h, f), 2);
  for (auto& z : rhs.values) z *= 4.0;
  CHECK(testing::abs_diff(lhs, rhs) <= 1e-8 * l2_norm(rhs));
}

TEST_CASE("Kato norm") {
  const auto g = make_grid(3, 2.0, 64);
  CHECK(kato_norm(make_potential("zero"), g) == 0.0);
  const double ball = kato_norm(make_potential("ball_indicator"), g);
  CHECK(std::abs(ball / (2 * std::numbers::pi) - 1.0) < 0.02);
  // Admissibility threshold pi^{n/2} / Gamma(n/2 - 1) at n = 3.
  CHECK(std::pow(std::numbers::pi, 1.5) / std::tgamma(0.5) == doctest::Approx(std::numbers::pi));
  const auto g5 = make_grid(3, 5.0, 64);
  const auto v = make_potential("gaussian_repulsive");
  const double k1 = kato_norm(v, g5);
  CHECK(std::abs(k1 / (2 * std::numbers::pi) - 1.0) < 0.02);
  for (double R : {0.5, 2.0}) CHECK(std::abs(kato_norm(v.scaled(R), g5) / k1 - 1.0) < 0.02);
  PotentialSpec bad;
  bad.value = [](const Point&) { return std::numeric_limits<double>::infinity(); };
  CHECK(std::isinf(kato_norm(bad, make_grid(3, 1.0, 8))));
  CHECK_THROWS_AS(kato_norm(v, make_grid(1, 1.0, 8)), Error);
}

TEST_CASE("repulsivity diagnostic") {
  const auto g = make_grid(1, 8.0, 256);
  const auto rep = check_repulsive(make_potential("gaussian_repulsive"), g);
  CHECK(rep.repulsive);
  CHECK(rep.min_value >= -1e-10);
  const auto well = check_repulsive(make_potential("gaussian_well"), g);
  CHECK_FALSE(well.repulsive);
  CHECK(well.min_value < 0.0);
  const auto zero = check_repulsive(make_potential("zero"), g);
  CHECK(zero.repulsive);
  CHECK(zero.min_value == 0.0);
  for (double b : rep.relative_bounds) {
    CHECK(std::isfinite(b));
    CHECK(b > 0.0);
  }
  // Numeric and analytic radial derivatives agree.
  auto v = make_potential("gaussian_repulsive");
  PotentialSpec numeric{v.name, v.value, {}};
  for (double x : {0.2, 0.9, 1.7}) CHECK(numeric.dilation_derivative({x, 0, 0}) == doctest::Approx(v.dilation_derivative({x, 0, 0})).epsilon(1e-6));
}

TEST_CASE("dilation generator") {
  const auto g = make_grid(1, 16.0, 256);
  const auto a = dilation_generator(g);
  CHECK(a.hermiticity_defect < 1e-10);
  CHECK((a.matrix - a.matrix.adjoint()).norm() == 0.0);
  // Reflection composed with conjugation flips the sign (index 0 has no mirror).
  const Eigen::Index n = 256;
  double worst = 0.0;
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index l = 1; l < n; ++l)
      worst = std::max(worst, std::abs(std::conj(a.matrix(n - j, n - l)) + a.matrix(j, l)));
  CHECK(worst < 1e-10 * a.matrix.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(dilation_generator(make_grid(2, 1.0, 8)), Error);
}

TEST_CASE("commutator with the dilation generator") {
  const auto g = make_grid(1, 16.0, 256);
  const Eigen::MatrixXcd a = dilation_generator(g).matrix;
  const Field psi = Field::sample(g, [](const Point& x) { return std::polar(std::exp(-x[0] * x[0] / 2), 1.5 * x[0]); });
  const Eigen::VectorXcd v = as_vector(psi);
  {
    const auto h = HamiltonianSpec::free(g, KineticConvention::half);
    const Eigen::MatrixXcd m = dense_matrix(h).cast<Complex>();
    const Eigen::VectorXcd c = Complex(0, 1) * (m * (a * v) - a * (m * v));
    const Eigen::VectorXcd hv = m * v;
    CHECK((c - 2.0 * hv).norm() / hv.norm() < 0.05);
  }
  for (double s : {1.0, 3.0}) {
    const auto h = HamiltonianSpec::fractional(g, s);
    const Eigen::MatrixXcd m = dense_matrix(h).cast<Complex>();
    const Complex lhs = v.dot(Complex(0, 1) * (m * (a * v) - a * (m * v)));
    const Complex rhs = s * v.dot(m * v);
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 0.05);
  }
}

TEST_CASE("Hardy inequality") {
  const auto g = make_grid(3, 3.0, 64);
  const auto zero = hardy_check(Field::zeros(g));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.holds);
  // Radial bump on 1 <= |x| <= 2 against 1-D radial quadrature.
  auto rho = [](double r) { return r > 1.0 && r < 2.0 ? std::exp(-1.0 / (1.0 - 4 * (r - 1.5) * (r - 1.5))) : 0.0; };
  const Field f = Field::sample(g, [&](const Point& x) { return Complex(rho(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]))); });
  const auto res = hardy_check(f);
  CHECK(res.holds);
  CHECK(res.lhs < res.rhs);
  double lhs = 0.0, grad = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double r = 1.0 + (i + 0.5) / m;
    const double e = 1e-6;
    const double d = (rho(r + e) - rho(r - e)) / (2 * e);
    lhs += rho(r) * rho(r) / m;
    grad += d * d * r * r / m;
  }
  lhs *= 4 * std::numbers::pi;
  grad *= 4 * std::numbers::pi * 4.0;
  CHECK(res.lhs == doctest::Approx(lhs).epsilon(0.02));
  CHECK(res.rhs == doctest::Approx(grad).epsilon(0.02));
  // A non-radial perturbation still satisfies the inequality.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a1 = u(rng), a2 = u(rng), a3 = u(rng);
  const Field f2 = Field::sample(g, [&](const Point& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return Complex(rho(r) * (1.0 + 0.5 * std::sin(a1 * x[0] + a2 * x[1] + a3 * x[2])));
  });
  CHECK(hardy_check(f2).holds);
}
