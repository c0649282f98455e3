#include "obslab/lab.hpp"

#include <Eigen/SVD>
#include <numbers>

#include "testing.hpp"

using namespace obslab;

namespace {

// Explicit unitary DFT matrix, x_j = -L + j h, xi_k in FFT order.
Eigen::MatrixXcd dft_columns(const GridSpec& g, const std::vector<std::size_t>& modes) {
  const auto n = static_cast<Eigen::Index>(g.points_per_axis);
  Eigen::MatrixXcd e(n, static_cast<Eigen::Index>(modes.size()));
  for (std::size_t c = 0; c < modes.size(); ++c)
    for (Eigen::Index j = 0; j < n; ++j)
      e(j, static_cast<Eigen::Index>(c)) =
          std::polar(1.0 / std::sqrt(double(n)), g.frequency(modes[c]) * g.coordinate(static_cast<std::size_t>(j)));
  return e;
}

// ||chi(|x|<=R) chi(xi^2 <= delta)|| as the norm of the masked band projector.
double brute_uncertainty(const GridSpec& g, double R, double delta) {
  std::vector<std::size_t> modes;
  for (std::size_t k = 0; k < g.points_per_axis; ++k)
    if (g.frequency(k) * g.frequency(k) <= delta) modes.push_back(k);
  const Eigen::MatrixXcd e = dft_columns(g, modes);
  Eigen::MatrixXcd p = e * e.adjoint();
  for (Eigen::Index j = 0; j < p.rows(); ++j)
    if (std::abs(g.coordinate(static_cast<std::size_t>(j))) > R) p.row(j).setZero();
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(p).singularValues()(0);
}

}  // namespace

TEST_CASE("smooth bumps") {
  const auto g = make_grid(1, 4.0, 512);
  const Field b = smooth_bump(g, 1.0);
  CHECK(l2_norm(b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mass_in_region(b, RegionMask::exterior(1.0)) == 0.0);
  const Field o = smooth_bump(g, 1.0, true);
  CHECK(std::abs(inner(b, o)) < 1e-14);
  CHECK_THROWS_AS(normalized(Field::zeros(g)), Error);
}

TEST_CASE("uncertainty norm trivial cases") {
  const auto g = make_grid(1, 8.0, 256);
  const auto h = HamiltonianSpec::free(g);
  const auto sym = kinetic_symbol(h);
  const double top = *std::max_element(sym.begin(), sym.end());
  CHECK(uncertainty_norm(h, 100.0, top).norm == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(uncertainty_norm(h, 1.0, -1.0).norm == 0.0);
  UncertaintyOptions ex;
  ex.exclude_zero_mode = true;
  CHECK(uncertainty_norm(h, 1.0, 1e-6, ex).norm == 0.0);
  CHECK_THROWS_AS(uncertainty_norm(h, 0.0, 1.0), Error);
}

TEST_CASE("uncertainty norm against a brute-force projector") {
  const auto g = make_grid(1, 16.0, 256);
  const auto h = HamiltonianSpec::free(g);
  for (auto [R, d] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{0.5, 4.0}}) {
    const double ref = brute_uncertainty(g, R, d);
    CHECK(uncertainty_norm(h, R, d).norm == doctest::Approx(ref).epsilon(1e-6));
    CHECK(uncertainty_norm_dense(h, R, d) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("power iteration against dense SVD on a wide box") {
  const auto g = make_grid(1, 32.0, 1024);
  const auto h = HamiltonianSpec::free(g);
  const auto r = uncertainty_norm(h, 1.0, 1.0);
  CHECK(r.converged);
  CHECK(std::abs(r.norm - uncertainty_norm_dense(h, 1.0, 1.0)) <= 1e-6);
  CHECK(r.norm < 1.0);
  // The eigenbasis path agrees on a potential of zero.
  const auto hz = HamiltonianSpec::with_potential(make_grid(1, 16.0, 256), make_potential("zero"));
  UncertaintyOptions opt;
  opt.decomposition = diagonalize(hz);
  CHECK(uncertainty_norm(hz, 1.0, 1.0, opt).norm ==
        doctest::Approx(uncertainty_norm_dense(hz, 1.0, 1.0, opt)).epsilon(1e-6));
}

TEST_CASE("uncertainty scan monotonicity and collapse") {
  const auto g = make_grid(1, 128.0, 4096);
  const auto h = HamiltonianSpec::free(g);
  const auto scan = uncertainty_scan(h, {1.0, 2.0, 4.0}, {1.0, 0.25, 1.0 / 16});
  CHECK(scan.monotonicity_violations == 0);
  REQUIRE(scan.collapse_spread.has_value());
  CHECK(scan.collapse_groups == 3);
  CHECK(*scan.collapse_spread < 0.05);
  const auto hp = HamiltonianSpec::with_potential(make_grid(1, 8.0, 128), make_potential("gaussian_repulsive"));
  UncertaintyOptions opt;
  opt.decomposition = diagonalize(hp);
  const auto sp = uncertainty_scan(hp, {0.5, 1.0}, {0.5, 1.0}, opt);
  CHECK(!sp.collapse_spread.has_value());
  CHECK(sp.monotonicity_violations == 0);
}

TEST_CASE("certified energy floor") {
  const auto g = make_grid(1, 32.0, 1024);
  const auto h = HamiltonianSpec::free(g);
  const auto f = certified_energy_floor(h, 1.0, 0.5);
  CHECK(f.norm <= 0.5);
  CHECK(uncertainty_norm(h, 1.0, f.delta * 1.05).norm > 0.5);
  CHECK(f.velocity == doctest::Approx(2.0 * std::sqrt(f.delta)));
}

TEST_CASE("power-law fits") {
  std::vector<double> t, v;
  for (double x = 1; x < 50; x *= 1.5) {
    t.push_back(x);
    v.push_back(3.0 * std::pow(x, -1.7));
  }
  const auto fit = fit_power_law(t, v);
  CHECK(fit.valid);
  CHECK(fit.slope == doctest::Approx(-1.7).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  const std::vector<double> z(t.size(), 0.0);
  CHECK(!fit_power_law(t, z).valid);
}

TEST_CASE("minimal velocity series") {
  const auto g = make_grid(1, 64.0, 1024);
  const Propagator p(HamiltonianSpec::free(g), {Engine::multiplier});
  const Field psi = smooth_bump(g, 1.0);
  const auto zero = minimal_velocity_decay(p, psi, 0.0, {1.0, 2.0, 3.0});
  for (double v : zero.values) CHECK(v == 0.0);
  CHECK(!zero.fit.valid);
  const auto s = minimal_velocity_decay(p, psi, 1.0, {1.0, 2.0, 3.0, 4.0, 5.0});
  CHECK(s.fit_start == 1);
  const Field u3 = p.evolve(psi, 3.0);
  CHECK(s.values[2] == doctest::Approx(mass_in_region(u3, RegionMask::open(3.0))).epsilon(1e-10));
  CHECK_THROWS_AS(minimal_velocity_decay(p, psi, -1.0, {1.0}), Error);
}

TEST_CASE("Enss operator") {
  const auto g = make_grid(1, 16.0, 128);
  const auto h = HamiltonianSpec::free(g, KineticConvention::half);
  const auto dh = diagonalize(h);
  const auto da = diagonalize(dilation_generator(g));
  const SpectralFunction one = [](double) { return 1.0; };
  // At t = 0 the two dilation half-spaces are orthogonal.
  CHECK(dense_operator_norm(enss_operator(*dh, *da, g, one, 0.0, 0.5, 0.0, 16.0)) < 1e-10);
  EnssOptions opt;
  opt.theta = 1.0;
  opt.observation_radius = 8.0;
  opt.power.tolerance = 1e-10;
  opt.power.max_iterations = 5000;
  const SmoothWindow win{1.0, 2.0, 0.25};
  const std::vector<double> times{1.0, 3.0};
  const auto series = enss_decay(*dh, *da, g, win, {0.0, 5.0}, 0.5, times, opt);
  for (const auto& s : series)
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double ref = dense_operator_norm(enss_operator(*dh, *da, g, win, s.shift, 0.5, times[i], 8.0));
      CHECK(std::abs(s.series.values[i] - ref) <= 1e-6);
    }
  opt.theta = 0.2;
  CHECK_THROWS_AS(enss_decay(*dh, *da, g, win, {0.0}, 0.5, times, opt), Error);
}

TEST_CASE("observability ratio") {
  const auto g = make_grid(1, 64.0, 2048);
  const Propagator p(HamiltonianSpec::free(g), {Engine::multiplier});
  const Field u0 = smooth_bump(g, 1.0);
  const auto r = observability_ratio(p, u0, 1.0, 0.0, 10.0, 0.5, 5.0);
  CHECK(r.window_ok);
  CHECK(r.lhs == doctest::Approx(1.0));
  CHECK(r.interior_t1 + r.exterior_t1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.outer_radius == doctest::Approx(5.0));
  CHECK(r.ratio == doctest::Approx(r.lhs / (r.exterior_t1 + r.exterior_t2)));
  // Data inside the ball at t1 = 0: everything rests on the second observation.
  CHECK(r.exterior_t1 == 0.0);
  CHECK(r.exterior_t2 == doctest::Approx(mass_in_region(p.evolve(u0, 10.0), RegionMask::exterior(5.0))));
  // Shift to t1 = 0 with the data evolved to t1.
  const auto a = observability_ratio(p, u0, 1.0, 3.0, 23.0, 0.5, 5.0);
  const auto b = observability_ratio(p, p.evolve(u0, 3.0), 1.0, 0.0, 20.0, 0.5, 5.0);
  CHECK(std::abs(a.ratio - b.ratio) <= 1e-8 * b.ratio);
  CHECK(!observability_ratio(p, u0, 1.0, 0.0, 4.0, 0.5, 5.0).window_ok);
  CHECK_THROWS_AS(observability_ratio(p, u0, 1.0, 2.0, 1.0, 0.5, 5.0), Error);
}

TEST_CASE("sharpness sequence against the scaling identity") {
  const auto g = make_grid(1, 256.0, 32768);
  const Propagator p(HamiltonianSpec::free(g), {Engine::multiplier});
  const Field f = smooth_bump(g, 1.0, true);
  const double r1 = 0.1, sigma = 0.5, t = 2.0;
  const auto table = sharpness_sequence(p, f, {1, 2, 4}, r1, sigma, t);
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows) {
    const double k = row.k;
    CHECK(row.norm == doctest::Approx(1.0).epsilon(1e-4));
    // On the box stretched by k with the same point count, f_k becomes f and
    // exp(-itH) becomes exp(-i k^2 t H); masses match as fractions.
    const auto gk = make_grid(1, k * 256.0, 32768);
    const Propagator pk(HamiltonianSpec::free(gk), {Engine::multiplier});
    const Field fk = smooth_bump(gk, 1.0, true);
    const double n2 = row.norm * row.norm;
    CHECK(row.interior_mass / n2 ==
          doctest::Approx(mass_in_region(pk.evolve(fk, k * k * t), RegionMask::interior(k * sigma * t)))
              .epsilon(1e-9));
    CHECK(row.exterior_mass / n2 == doctest::Approx(mass_in_region(fk, RegionMask::exterior(k * r1))).epsilon(1e-9));
  }
  CHECK(table.exterior_decreasing);
  CHECK(table.interior_decreasing);
}
