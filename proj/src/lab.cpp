#include "obslab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "obslab/kernels.hpp"

namespace obslab {

namespace {

Eigen::Map<const Eigen::VectorXcd> view(const Field& f) {
  return {f.values.data(), static_cast<Eigen::Index>(f.size())};
}

SpectralFunction low_band(double delta, bool exclude_zero) {
  return [delta, exclude_zero](double x) { return x <= delta && !(exclude_zero && x == 0.0) ? 1.0 : 0.0; };
}

// Frequency vector of a flat FFT bin.
Point frequency_point(const GridSpec& g, std::size_t flat) {
  Point p{0.0, 0.0, 0.0};
  for (int a = g.dim - 1; a >= 0; --a) {
    p[static_cast<std::size_t>(a)] = g.frequency(flat % g.points_per_axis);
    flat /= g.points_per_axis;
  }
  return p;
}

}  // namespace

Field normalized(const Field& f) {
  const double n = l2_norm(f);
  if (n == 0.0) throw Error("cannot normalize a zero field");
  Field out = f;
  for (auto& z : out.values) z /= n;
  return out;
}

Field smooth_bump(const GridSpec& g, double radius, bool odd) {
  Field f = Field::sample(g, [&](const Point& x) {
    const double r2 = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (radius * radius);
    if (r2 >= 1.0) return Complex(0.0);
    const double b = std::exp(-1.0 / (1.0 - r2));
    return Complex(odd ? b * x[0] / radius : b);
  });
  return normalized(f);
}

// ---- uncertainty ------------------------------------------------------------

UncertaintyResult uncertainty_norm(const HamiltonianSpec& h, double R, double delta, const UncertaintyOptions& opt) {
  if (!(R > 0.0)) throw Error("radius must be positive");
  const GridSpec& g = h.grid;
  const auto proj = smooth_projector(h, low_band(delta, opt.exclude_zero_mode), opt.decomposition);
  const auto keep = RegionMask::interior(R).indicator(g);
  Field buf = Field::zeros(g);
  auto gram = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    std::copy(in.data(), in.data() + in.size(), buf.values.begin());
    buf = proj.apply(buf);
    kernels::mask(buf.values, keep);
    buf = proj.apply(buf);
    out = view(buf);
  };
  const auto pi = operator_norm(gram, static_cast<Eigen::Index>(g.dofs()), opt.power);
  return {R, delta, pi.norm, pi.iterations, pi.residual, pi.converged};
}

double uncertainty_norm_dense(const HamiltonianSpec& h, double R, double delta, const UncertaintyOptions& opt) {
  const GridSpec& g = h.grid;
  const auto r2 = radius_squared(g);
  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < r2.size(); ++j)
    if (r2[j] <= R * R) rows.push_back(j);
  const auto band = low_band(delta, opt.exclude_zero_mode);
  if (!h.has_potential()) {
    const auto sym = kinetic_symbol(h);
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < sym.size(); ++k)
      if (band(sym[k]) != 0.0) cols.push_back(k);
    Eigen::MatrixXcd e(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    const double amp = 1.0 / std::sqrt(static_cast<double>(g.dofs()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const Point xi = frequency_point(g, cols[c]);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const Point x = g.point(rows[r]);
        const double ph = xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2];
        e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::polar(amp, ph);
      }
    }
    return dense_operator_norm(e);
  }
  auto d = opt.decomposition ? opt.decomposition : diagonalize(h);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < d->eigenvalues.size(); ++k)
    if (band(d->eigenvalues(k)) != 0.0) cols.push_back(k);
  std::vector<Eigen::Index> ri(rows.begin(), rows.end());
  return dense_operator_norm(d->eigenvectors(ri, cols));
}

UncertaintyScan uncertainty_scan(const HamiltonianSpec& h, const std::vector<double>& radii,
                                 const std::vector<double>& deltas, const UncertaintyOptions& opt, double tol) {
  UncertaintyScan scan;
  scan.radii = radii;
  scan.deltas = deltas;
  std::sort(scan.radii.begin(), scan.radii.end());
  std::sort(scan.deltas.begin(), scan.deltas.end());
  for (double R : scan.radii) {
    std::vector<UncertaintyResult> row;
    for (double d : scan.deltas) row.push_back(uncertainty_norm(h, R, d, opt));
    scan.table.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < scan.radii.size(); ++i)
    for (std::size_t j = 0; j < scan.deltas.size(); ++j) {
      const double v = scan.table[i][j].norm;
      if (j + 1 < scan.deltas.size() && scan.table[i][j + 1].norm < v - tol) ++scan.monotonicity_violations;
      if (i + 1 < scan.radii.size() && scan.table[i + 1][j].norm < v - tol) ++scan.monotonicity_violations;
    }
  if (!h.has_potential()) {
    const double s = h.symbol_exponent();
    std::map<long long, std::vector<double>> groups;
    for (std::size_t i = 0; i < scan.radii.size(); ++i)
      for (std::size_t j = 0; j < scan.deltas.size(); ++j) {
        const double inv = std::log(scan.radii[i]) + std::log(scan.deltas[j]) / s;
        groups[std::llround(inv * 1e6)].push_back(scan.table[i][j].norm);
      }
    double spread = 0.0;
    for (const auto& [key, vals] : groups) {
      if (vals.size() < 2) continue;
      ++scan.collapse_groups;
      const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
      if (*hi > 0.0) spread = std::max(spread, (*hi - *lo) / *hi);
    }
    if (scan.collapse_groups > 0) scan.collapse_spread = spread;
  }
  return scan;
}

EnergyFloor certified_energy_floor(const HamiltonianSpec& h, double R, double threshold,
                                   const UncertaintyOptions& opt) {
  const auto sym = kinetic_symbol(h);
  const double top = *std::max_element(sym.begin(), sym.end());
  double lo = 1e-8;
  double hi = top;
  const auto at_lo = uncertainty_norm(h, R, lo, opt);
  if (at_lo.norm > threshold) throw Error("no energy floor: the norm exceeds the threshold at the lowest energy");
  EnergyFloor out{lo, at_lo.norm, h.group_velocity(lo)};
  const auto at_hi = uncertainty_norm(h, R, hi, opt);
  if (at_hi.norm <= threshold) return {hi, at_hi.norm, h.group_velocity(hi)};
  for (int it = 0; it < 40; ++it) {
    const double mid = std::sqrt(lo * hi);
    const auto r = uncertainty_norm(h, R, mid, opt);
    if (r.norm <= threshold) {
      lo = mid;
      out = {mid, r.norm, h.group_velocity(mid)};
    } else {
      hi = mid;
    }
    if (hi / lo < 1.0 + 1e-6) break;
  }
  return out;
}

// ---- decay laws -------------------------------------------------------------

void fit_tail(DecaySeries& s, double skip_fraction) {
  s.fit_start = static_cast<std::size_t>(std::floor(skip_fraction * static_cast<double>(s.times.size())));
  const std::span<const double> t(s.times), v(s.values);
  s.fit = fit_power_law(t.subspan(s.fit_start), v.subspan(s.fit_start));
}

DecaySeries minimal_velocity_decay(const Propagator& p, const Field& psi, double v, const std::vector<double>& times,
                                   double skip_fraction) {
  if (v < 0.0) throw Error("velocity must be nonnegative");
  DecaySeries out;
  out.times = times;
  const auto traj = p.trajectory(psi, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.values.push_back(mass_in_region(traj[i], RegionMask::open(v * times[i])));
    out.max_wrap_mass = std::max(out.max_wrap_mass, wrap_monitor(traj[i]));
  }
  out.wrap_flag = out.max_wrap_mass > kWrapThreshold;
  fit_tail(out, skip_fraction);
  return out;
}

namespace {

struct EnssFactors {
  std::vector<Eigen::Index> rows;  // grid points with |x| <= r
  std::vector<Eigen::Index> window;  // H eigen-indices with g != 0
  Eigen::VectorXd gw;
  Eigen::MatrixXcd w;  // V_A^* Q
};

EnssFactors enss_factors(const EigenDecomposition& h, const EigenDecomposition& a, const GridSpec& grid,
                         const SpectralFunction& g, double radius) {
  if (h.size() != grid.dofs() || a.size() != grid.dofs()) throw Error("decompositions do not match the grid");
  EnssFactors f;
  const auto r2 = radius_squared(grid);
  for (std::size_t j = 0; j < r2.size(); ++j)
    if (r2[j] <= radius * radius) f.rows.push_back(static_cast<Eigen::Index>(j));
  std::vector<double> gv;
  for (Eigen::Index k = 0; k < h.eigenvalues.size(); ++k) {
    const double v = g(h.eigenvalues(k));
    if (v != 0.0) {
      f.window.push_back(k);
      gv.push_back(v);
    }
  }
  f.gw = Eigen::Map<Eigen::VectorXd>(gv.data(), static_cast<Eigen::Index>(gv.size()));
  f.w = a.eigenvectors.adjoint() * h.eigenvectors(Eigen::all, f.window);
  return f;
}

std::vector<Eigen::Index> select(const Eigen::VectorXd& lambda, bool upper, double cut) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (upper ? lambda(k) >= cut : lambda(k) < cut) out.push_back(k);
  return out;
}

// Builds (C, D, B) with K = C diag(D) B.
struct EnssPieces {
  Eigen::MatrixXcd c;
  Eigen::VectorXcd d;
  Eigen::MatrixXcd b;
};

Eigen::MatrixXcd enss_b(const EigenDecomposition& a, const EnssFactors& f, double shift) {
  const auto plus = select(a.eigenvalues, true, shift);
  return f.w(plus, Eigen::all).adjoint() * a.eigenvectors(f.rows, plus).adjoint();
}

EnssPieces enss_pieces(const EigenDecomposition& h, const EigenDecomposition& a, const EnssFactors& f,
                       const Eigen::MatrixXcd& b, double shift, double v, double t) {
  const auto minus = select(a.eigenvalues, false, shift + v * t);
  EnssPieces p;
  p.c = a.eigenvectors(f.rows, minus) * f.w(minus, Eigen::all);
  p.d.resize(f.gw.size());
  for (Eigen::Index k = 0; k < f.gw.size(); ++k)
    p.d(k) = f.gw(k) * std::polar(1.0, -t * h.eigenvalues(f.window[static_cast<std::size_t>(k)]));
  p.b = b;
  return p;
}

}  // namespace

Eigen::MatrixXcd enss_operator(const EigenDecomposition& h, const EigenDecomposition& a, const GridSpec& grid,
                                const SpectralFunction& g, double shift, double v, double t, double radius) {
  const auto f = enss_factors(h, a, grid, g, radius);
  const auto p = enss_pieces(h, a, f, enss_b(a, f, shift), shift, v, t);
  return p.c * p.d.asDiagonal() * p.b;
}

std::vector<EnssSeries> enss_decay(const EigenDecomposition& h, const EigenDecomposition& a, const GridSpec& grid,
                                   const SpectralFunction& g, const std::vector<double>& shifts, double v,
                                   const std::vector<double>& times, const EnssOptions& opt) {
  if (!(opt.theta > 0.0) || !(v < std::sqrt(opt.theta)))
    throw Error("Enss decay needs 0 <= v < sqrt(theta) with theta > 0");
  if (!(opt.observation_radius > 0.0)) throw Error("observation radius must be positive");
  const auto f = enss_factors(h, a, grid, g, opt.observation_radius);
  std::vector<EnssSeries> out;
  for (double shift : shifts) {
    EnssSeries s;
    s.shift = shift;
    s.series.times = times;
    const Eigen::MatrixXcd b = enss_b(a, f, shift);
    for (double t : times) {
      const auto p = enss_pieces(h, a, f, b, shift, v, t);
      auto gram = [&p](const Eigen::VectorXcd& in, Eigen::VectorXcd& res) {
        const Eigen::VectorXcd y = p.c * (p.d.cwiseProduct(p.b * in));
        res = p.b.adjoint() * (p.d.conjugate().cwiseProduct(p.c.adjoint() * y));
      };
      const auto r = operator_norm(gram, p.b.cols(), opt.power);
      if (!r.converged) ++s.unconverged;
      s.series.values.push_back(r.norm);
      s.bound_constant = std::max(s.bound_constant, r.norm * std::pow(1.0 + t, opt.bound_exponent));
    }
    fit_tail(s.series, opt.skip_fraction);
    out.push_back(std::move(s));
  }
  return out;
}

// ---- observability ----------------------------------------------------------

ObservabilityResult observability_ratio(const Propagator& p, const Field& u0, double R, double t1, double t2,
                                        double sigma, double T0) {
  if (!(R > 0.0) || !(sigma > 0.0)) throw Error("radius and sigma must be positive");
  if (!(t2 > t1) || t1 < 0.0) throw Error("observation times need 0 <= t1 < t2");
  const double pexp = p.hamiltonian().symbol_exponent();
  ObservabilityResult r;
  r.radius = R;
  r.t1 = t1;
  r.t2 = t2;
  r.sigma = sigma;
  r.outer_radius = sigma * (t2 - t1) / std::pow(R, pexp - 1.0);
  r.window_ok = (t2 - t1) > std::pow(R, pexp) * T0;
  const Field a = p.evolve(u0, t1);
  const Field b = p.evolve(a, t2 - t1);
  r.lhs = mass(u0);
  r.interior_t1 = mass_in_region(a, RegionMask::interior(R));
  r.exterior_t1 = mass_in_region(a, RegionMask::exterior(R));
  r.exterior_t2 = mass_in_region(b, RegionMask::exterior(r.outer_radius));
  const double denom = r.exterior_t1 + r.exterior_t2;
  r.ratio = denom > 0.0 ? r.lhs / denom : std::numeric_limits<double>::infinity();
  r.max_wrap_mass = std::max(wrap_monitor(a), wrap_monitor(b));
  return r;
}

// ---- sharpness --------------------------------------------------------------

SharpnessTable sharpness_sequence(const Propagator& p, const Field& f, const std::vector<int>& ks, double r1,
                                  double sigma, double t) {
  SharpnessTable out;
  for (int k : ks) {
    const Field fk = concentrate(f, k);
    const Field ut = p.evolve(fk, t);
    SharpnessRow row;
    row.k = k;
    row.norm = l2_norm(fk);
    row.exterior_mass = mass_in_region(fk, RegionMask::exterior(r1));
    row.interior_mass = mass_in_region(ut, RegionMask::interior(sigma * t));
    row.wrap_mass = wrap_monitor(ut);
    out.rows.push_back(row);
  }
  out.exterior_decreasing = out.interior_decreasing = !out.rows.empty();
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    out.exterior_decreasing = out.exterior_decreasing && out.rows[i].exterior_mass < out.rows[i - 1].exterior_mass;
    out.interior_decreasing = out.interior_decreasing && out.rows[i].interior_mass < out.rows[i - 1].interior_mass;
  }
  if (!out.rows.empty()) {
    const auto& a = out.rows.front();
    const auto& b = out.rows.back();
    out.exterior_ratio = a.exterior_mass > 0.0 ? b.exterior_mass / a.exterior_mass : 0.0;
    out.interior_ratio = a.interior_mass > 0.0 ? b.interior_mass / a.interior_mass : 0.0;
  }
  return out;
}

}  // namespace obslab
