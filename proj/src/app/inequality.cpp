// Runners for propagation checks, uncertainty scans, decay laws,
// observability ratios and sharpness sequences.

#include <algorithm>
#include <cmath>
#include <random>

#include "common.hpp"
#include "obslab/fft.hpp"

namespace obslab::app {

using namespace detail;

namespace {

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

std::vector<double> checked_times(Section& p, const std::string& key, const std::vector<double>& fallback) {
  auto t = p.numbers(key, fallback);
  if (t.empty()) p.fail(key, "needs at least one time");
  if (t.front() < 0.0 || !strictly_increasing(t)) p.fail(key, "must be nonnegative and strictly increasing");
  return t;
}

double relative_l2(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

// ---- propagation ------------------------------------------------------------

Report run_propagation(const ExperimentConfig& c) {
  Section p(c.params, "params");
  const double width = p.positive("gaussian_width", 1.0);
  const auto times = checked_times(p, "reference_times", {0.5, 2.0});
  const double ref_tol = p.positive("reference_tolerance", 1e-8);
  Section sp = p.child("splitstep");
  const double sl = sp.positive("half_extent", 16.0);
  const int sn = sp.integer("points", 256);
  const std::string pot = sp.text("potential", "gaussian_repulsive", {"gaussian_repulsive", "gaussian_well", "zero"});
  const double beta = sp.number("beta", 1.0);
  const double sdt = sp.positive("dt", 1e-3);
  const double st = sp.positive("time", 1.0);
  const double s_tol = sp.positive("tolerance", 1e-6);
  p.adopt("splitstep", sp);
  const double unit_t = p.positive("unitarity_time", 7.0);
  const double unit_tol = p.positive("unitarity_tolerance", 1e-10);
  p.finish();
  if (c.hamiltonian.kind != HamiltonianKind::free)
    throw ConfigError("propagation: the closed-form reference needs hamiltonian.kind = free");
  if (c.grid.dim != 1) throw ConfigError("propagation: the closed-form reference is 1-D");
  if (sn < 2 || sn % 2 || static_cast<std::size_t>(sn) > kDenseDofLimit)
    throw ConfigError("params.splitstep.points: must be even and at most " + std::to_string(kDenseDofLimit));

  Report r;
  r.config = c.echo;
  r.config["params"] = p.echo();

  // Multiplier engine against the dispersed Gaussian.
  const Propagator mult(c.hamiltonian, {Engine::multiplier});
  const Field g0 = free_gaussian_reference(c.grid, 0.0, width, c.hamiltonian.convention);
  Json ref = Json::array();
  double worst = 0.0;
  for (double t : times) {
    const Field u = mult.evolve(g0, t);
    const double e = relative_l2(u, free_gaussian_reference(c.grid, t, width, c.hamiltonian.convention));
    worst = std::max(worst, e);
    ref.push_back(Json{{"t", t}, {"relative_error", number(e)}});
    r.monitor_wrap(wrap_monitor(u));
  }
  r.results["multiplier_vs_closed_form"] = ref;
  r.add(check("multiplier vs closed-form Gaussian", worst, "<=", ref_tol, "propagation.free_gaussian"));

  // Splitstep against dense on a potential.
  const GridSpec sg = make_grid(1, sl, static_cast<std::size_t>(sn));
  const auto hv = HamiltonianSpec::with_potential(sg, make_potential(pot, beta), c.hamiltonian.convention);
  const auto dv = diagonalize(hv);
  const Propagator dense(hv, {Engine::dense}, dv);
  const Propagator split(hv, {Engine::splitstep, sdt});
  const Field f = normalized(Field::sample(sg, [](const Point& x) {
    return std::polar(std::exp(-(x[0] + 1.0) * (x[0] + 1.0) / 2), 0.5 * x[0]);
  }));
  const double se = relative_l2(split.evolve(f, st), dense.evolve(f, st));
  r.results["splitstep_vs_dense"] = Json{{"t", st}, {"dt", sdt}, {"relative_difference", number(se)}};
  r.add(check("splitstep vs dense", se, "<=", s_tol, "propagation.splitstep_dense"));

  // Unitarity on every engine.
  const Field rnd = [&] {
    Field z = Field::zeros(sg);
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> n;
    for (auto& v : z.values) v = Complex(n(rng), n(rng));
    return normalized(z);
  }();
  Json unit = Json::object();
  double worst_u = 0.0;
  auto drift = [&](const std::string& name, const Propagator& pr) {
    const double d = std::abs(l2_norm(pr.evolve(rnd, unit_t)) - 1.0);
    unit[name] = number(d);
    worst_u = std::max(worst_u, d);
  };
  drift("multiplier", Propagator(HamiltonianSpec::free(sg, c.hamiltonian.convention), {Engine::multiplier}));
  drift("multiplier_fractional", Propagator(HamiltonianSpec::fractional(sg, 1.5, c.hamiltonian.convention),
                                            {Engine::multiplier}));
  drift("splitstep", split);
  drift("dense", dense);
  r.results["unitarity_drift"] = unit;
  r.add(check("unitarity drift across engines", worst_u, "<=", unit_tol, "propagation.unitarity"));
  return r;
}

// ---- uncertainty ------------------------------------------------------------

Report run_uncertainty(const ExperimentConfig& c) {
  Section p(c.params, "params");
  const auto radii = p.numbers("radii", {0.5, 1.0, 2.0, 4.0});
  const auto deltas = p.numbers("deltas", {0.25, 0.5, 1.0, 2.0});
  if (radii.empty() || deltas.empty()) p.fail("radii", "scan needs at least one radius and one delta");
  for (double R : radii)
    if (!(R > 0.0)) p.fail("radii", "radii must be positive");
  Section pr = p.child("probe");
  const double probe_R = pr.positive("radius", 1.0);
  const double probe_d = pr.number("delta", 1.0);
  const bool probe_dense = pr.flag("dense_check", true);
  const double dense_tol = pr.positive("dense_tolerance", 1e-6);
  const bool require_below_one = pr.flag("require_norm_below_one", true);
  p.adopt("probe", pr);
  const bool excl = p.flag("exclude_zero_mode", false);
  const double mono_tol = p.number("monotonicity_tolerance", 1e-8);
  const double collapse_tol = p.positive("collapse_tolerance", 0.02);
  const bool need_collapse = p.flag("require_collapse", false);
  std::optional<double> floor_threshold;
  if (p.has("floor_threshold")) floor_threshold = p.positive("floor_threshold", 0.5);
  UncertaintyOptions opt;
  opt.power = read_power(p, c.seed, 1e-9, 5000);
  opt.exclude_zero_mode = excl;
  p.finish();

  opt.decomposition = decompose_if(c.hamiltonian.has_potential(), c.hamiltonian, "uncertainty with a potential");

  Report r;
  r.config = c.echo;
  r.config["params"] = p.echo();
  r.results["grid"] = grid_json(c.grid);
  r.results["hamiltonian"] = c.hamiltonian.describe();

  const auto scan = uncertainty_scan(c.hamiltonian, radii, deltas, opt, mono_tol);
  Json table = Json::array();
  Series csv;
  csv.name = "uncertainty_scan";
  std::vector<double> cR, cD, cN;
  int unconverged = 0;
  double worst_norm = 0.0;
  for (std::size_t i = 0; i < scan.radii.size(); ++i)
    for (std::size_t j = 0; j < scan.deltas.size(); ++j) {
      const auto& e = scan.table[i][j];
      table.push_back(Json{{"R", e.radius},
                           {"delta", e.delta},
                           {"norm", number(e.norm)},
                           {"iterations", e.iterations},
                           {"residual", number(e.residual)},
                           {"converged", e.converged}});
      cR.push_back(e.radius);
      cD.push_back(e.delta);
      cN.push_back(e.norm);
      if (!e.converged) ++unconverged;
      worst_norm = std::max(worst_norm, e.norm);
    }
  csv.add_column("R", cR);
  csv.add_column("delta", cD);
  csv.add_column("norm", cN);
  r.series.push_back(csv);
  r.results["table"] = table;
  r.results["monotonicity_violations"] = scan.monotonicity_violations;
  r.results["unconverged"] = unconverged;
  r.add(check("scan monotone in R and delta (violations)", scan.monotonicity_violations, "==", 0,
              "uncertainty.monotonicity"));
  r.add(check("norms bounded by 1", worst_norm, "<=", 1.0 + 1e-8, "uncertainty.bounded"));
  r.add(check("power iterations converged (count not converged)", unconverged, "==", 0, "uncertainty.power_iteration",
              false));
  if (!c.hamiltonian.has_potential()) {
    const double s = c.hamiltonian.symbol_exponent();
    r.results["collapse_invariant"] = "R * delta^(1/" + format_csv_number(s) + ")";
    r.results["collapse_groups"] = scan.collapse_groups;
    r.results["collapse_spread"] = scan.collapse_spread ? number(*scan.collapse_spread) : Json(nullptr);
    if (need_collapse) {
      if (scan.collapse_spread)
        r.add(check("collapse at equal invariant (relative spread)", *scan.collapse_spread, "<=", collapse_tol,
                    "uncertainty.scaling_collapse"));
      else
        r.add(check_true("collapse groups present", false, "uncertainty.scaling_collapse"));
    }
  }

  // Probe: power iteration against dense SVD and the norm-below-one property.
  const auto pr_res = uncertainty_norm(c.hamiltonian, probe_R, probe_d, opt);
  Json probe{{"R", probe_R}, {"delta", probe_d}, {"norm", number(pr_res.norm)}, {"iterations", pr_res.iterations},
             {"converged", pr_res.converged}};
  if (probe_dense) {
    const double dn = uncertainty_norm_dense(c.hamiltonian, probe_R, probe_d, opt);
    probe["dense_norm"] = number(dn);
    probe["difference"] = number(std::abs(dn - pr_res.norm));
    r.add(check("power iteration vs dense SVD at probe", std::abs(dn - pr_res.norm), "<=", dense_tol,
                "uncertainty.dense_oracle"));
  }
  if (require_below_one) r.add(check("norm at probe", pr_res.norm, "<", 1.0, "uncertainty.norm_below_one"));
  r.results["probe"] = probe;

  if (floor_threshold) {
    const auto fl = certified_energy_floor(c.hamiltonian, probe_R, *floor_threshold, opt);
    r.results["energy_floor"] = Json{{"R", probe_R},
                                     {"threshold", *floor_threshold},
                                     {"delta", number(fl.delta)},
                                     {"norm", number(fl.norm)},
                                     {"group_velocity", number(fl.velocity)},
                                     {"convention", to_string(c.hamiltonian.convention)}};
  }
  return r;
}

// ---- minimal velocity -------------------------------------------------------

Report run_minimal_velocity(const ExperimentConfig& c) {
  Section p(c.params, "params");
  const auto win = read_window(p, "window", {1.0, 4.0, 0.5});
  Field data = read_data(p, "data", c.grid, "gaussian");
  const double floor = c.hamiltonian.group_velocity(win.lo);
  double v = 0.0;
  if (p.has("velocity")) {
    v = p.number("velocity", 0.0);
  } else {
    v = p.number("velocity_fraction", 0.5) * floor;
  }
  if (v < 0.0) p.fail("velocity", "must be nonnegative");
  const auto times = checked_times(p, "times", {5, 7.5, 10, 12.5, 15, 20, 25, 30, 35, 40, 45, 50});
  const double skip = p.number("skip_fraction", 0.2);
  const double slope_max = p.number("slope_max", -1.8);
  const double r2_min = p.number("r_squared_min", 0.9);
  p.finish();
  if (!(skip >= 0.0 && skip < 1.0)) throw ConfigError("params.skip_fraction: must lie in [0, 1)");

  const auto decomp = decompose_if(c.hamiltonian.has_potential(), c.hamiltonian, "minimal-velocity with a potential");
  const SmoothWindow w{win.lo, win.hi, win.ramp};
  const Field psi = normalized(smooth_projector(c.hamiltonian, w, decomp).apply(data));
  const Propagator prop(c.hamiltonian, c.plan(), decomp);

  Report r;
  r.config = c.echo;
  r.config["params"] = p.echo();
  const auto s = minimal_velocity_decay(prop, psi, v, times, skip);
  r.monitor_wrap(s.max_wrap_mass);
  r.results["velocity"] = v;
  r.results["velocity_floor"] = floor;
  r.results["velocity_floor_convention"] = to_string(c.hamiltonian.convention);
  r.results["window"] = Json{{"lo", win.lo}, {"hi", win.hi}, {"ramp", win.ramp}};
  r.results["quantity"] = "||chi(|x| < v t) exp(-itH) psi||^2";
  r.results["series"] = decay_json(s);
  r.series.push_back(decay_csv("minimal_velocity", s));
  r.add(check("interior-mass log-log slope", s.fit.valid ? s.fit.slope : 0.0, "<=", slope_max,
              "minimal_velocity.decay_rate"));
  r.add(check("fit R^2", s.fit.r_squared, ">=", r2_min, "minimal_velocity.fit_quality"));
  r.add(check("boundary mass", s.max_wrap_mass, "<=", kWrapThreshold, "grid.wrap_around"));
  engine_cross_check(r, prop, psi, times.front());
  return r;
}

// ---- Enss -------------------------------------------------------------------

Report run_enss(const ExperimentConfig& c) {
  Section p(c.params, "params");
  const auto win = read_window(p, "window", {1.0, 2.0, 0.25});
  EnssOptions opt;
  opt.theta = p.positive("theta", 2.0 * win.lo);
  const double v = p.number("velocity", 0.5);
  const auto shifts = p.numbers("shifts", {-20.0, 0.0, 20.0});
  const auto times = checked_times(p, "times", {5, 7.5, 10, 15, 20, 25, 30, 35, 40});
  opt.observation_radius = p.positive("observation_radius", 32.0);
  opt.skip_fraction = p.number("skip_fraction", 0.2);
  opt.bound_exponent = p.number("bound_exponent", 0.9);
  const double slope_max = p.number("slope_max", -0.9);
  const double ratio_max = p.positive("constant_ratio_max", 3.0);
  opt.power = read_power(p, c.seed, 1e-8, 5000);
  p.finish();
  if (shifts.empty()) throw ConfigError("params.shifts: needs at least one shift");
  if (c.grid.dim != 1) throw ConfigError("enss: the dilation eigenbasis is built on 1-D grids");
  if (!(v >= 0.0 && v < std::sqrt(opt.theta)))
    throw ConfigError("params.velocity: needs 0 <= v < sqrt(theta)");

  const auto dh = decompose_if(true, c.hamiltonian, "enss");
  const auto da = diagonalize(dilation_generator(c.grid));
  const SmoothWindow w{win.lo, win.hi, win.ramp};

  Report r;
  r.config = c.echo;
  r.config["params"] = p.echo();
  const auto series = enss_decay(*dh, *da, c.grid, w, shifts, v, times, opt);
  Json per = Json::array();
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  std::vector<double> envelope(times.size(), 0.0);
  for (const auto& s : series) {
    Json j = decay_json(s.series);
    j["shift"] = s.shift;
    j["bound_constant"] = number(s.bound_constant);
    j["unconverged"] = s.unconverged;
    per.push_back(j);
    r.series.push_back(decay_csv("enss_a" + format_csv_number(s.shift), s.series));
    r.add(check("slope at a = " + format_csv_number(s.shift), s.series.fit.valid ? s.series.fit.slope : 0.0, "<=",
                slope_max, "enss.decay_rate"));
    r.add(check("unconverged norm estimates at a = " + format_csv_number(s.shift), s.unconverged, "==", 0,
                "enss.power_iteration", false));
    cmin = std::min(cmin, s.bound_constant);
    cmax = std::max(cmax, s.bound_constant);
    for (std::size_t i = 0; i < times.size(); ++i) envelope[i] = std::max(envelope[i], s.series.values[i]);
  }
  DecaySeries env;
  env.times = times;
  env.values = envelope;
  fit_tail(env, opt.skip_fraction);
  r.results["theta"] = opt.theta;
  r.results["velocity"] = v;
  r.results["per_shift"] = per;
  r.results["max_over_shifts"] = decay_json(env);
  const double ratio = cmin > 0.0 ? cmax / cmin : std::numeric_limits<double>::infinity();
  r.results["constant_ratio"] = number(ratio);
  r.add(check("bound constants across shifts (max/min)", ratio, "<=", ratio_max, "enss.uniform_in_shift"));
  return r;
}

// ---- observability ----------------------------------------------------------

Report run_observability(const ExperimentConfig& c) {
  Section p(c.params, "params");
  const double R = p.positive("radius", 1.0);
  auto gaps = p.numbers("gaps", {10.0, 20.0, 40.0});
  const double t1 = p.number("t1", 0.0);
  const double shift = p.positive("shift_time", 3.0);
  const double T0 = p.positive("T0", 5.0);
  const double floor_threshold = p.positive("floor_threshold", 0.5);
  const double sigma_fraction = p.positive("sigma_fraction", 0.5);
  std::optional<double> sigma_fixed;
  if (p.has("sigma")) sigma_fixed = p.positive("sigma", 1.0);
  const double e_max = p.positive("energy_max", 64.0);
  const double ramp_fraction = p.positive("ramp_fraction", 0.25);
  const double upper_ramp_fraction = p.positive("upper_ramp_fraction", 0.25);
  Field bump = read_data(p, "data", c.grid, "bump");
  const double shift_tol = p.positive("shift_tolerance", 1e-8);
  const auto sigma_scan = p.numbers("sigma_scan", {});
  const double scan_bound = p.positive("sigma_scan_bound", 10.0);
  UncertaintyOptions uopt;
  uopt.power = read_power(p, c.seed, 1e-9, 5000);
  p.finish();
  if (gaps.empty()) throw ConfigError("params.gaps: needs at least one gap");
  if (!strictly_increasing(gaps) || !(gaps.front() > 0.0))
    throw ConfigError("params.gaps: must be positive and strictly increasing");
  if (t1 < 0.0) throw ConfigError("params.t1: must be nonnegative");

  const auto decomp = decompose_if(c.hamiltonian.has_potential(), c.hamiltonian, "observability with a potential");
  uopt.decomposition = decomp;

  Report r;
  r.config = c.echo;
  r.config["params"] = p.echo();

  // Certified floor delta_1 and the default sigma.
  const auto fl = certified_energy_floor(c.hamiltonian, R, floor_threshold, uopt);
  const double sigma = sigma_fixed ? *sigma_fixed : sigma_fraction * c.hamiltonian.group_velocity(fl.delta);
  r.results["energy_floor"] = Json{{"delta", number(fl.delta)},
                                   {"norm", number(fl.norm)},
                                   {"threshold", floor_threshold},
                                   {"group_velocity", number(fl.velocity)}};
  r.results["sigma"] = sigma;
  r.results["sigma_source"] = sigma_fixed ? "config" : "half the group velocity at the energy floor";
  const double lo = fl.delta;
  // A slow upper ramp keeps the data spatially localized; the lower ramp
  // is tied to the floor so the data stays above it.
  const double ramp = ramp_fraction * lo;
  const double upper = upper_ramp_fraction * e_max;
  if (!(e_max - lo >= ramp + upper)) throw ConfigError("params.energy_max: must exceed the energy floor by both ramps");
  const SpectralFunction window = [=](double E) {
    return smooth_step((E - lo) / ramp) * smooth_step((e_max - E) / upper);
  };
  const Field u0 = normalized(smooth_projector(c.hamiltonian, window, decomp).apply(bump));
  r.results["data_window"] = Json{{"lo", lo}, {"hi", e_max}, {"lower_ramp", ramp}, {"upper_ramp", upper}};

  const Propagator prop(c.hamiltonian, c.plan(), decomp);
  Json rows = Json::array();
  Series csv;
  csv.name = "observability";
  std::vector<double> cg, ct1, ct2, clhs, ce1, ce2, cratio;
  bool finite = true, conform = true, nonincreasing = true;
  double last = std::numeric_limits<double>::infinity();
  std::vector<ObservabilityResult> results;
  for (double gap : gaps) {
    const auto o = observability_ratio(prop, u0, R, t1, t1 + gap, sigma, T0);
    results.push_back(o);
    r.monitor_wrap(o.max_wrap_mass);
    rows.push_back(Json{{"gap", gap},
                        {"t1", o.t1},
                        {"t2", o.t2},
                        {"outer_radius", o.outer_radius},
                        {"lhs", number(o.lhs)},
                        {"interior_t1", number(o.interior_t1)},
                        {"exterior_t1", number(o.exterior_t1)},
                        {"exterior_t2", number(o.exterior_t2)},
                        {"ratio", number(o.ratio)},
                        {"window_ok", o.window_ok}});
    cg.push_back(gap);
    ct1.push_back(o.t1);
    ct2.push_back(o.t2);
    clhs.push_back(o.lhs);
    ce1.push_back(o.exterior_t1);
    ce2.push_back(o.exterior_t2);
    cratio.push_back(o.ratio);
    finite = finite && std::isfinite(o.ratio);
    conform = conform && o.window_ok;
    nonincreasing = nonincreasing && o.ratio <= last * (1.0 + 1e-12);
    last = o.ratio;
  }
  csv.add_column("gap", cg);
  csv.add_column("t1", ct1);
  csv.add_column("t2", ct2);
  csv.add_column("lhs", clhs);
  csv.add_column("exterior_t1", ce1);
  csv.add_column("exterior_t2", ce2);
  csv.add_column("ratio", cratio);
  r.series.push_back(csv);
  r.results["rows"] = rows;
  r.add(check_true("ratios finite", finite, "observability.finite"));
  r.add(check_true("ratio nonincreasing in t2 - t1", nonincreasing, "observability.monotone_in_gap"));
  r.add(check_true("windows conform (t2 - t1 > R^p T0)", conform, "observability.window"));

  // Time-shift reduction to t1 = 0.
  const double g0 = gaps.front();
  const auto a = observability_ratio(prop, u0, R, t1 + shift, t1 + shift + g0, sigma, T0);
  const auto b = observability_ratio(prop, prop.evolve(u0, t1 + shift), R, 0.0, g0, sigma, T0);
  const double dev = std::abs(a.ratio - b.ratio) / std::abs(b.ratio);
  r.results["time_shift"] = Json{{"shift", t1 + shift}, {"ratio_shifted", number(a.ratio)},
                                 {"ratio_reduced", number(b.ratio)}, {"relative_difference", number(dev)}};
  r.add(check("time-shift invariance", dev, "<=", shift_tol, "observability.time_shift"));
  r.add(check("boundary mass", r.max_wrap_mass, "<=", kWrapThreshold, "grid.wrap_around"));

  // Largest sigma with bounded ratios, reported only.
  if (!sigma_scan.empty()) {
    Json sj = Json::array();
    double best = 0.0;
    for (double s : sigma_scan) {
      bool ok = true;
      Json ratios = Json::array();
      for (double gap : gaps) {
        const auto o = observability_ratio(prop, u0, R, t1, t1 + gap, s, T0);
        ratios.push_back(number(o.ratio));
        ok = ok && o.ratio <= scan_bound;
      }
      sj.push_back(Json{{"sigma", s}, {"ratios", ratios}, {"bounded", ok}});
      if (ok) best = std::max(best, s);
    }
    r.results["sigma_scan"] = Json{{"bound", scan_bound}, {"rows", sj}, {"largest_bounded_sigma", best}};
  }
  engine_cross_check(r, prop, u0, gaps.front());
  return r;
}

// ---- sharpness --------------------------------------------------------------

Report run_sharpness(const ExperimentConfig& c) {
  Section p(c.params, "params");
  const auto ks = p.integers("ks", {1, 2, 4, 8});
  const double r1 = p.positive("r1", 0.1);
  const double sigma = p.positive("sigma", 0.5);
  const double t = p.positive("time", 4.0);
  const double ratio_max = p.positive("ratio_max", 0.1);
  Field f = read_data(p, "data", c.grid, "odd_bump");
  p.finish();
  if (ks.empty() || ks.front() != 1) throw ConfigError("params.ks: must start at k = 1");
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] <= ks[i - 1]) throw ConfigError("params.ks: must be strictly increasing");
  const double rk = support_radius(f) / ks.back();
  if (rk < 8.0 * c.grid.spacing())
    throw ConfigError("params.ks: the largest k leaves fewer than 8 cells across the support; refine the grid");

  const auto decomp = c.plan().engine == Engine::dense ? diagonalize(c.hamiltonian) : nullptr;
  const Propagator prop(c.hamiltonian, c.plan(), decomp);

  Report r;
  r.config = c.echo;
  r.config["params"] = p.echo();
  const auto table = sharpness_sequence(prop, f, ks, r1, sigma, t);
  Json rows = Json::array();
  Series csv;
  csv.name = "sharpness";
  std::vector<double> ck, cn, ce, ci;
  for (const auto& row : table.rows) {
    rows.push_back(Json{{"k", row.k},
                        {"norm", number(row.norm)},
                        {"exterior_mass", number(row.exterior_mass)},
                        {"interior_mass", number(row.interior_mass)},
                        {"boundary_mass", number(row.wrap_mass)}});
    ck.push_back(row.k);
    cn.push_back(row.norm);
    ce.push_back(row.exterior_mass);
    ci.push_back(row.interior_mass);
    r.monitor_wrap(row.wrap_mass);
  }
  csv.add_column("k", ck);
  csv.add_column("norm", cn);
  csv.add_column("exterior_mass", ce);
  csv.add_column("interior_mass", ci);
  r.series.push_back(csv);
  r.results["rows"] = rows;
  r.results["exterior_radius"] = r1;
  r.results["interior_radius"] = sigma * t;
  r.add(check_true("exterior mass strictly decreasing in k", table.exterior_decreasing, "sharpness.exterior_trend"));
  r.add(check_true("interior mass strictly decreasing in k", table.interior_decreasing, "sharpness.interior_trend"));
  r.add(check("exterior mass last/first", table.exterior_ratio, "<=", ratio_max, "sharpness.exterior_limit"));
  r.add(check("interior mass last/first", table.interior_ratio, "<=", ratio_max, "sharpness.interior_limit"));
  r.add(check("boundary mass", r.max_wrap_mass, "<=", kWrapThreshold, "grid.wrap_around", false));

  // Mass leaving through the box edge is harmless unless it can come back
  // around into the interior ball before t. That needs group velocity above
  // (2L - r_k - sigma t) / t, which for the most concentrated datum bounds
  // the contamination of the interior column.
  const double vmin = (2.0 * c.grid.half_extent - rk - sigma * t) / t;
  const double s = c.hamiltonian.symbol_exponent();
  const double kappa = c.hamiltonian.kinetic_factor();
  const Field fk = concentrate(f, ks.back());
  const auto xi2 = frequency_squared(c.grid);
  std::vector<double> fast(xi2.size());
  for (std::size_t i = 0; i < xi2.size(); ++i)
    fast[i] = kappa * s * std::pow(std::sqrt(xi2[i]), s - 1.0) > vmin ? 1.0 : 0.0;
  const double reentry = mass(apply_multiplier(fk, fast));
  r.results["reentry"] = Json{{"velocity_threshold", vmin}, {"mass", number(reentry)},
                              {"note", "kinetic group velocity; the potential is short range"}};
  r.add(check("mass fast enough to wrap back into the interior ball", reentry, "<=", kWrapThreshold,
              "grid.wrap_reentry"));
  return r;
}

}  // namespace obslab::app
