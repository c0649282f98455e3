// Runners for impulse control and the commutator scaling experiment.

#include <algorithm>
#include <cmath>
#include <random>

#include "common.hpp"
#include "obslab/commutator.hpp"
#include "obslab/control.hpp"

namespace obslab::app {

using namespace detail;

namespace {

Field packet(const GridSpec& g, double x0, double k0, double w) {
  return normalized(Field::sample(g, [=](const Point& x) {
    return std::polar(std::exp(-(x[0] - x0) * (x[0] - x0) / (2 * w * w)), k0 * x[0]);
  }));
}

Json solution_json(const ControlSolution& s) {
  return Json{{"epsilon", s.epsilon},
              {"terminal_error", number(s.terminal_error)},
              {"relative_terminal_error", number(s.relative_terminal_error)},
              {"cost", number(s.cost)},
              {"gradient_norm", number(s.gradient_norm)},
              {"target_norm", number(s.target_norm)},
              {"iterations", s.iterations},
              {"converged", s.converged}};
}

bool objective_nonincreasing(const ControlSolution& s) {
  for (std::size_t i = 1; i < s.objective.size(); ++i)
    if (s.objective[i] > s.objective[i - 1] + 1e-12 * (1.0 + std::abs(s.objective[i - 1]))) return false;
  return true;
}

}  // namespace

Report run_control(const ExperimentConfig& c) {
  Section p(c.params, "params");
  const double tau1 = p.number("tau1", 1.0);
  const double tau2 = p.number("tau2", 13.0);
  const double T = p.number("horizon", 14.0);
  const double R = p.positive("radius", 1.0);
  const double sigma = p.positive("sigma", 0.85);
  const double T0 = p.positive("T0", 5.0);
  auto eps_path = p.numbers("epsilons", {1e-2, 1e-4, 1e-6});
  Field u0 = read_data(p, "initial", c.grid, "packet");
  Field uT = read_data(p, "target", c.grid, "packet");
  Section cg = p.child("cg");
  CgOptions cgo;
  cgo.max_iterations = cg.integer("max_iterations", 2000);
  cgo.relative_tolerance = cg.positive("relative_tolerance", 1e-8);
  p.adopt("cg", cg);
  const int probes = p.integer("adjoint_probes", 16);
  const double adjoint_tol = p.positive("adjoint_tolerance", 1e-8);
  const double full_eps = p.positive("full_mask_epsilon", 1e-6);
  const double full_tol = p.positive("full_mask_tolerance", 1e-3);
  const double gradient_tol = p.positive("gradient_tolerance", 1e-8);
  const double cross_factor = p.positive("cross_engine_factor", 2.0);
  const int pairs = p.integer("stability_pairs", 5);
  const double stability_tol = p.positive("stability_tolerance", 0.2);
  const std::string verify_engine = p.text("verify_engine", "auto", {"auto", "dense", "splitstep", "multiplier"});
  const bool dump = p.flag("dump_controls", true);
  p.finish();
  if (eps_path.empty()) throw ConfigError("params.epsilons: needs at least one value");
  for (std::size_t i = 0; i < eps_path.size(); ++i) {
    if (!(eps_path[i] > 0.0)) throw ConfigError("params.epsilons: must be positive");
    if (i && !(eps_path[i] < eps_path[i - 1])) throw ConfigError("params.epsilons: must be strictly decreasing");
  }
  if (!(0.0 <= tau1 && tau1 < tau2 && tau2 <= T)) throw ConfigError("params: need 0 <= tau1 < tau2 <= horizon");
  if (probes < 1 || pairs < 0) throw ConfigError("params: adjoint_probes >= 1 and stability_pairs >= 0");

  const auto decomp = c.plan().engine == Engine::dense ? diagonalize(c.hamiltonian) : nullptr;
  const Propagator prop(c.hamiltonian, c.plan(), decomp);

  // Independent engine for re-simulation.
  Engine ve;
  if (verify_engine == "auto")
    ve = c.grid.dofs() <= kDenseDofLimit ? Engine::dense
                                         : (c.plan().engine == Engine::splitstep ? Engine::multiplier : Engine::splitstep);
  else
    ve = engine_from_string(verify_engine);
  if (ve == Engine::multiplier && c.hamiltonian.has_potential())
    throw ConfigError("params.verify_engine: multiplier cannot propagate a potential");
  if (ve == Engine::dense && c.grid.dofs() > kDenseDofLimit)
    throw ConfigError("params.verify_engine: dense needs at most " + std::to_string(kDenseDofLimit) + " grid points");
  const Propagator verifier(c.hamiltonian, {ve, c.dt},
                            ve == Engine::dense ? (decomp ? decomp : diagonalize(c.hamiltonian)) : nullptr);

  Report r;
  r.config = c.echo;
  r.config["params"] = p.echo();
  r.results["verification_engine"] = to_string(ve);

  const auto problem = make_control_problem(c.hamiltonian, u0, uT, tau1, tau2, T, R, sigma, T0);
  r.results["outer_radius"] = sigma * (tau2 - tau1) / std::pow(R, c.hamiltonian.symbol_exponent() - 1.0);
  r.add(check_true("window conforms (tau2 - tau1 > R^p T0)", problem.window_ok, "control.window"));

  // Adjoint identity.
  const ControlOperators ops(problem, prop);
  const double adj = adjoint_defect(ops, c.grid, probes, c.seed);
  r.results["adjoint_defect"] = number(adj);
  r.add(check("adjoint identity defect", adj, "<=", adjoint_tol, "control.adjoint"));

  // Zero target: y = 0 gives zero controls without iterating.
  {
    const auto zp = make_control_problem(c.hamiltonian, u0, prop.evolve(u0, T), tau1, tau2, T, R, sigma, T0);
    const auto zs = solve_impulse_control(zp, prop, eps_path.back(), cgo);
    double worst = 0.0;
    for (const auto& z : zs.h1.values) worst = std::max(worst, std::abs(z));
    for (const auto& z : zs.h2.values) worst = std::max(worst, std::abs(z));
    const auto zv = verify_control(zp, zs, prop);
    r.results["zero_target"] = Json{{"solution", solution_json(zs)},
                                    {"max_control_magnitude", worst},
                                    {"relative_residual", number(zv.relative_residual)}};
    r.add(check("zero target: largest control entry", worst, "==", 0.0, "control.zero_target"));
    r.add(check("zero target: relative residual", zv.relative_residual, "<=", 1e-12, "control.zero_target"));
  }

  // Full masks: G = 2 (1 + eps) I, well conditioned.
  {
    const auto fp = make_full_control_problem(u0, uT, tau1, tau2, T);
    const auto fs = solve_impulse_control(fp, prop, full_eps, cgo);
    r.results["full_mask"] = solution_json(fs);
    r.add(check("full masks: relative terminal error", fs.relative_terminal_error, "<=", full_tol,
                "control.full_observation"));
  }

  // Epsilon path on the geometric masks.
  Series csv;
  csv.name = "control_epsilon_path";
  std::vector<double> ce, cerr, crel, ccost, cit, cgrad, cx;
  Json path = Json::array();
  bool err_down = true, cost_up = true, cg_mono = true, supp = true, gradient_ok = true, converged = true;
  double worst_cross = 0.0;
  ControlSolution last;
  for (std::size_t i = 0; i < eps_path.size(); ++i) {
    auto s = solve_impulse_control(problem, prop, eps_path[i], cgo);
    const auto cross = verify_control(problem, s, verifier);
    Json j = solution_json(s);
    j["cross_engine_residual"] = number(cross.residual);
    j["support_violation"] = number(cross.support_violation);
    j["objective_nonincreasing"] = objective_nonincreasing(s);
    path.push_back(j);
    ce.push_back(s.epsilon);
    cerr.push_back(s.terminal_error);
    crel.push_back(s.relative_terminal_error);
    ccost.push_back(s.cost);
    cit.push_back(s.iterations);
    cgrad.push_back(s.gradient_norm);
    cx.push_back(cross.residual);
    if (i) {
      err_down = err_down && s.terminal_error <= last.terminal_error;
      cost_up = cost_up && s.cost >= last.cost;
    }
    cg_mono = cg_mono && objective_nonincreasing(s);
    supp = supp && cross.support_violation == 0.0;
    gradient_ok = gradient_ok && s.gradient_norm <= gradient_tol * s.target_norm;
    converged = converged && s.converged;
    const double allowed = cross_factor * s.terminal_error + 1e-12 * s.target_norm;
    worst_cross = std::max(worst_cross, s.terminal_error > 0 ? cross.residual / allowed : 0.0);
    last = std::move(s);
  }
  csv.add_column("epsilon", ce);
  csv.add_column("terminal_error", cerr);
  csv.add_column("relative_terminal_error", crel);
  csv.add_column("cost", ccost);
  csv.add_column("iterations", cit);
  csv.add_column("gradient_norm", cgrad);
  csv.add_column("cross_engine_residual", cx);
  r.series.push_back(csv);
  r.results["epsilon_path"] = path;
  r.add(check_true("terminal error nonincreasing as epsilon decreases", err_down, "control.epsilon_path"));
  r.add(check_true("cost nondecreasing as epsilon decreases", cost_up, "control.epsilon_path"));
  r.add(check_true("objective nonincreasing per iteration", cg_mono, "control.cg_monotone"));
  r.add(check_true("controls supported in their masks", supp, "control.support"));
  r.add(check_true("gradient norm at exit within tolerance", gradient_ok, "control.stationarity"));
  r.add(check_true("conjugate gradients converged", converged, "control.convergence", false));
  r.add(check("cross-engine residual / (factor * terminal error)", worst_cross, "<=", 1.0, "control.cross_engine"));

  const double y2 = last.target_norm * last.target_norm;
  const double chat = y2 > 0 ? last.cost / y2 : 0.0;
  r.results["cost_constant"] = Json{{"epsilon", last.epsilon}, {"value", number(chat)},
                                    {"definition", "cost / ||y||^2 at the smallest epsilon"}};

  // Stability of the cost constant over seeded random data pairs.
  if (pairs > 0) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> pos(-3.0, 3.0), mom(-2.0, 2.0);
    std::vector<double> consts;
    Json rows = Json::array();
    for (int k = 0; k < pairs; ++k) {
      const double a = pos(rng), ka = mom(rng), b = pos(rng), kb = mom(rng);
      const auto pp = make_control_problem(c.hamiltonian, packet(c.grid, a, ka, 1.0), packet(c.grid, b, kb, 1.0), tau1,
                                           tau2, T, R, sigma, T0);
      const auto s = solve_impulse_control(pp, prop, last.epsilon, cgo);
      const double cc = s.cost / (s.target_norm * s.target_norm);
      consts.push_back(cc);
      rows.push_back(Json{{"initial_center", a}, {"initial_momentum", ka}, {"target_center", b},
                          {"target_momentum", kb}, {"cost_constant", number(cc)}});
    }
    auto sorted = consts;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    double dev = 0.0;
    for (double x : consts) dev = std::max(dev, std::abs(x - med) / med);
    r.results["cost_constant_stability"] = Json{{"pairs", rows}, {"median", number(med)},
                                                {"max_relative_deviation", number(dev)}};
    r.add(check("cost constant deviation from median over random pairs", dev, "<=", stability_tol,
                "control.cost_constant_stability", false));
  }

  if (dump) {
    r.dumps.push_back({"control_h1", last.h1});
    r.dumps.push_back({"control_h2", last.h2});
  }
  return r;
}

Report run_commutator(const ExperimentConfig& c) {
  Section p(c.params, "params");
  const double width = p.positive("profile_width", 4.0);
  const auto Ns = p.numbers("Ns", {8, 16, 32, 64, 128});
  const double slope_max = p.number("slope_max", -0.70);
  const double exp_tol = p.positive("exponent_tolerance", 0.05);
  const int samples = p.integer("quadrature_samples_per_unit", 4000);
  p.finish();
  if (c.grid.dim != 1) throw ConfigError("commutator: the momentum pair is built on 1-D grids");
  if (c.grid.dofs() > 2048) throw ConfigError("commutator: dense SVD is limited to 2048 grid points");
  if (Ns.size() < 5) throw ConfigError("params.Ns: needs at least 5 values");
  if (samples < 100) throw ConfigError("params.quadrature_samples_per_unit: must be at least 100");

  Report r;
  r.config = c.echo;
  r.config["params"] = p.echo();
  CommutatorPair pair;
  ScalingFit fit;
  try {
    pair = momentum_profile_pair(c.grid, width);
    fit = scaling_fit(pair, Ns);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("commutator: ") + e.what());
  }
  const double b_norm = dense_operator_norm(pair.b);
  r.results["commutator_bound_M"] = number(pair.commutator_norm);
  r.results["spectral_radius"] = number(pair.spectral_radius);
  r.results["multiplier_norm"] = number(b_norm);
  r.results["constant"] = number(fit.constant);
  r.results["fit"] = Json{{"valid", fit.fit.valid}, {"slope", number(fit.fit.slope)},
                          {"r_squared", number(fit.fit.r_squared)}};
  Series csv;
  csv.name = "commutator";
  std::vector<double> ok;
  double crude = 0.0;
  for (std::size_t i = 0; i < fit.Ns.size(); ++i) {
    ok.push_back(fit.within_bound[i] ? 1.0 : 0.0);
    crude = std::max(crude, fit.norms[i] / (2.0 * b_norm));
  }
  csv.add_column("N", fit.Ns);
  csv.add_column("norm", fit.norms);
  csv.add_column("bound", fit.bounds);
  csv.add_column("within_bound", ok);
  r.series.push_back(csv);
  r.add(check_true("norms within C M N^(-3/4) for one constant", fit.bound_holds, "commutator.bound"));
  r.add(check("fitted log-log slope", fit.fit.valid ? fit.fit.slope : 0.0, "<=", slope_max, "commutator.decay_rate"));
  r.add(check("norm / (2 ||B||)", crude, "<=", 1.0 + 1e-12, "commutator.crude_bound"));

  const auto fl = fourier_l1_scaling(Ns, samples);
  Series q;
  q.name = "fourier_l1";
  q.add_column("N", fl.Ns);
  q.add_column("psi_l2", fl.psi_l2);
  q.add_column("dpsi_l2", fl.dpsi_l2);
  q.add_column("bernstein_product", fl.bernstein);
  r.series.push_back(q);
  r.results["fourier_l1"] = Json{{"psi_slope", number(fl.psi_slope)},
                                 {"dpsi_slope", number(fl.dpsi_slope)},
                                 {"bernstein_slope", number(fl.bernstein_slope)}};
  r.add(check("||psi_N|| exponent relative error vs -1/2", std::abs(fl.psi_slope + 0.5) / 0.5, "<=", exp_tol,
              "commutator.psi_exponent"));
  r.add(check("||psi_N'|| exponent relative error vs -3/2", std::abs(fl.dpsi_slope + 1.5) / 1.5, "<=", exp_tol,
              "commutator.dpsi_exponent"));
  r.add(check("Bernstein product exponent relative error vs -1", std::abs(fl.bernstein_slope + 1.0), "<=", exp_tol,
              "commutator.bernstein_exponent", false));
  return r;
}

}  // namespace obslab::app
