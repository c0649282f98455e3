#include "obslab/control.hpp"

#include <cmath>
#include <random>

#include "obslab/kernels.hpp"

namespace obslab {

namespace {

constexpr Complex kI(0.0, 1.0);

void scale_by(Field& f, Complex a) {
  for (auto& z : f.values) z *= a;
}

void add_scaled(Field& y, Complex a, const Field& x) { kernels::axpy(a, x.values, y.values); }

Field masked(const Field& f, const std::vector<std::uint8_t>& keep) {
  Field out = f;
  if (!keep.empty()) kernels::mask(out.values, keep);
  return out;
}

std::vector<std::uint8_t> keep_for(const RegionMask& m, const GridSpec& g) {
  if (m.kind == RegionMask::Kind::all) return {};
  return m.indicator(g);
}

}  // namespace

ControlProblem make_control_problem(const HamiltonianSpec& h, Field u0, Field target, double tau1, double tau2,
                                    double horizon, double R, double sigma, double T0) {
  if (!(0.0 <= tau1 && tau1 < tau2 && tau2 <= horizon)) throw Error("impulse times need 0 <= tau1 < tau2 <= T");
  check_same_grid(u0, target);
  const double p = h.symbol_exponent();
  ControlProblem c{std::move(u0), std::move(target), tau1, tau2, horizon,
                   RegionMask::exterior(R), RegionMask::exterior(sigma * (tau2 - tau1) / std::pow(R, p - 1.0)),
                   (tau2 - tau1) > std::pow(R, p) * T0};
  return c;
}

ControlProblem make_full_control_problem(Field u0, Field target, double tau1, double tau2, double horizon) {
  if (!(0.0 <= tau1 && tau1 < tau2 && tau2 <= horizon)) throw Error("impulse times need 0 <= tau1 < tau2 <= T");
  check_same_grid(u0, target);
  return {std::move(u0), std::move(target), tau1, tau2, horizon, RegionMask::everywhere(), RegionMask::everywhere(),
          true};
}

ControlOperators::ControlOperators(const ControlProblem& problem, const Propagator& p)
    : problem_(problem),
      prop_(p),
      keep1_(keep_for(problem.mask1, problem.u0.grid)),
      keep2_(keep_for(problem.mask2, problem.u0.grid)) {}

std::pair<Field, Field> ControlOperators::observe(const Field& f) const {
  const double T = problem_.horizon;
  Field a = masked(prop_.evolve_backward(f, T - problem_.tau1), keep1_);
  Field b = masked(prop_.evolve_backward(f, T - problem_.tau2), keep2_);
  scale_by(a, kI);
  scale_by(b, kI);
  return {std::move(a), std::move(b)};
}

Field ControlOperators::control(const Field& h1, const Field& h2) const {
  const double T = problem_.horizon;
  Field out = prop_.evolve(masked(h1, keep1_), T - problem_.tau1);
  add_scaled(out, 1.0, prop_.evolve(masked(h2, keep2_), T - problem_.tau2));
  scale_by(out, -kI);
  return out;
}

Field ControlOperators::gramian(const Field& f, double eps) const {
  const auto [a, b] = observe(f);
  Field out = control(a, b);
  if (eps != 0.0) add_scaled(out, 2.0 * eps, f);
  return out;
}

Field ControlOperators::reachability_target() const {
  Field y = problem_.target;
  add_scaled(y, -1.0, prop_.evolve(problem_.u0, problem_.horizon));
  return y;
}

ControlSolution solve_impulse_control(const ControlProblem& problem, const Propagator& p, double epsilon,
                                      const CgOptions& opt) {
  if (epsilon < 0.0) throw Error("regularization must be nonnegative");
  ControlOperators ops(problem, p);
  const Field y = ops.reachability_target();
  const GridSpec& g = y.grid;
  ControlSolution s;
  s.epsilon = epsilon;
  s.target_norm = l2_norm(y);

  Field f = Field::zeros(g);
  Field r = y;
  Field d = r;
  double rr = mass(r);
  const double stop = opt.relative_tolerance * s.target_norm;
  s.converged = std::sqrt(rr) <= stop;
  while (!s.converged && s.iterations < opt.max_iterations) {
    const Field gd = ops.gramian(d, epsilon);
    const double dgd = inner(d, gd).real();
    if (!(dgd > 0.0)) break;
    const double alpha = rr / dgd;
    add_scaled(f, alpha, d);
    add_scaled(r, -alpha, gd);
    ++s.iterations;
    const double rr_new = mass(r);
    // J(f) = -1/2 Re<f, r + y> when r = y - G f.
    Field ry = r;
    add_scaled(ry, 1.0, y);
    s.objective.push_back(-0.5 * inner(f, ry).real());
    if (std::sqrt(rr_new) <= stop) s.converged = true;
    Field nd = r;
    add_scaled(nd, rr_new / rr, d);
    d = std::move(nd);
    rr = rr_new;
  }
  // True gradient at exit.
  Field grad = ops.gramian(f, epsilon);
  add_scaled(grad, -1.0, y);
  s.gradient_norm = l2_norm(grad);

  auto [h1, h2] = ops.observe(f);
  Field reached = ops.control(h1, h2);
  add_scaled(reached, -1.0, y);
  s.terminal_error = l2_norm(reached);
  s.relative_terminal_error = s.target_norm > 0.0 ? s.terminal_error / s.target_norm : 0.0;
  s.cost = mass(h1) + mass(h2);
  s.h1 = std::move(h1);
  s.h2 = std::move(h2);
  s.dual = std::move(f);
  return s;
}

ControlVerification verify_control(const ControlProblem& problem, const ControlSolution& s, const Propagator& p) {
  ControlVerification v;
  v.engine = p.plan().engine;
  Field u = p.evolve(problem.u0, problem.tau1);
  add_scaled(u, -kI, masked(s.h1, keep_for(problem.mask1, u.grid)));
  u = p.evolve(u, problem.tau2 - problem.tau1);
  add_scaled(u, -kI, masked(s.h2, keep_for(problem.mask2, u.grid)));
  u = p.evolve(u, problem.horizon - problem.tau2);
  add_scaled(u, -1.0, problem.target);
  v.residual = l2_norm(u);
  const double tn = l2_norm(problem.target);
  v.relative_residual = tn > 0.0 ? v.residual / tn : v.residual;
  auto outside = [](const Field& h, const RegionMask& m) {
    if (m.kind == RegionMask::Kind::all) return 0.0;
    RegionMask complement = m;
    if (m.kind == RegionMask::Kind::ball_interior) complement.kind = RegionMask::Kind::ball_exterior;
    else if (m.kind == RegionMask::Kind::ball_exterior) complement.kind = RegionMask::Kind::ball_interior;
    else return 0.0;
    return mass_in_region(h, complement);
  };
  v.support_violation = outside(s.h1, problem.mask1) + outside(s.h2, problem.mask2);
  return v;
}

double adjoint_defect(const ControlOperators& ops, const GridSpec& g, int probes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_field = [&] {
    Field f = Field::zeros(g);
    for (auto& z : f.values) z = Complex(normal(rng), normal(rng));
    return f;
  };
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const Field h1 = random_field(), h2 = random_field(), f = random_field();
    const Complex lhs = inner(ops.control(h1, h2), f);
    const auto [o1, o2] = ops.observe(f);
    const Complex rhs = inner(h1, o1) + inner(h2, o2);
    const double scale = std::sqrt(mass(h1) + mass(h2)) * l2_norm(f);
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace obslab
