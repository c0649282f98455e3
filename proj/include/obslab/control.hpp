#pragma once

#include <vector>

#include "obslab/propagate.hpp"

namespace obslab {

/// Impulse control: u jumps by -i chi_1 h1 at tau1 and -i chi_2 h2 at tau2,
/// otherwise u evolves freely on [0, T]. The goal is u(T) = u_T.
struct ControlProblem {
  Field u0;
  Field target;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double horizon = 0.0;  // T
  RegionMask mask1;
  RegionMask mask2;
  bool window_ok = true;  // tau2 - tau1 > R^p T0 for geometric masks
};

/// Masks chi(|x| > R) and chi(|x| > sigma (tau2 - tau1) / R^{p-1}).
ControlProblem make_control_problem(const HamiltonianSpec& h, Field u0, Field target, double tau1, double tau2,
                                    double horizon, double R, double sigma, double T0);
/// Both impulses act everywhere.
ControlProblem make_full_control_problem(Field u0, Field target, double tau1, double tau2, double horizon);

/// The control-to-state map C and its adjoint, the observation map O.
/// C(h1, h2) = -i exp(-i(T-tau1)H) chi_1 h1 - i exp(-i(T-tau2)H) chi_2 h2.
/// O f = (i chi_1 phi(tau1), i chi_2 phi(tau2)) with phi(tau) = exp(i(T-tau)H) f.
class ControlOperators {
 public:
  ControlOperators(const ControlProblem& problem, const Propagator& p);

  std::pair<Field, Field> observe(const Field& f) const;
  Field control(const Field& h1, const Field& h2) const;
  /// O^* O f + 2 eps f, the gradient operator of J
  Field gramian(const Field& f, double eps) const;
  /// u_T - exp(-iTH) u0
  Field reachability_target() const;

 private:
  const ControlProblem& problem_;
  const Propagator& prop_;
  std::vector<std::uint8_t> keep1_;
  std::vector<std::uint8_t> keep2_;
};

struct CgOptions {
  int max_iterations = 2000;
  double relative_tolerance = 1e-8;
};

struct ControlSolution {
  Field h1;
  Field h2;
  Field dual;  // f minimizing J
  double epsilon = 0.0;
  double terminal_error = 0.0;           // ||C h - y||
  double relative_terminal_error = 0.0;  // divided by ||y|| (0 when y = 0)
  double cost = 0.0;                     // ||h1||^2 + ||h2||^2
  double gradient_norm = 0.0;            // ||G f - y|| at exit
  double target_norm = 0.0;              // ||y||
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective;         // J per iteration
};

/// HUM: minimizes J(f) = 1/2 ||O f||^2 + eps ||f||^2 - Re<f, y> by
/// conjugate gradients on (O^* O + 2 eps) f = y and sets h = O f.
ControlSolution solve_impulse_control(const ControlProblem& problem, const Propagator& p, double epsilon,
                                      const CgOptions& opt = {});

struct ControlVerification {
  Engine engine = Engine::multiplier;
  double residual = 0.0;           // ||u(T) - u_T||
  double relative_residual = 0.0;  // divided by ||u_T||
  double support_violation = 0.0;  // mass of h outside its mask
};

/// Re-simulates the controlled equation with an independent propagator.
ControlVerification verify_control(const ControlProblem& problem, const ControlSolution& s, const Propagator& p);

/// max over probes |<C h, f> - <h, O f>| / (||h|| ||f||) with seeded random probes.
double adjoint_defect(const ControlOperators& ops, const GridSpec& g, int probes, std::uint64_t seed);

}  // namespace obslab
