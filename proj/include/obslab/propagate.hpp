#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "obslab/hamiltonian.hpp"
#include "obslab/spectral.hpp"

namespace obslab {

/// multiplier: exact phase for kinetic-only H. splitstep: Strang splitting.
/// dense: exp(-itH) in a dense eigenbasis.
enum class Engine { multiplier, splitstep, dense };

std::string to_string(Engine e);
Engine engine_from_string(const std::string& s);

struct PropagatorPlan {
  Engine engine = Engine::multiplier;
  double dt = 1e-3;  // splitstep only
};

/// Picks multiplier for kinetic-only H, dense for potential kinds within the
/// dense budget and splitstep otherwise.
Engine default_engine(const HamiltonianSpec& h);

/// Propagates u(t) = exp(-i t H) f. Splitstep runs floor(t/dt) full steps and
/// one fractional step for the remainder, so any t is reached exactly.
class Propagator {
 public:
  Propagator(const HamiltonianSpec& h, PropagatorPlan plan,
             std::shared_ptr<const EigenDecomposition> decomposition = nullptr);

  Field evolve(const Field& f, double t) const;
  /// exp(+i t H) f, via complex conjugation (H is real).
  Field evolve_backward(const Field& f, double t) const;
  /// Evolves through increasing times, returning the state at each.
  std::vector<Field> trajectory(const Field& f, const std::vector<double>& times) const;

  const HamiltonianSpec& hamiltonian() const { return h_; }
  const PropagatorPlan& plan() const { return plan_; }
  const std::shared_ptr<const EigenDecomposition>& decomposition() const { return decomp_; }

 private:
  void splitstep(Field& f, double t) const;

  HamiltonianSpec h_;
  PropagatorPlan plan_;
  std::shared_ptr<const EigenDecomposition> decomp_;
  std::shared_ptr<FourierTransform> fft_;
  std::vector<double> symbol_;
  std::vector<double> potential_;
  std::vector<Complex> kinetic_step_;      // exp(-i dt T)
  std::vector<Complex> potential_half_;    // exp(-i dt V / 2)
  std::vector<Complex> potential_full_;    // exp(-i dt V)
};

/// Analytic free evolution of exp(-|x|^2 / (2 w^2)) in 1-D.
Field free_gaussian_reference(const GridSpec& g, double t, double width,
                              KineticConvention conv = KineticConvention::full);

/// Mass in the outer tenth of the box.
double wrap_monitor(const Field& f);
inline constexpr double kWrapThreshold = 1e-8;

}  // namespace obslab
