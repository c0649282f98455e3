#include "obslab/propagate.hpp"

#include <cmath>

#include "obslab/kernels.hpp"

namespace obslab {

std::string to_string(Engine e) {
  switch (e) {
    case Engine::multiplier: return "multiplier";
    case Engine::splitstep: return "splitstep";
    case Engine::dense: return "dense";
  }
  return "?";
}

Engine engine_from_string(const std::string& s) {
  if (s == "multiplier") return Engine::multiplier;
  if (s == "splitstep") return Engine::splitstep;
  if (s == "dense") return Engine::dense;
  throw Error("unknown engine: " + s);
}

Engine default_engine(const HamiltonianSpec& h) {
  if (!h.has_potential()) return Engine::multiplier;
  return h.grid.dofs() <= kDenseDofLimit ? Engine::dense : Engine::splitstep;
}

Propagator::Propagator(const HamiltonianSpec& h, PropagatorPlan plan,
                       std::shared_ptr<const EigenDecomposition> decomposition)
    : h_(h), plan_(plan), decomp_(std::move(decomposition)) {
  switch (plan_.engine) {
    case Engine::multiplier:
      if (h_.has_potential()) throw Error("multiplier engine needs a kinetic-only hamiltonian");
      fft_ = std::make_shared<FourierTransform>(h_.grid);
      symbol_ = kinetic_symbol(h_);
      break;
    case Engine::splitstep: {
      if (!(plan_.dt > 0.0)) throw Error("splitstep needs dt > 0");
      fft_ = std::make_shared<FourierTransform>(h_.grid);
      symbol_ = kinetic_symbol(h_);
      potential_ = sample_potential(h_);
      const std::size_t n = h_.grid.dofs();
      kinetic_step_.resize(n);
      potential_half_.resize(n);
      potential_full_.resize(n);
      kernels::phase_table(kinetic_step_, symbol_, plan_.dt);
      kernels::phase_table(potential_half_, potential_, 0.5 * plan_.dt);
      kernels::phase_table(potential_full_, potential_, plan_.dt);
      break;
    }
    case Engine::dense:
      if (h_.grid.dofs() > kDenseDofLimit) throw Error("dense engine exceeds the dense dof limit");
      if (!decomp_) decomp_ = diagonalize(h_);
      break;
  }
}

void Propagator::splitstep(Field& f, double t) const {
  const double dt = plan_.dt;
  auto steps = static_cast<long long>(std::floor(t / dt));
  double rest = t - static_cast<double>(steps) * dt;
  if (rest < 1e-12 * dt) rest = 0.0;
  if (steps > 0) {
    // Merged Strang steps: V/2 (T V)^(n-1) T V/2.
    kernels::multiply(f.values, potential_half_);
    for (long long s = 0; s < steps; ++s) {
      fft_->forward(f.values);
      kernels::multiply(f.values, kinetic_step_);
      fft_->inverse(f.values);
      kernels::multiply(f.values, s + 1 < steps ? potential_full_ : potential_half_);
    }
  }
  if (rest > 0.0) {
    kernels::apply_phase(f.values, potential_, 0.5 * rest);
    fft_->forward(f.values);
    kernels::apply_phase(f.values, symbol_, rest);
    fft_->inverse(f.values);
    kernels::apply_phase(f.values, potential_, 0.5 * rest);
  }
}

Field Propagator::evolve(const Field& f, double t) const {
  if (!(f.grid == h_.grid)) throw Error("field and propagator use different grids");
  if (t < 0.0 || !std::isfinite(t)) throw Error("evolution time must be finite and >= 0");
  Field out = f;
  if (t == 0.0) return out;
  switch (plan_.engine) {
    case Engine::multiplier:
      fft_->forward(out.values);
      kernels::apply_phase(out.values, symbol_, t);
      fft_->inverse(out.values);
      break;
    case Engine::splitstep: splitstep(out, t); break;
    case Engine::dense: {
      const auto& q = decomp_->eigenvectors;
      const Eigen::Map<const Eigen::VectorXcd> in(f.values.data(), static_cast<Eigen::Index>(f.size()));
      Eigen::VectorXcd c = q.adjoint() * in;
      for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::polar(1.0, -t * decomp_->eigenvalues(j));
      const Eigen::VectorXcd r = q * c;
      std::copy(r.data(), r.data() + r.size(), out.values.begin());
      break;
    }
  }
  return out;
}

Field Propagator::evolve_backward(const Field& f, double t) const {
  Field c = f;
  for (auto& z : c.values) z = std::conj(z);
  Field out = evolve(c, t);
  for (auto& z : out.values) z = std::conj(z);
  return out;
}

std::vector<Field> Propagator::trajectory(const Field& f, const std::vector<double>& times) const {
  std::vector<Field> out;
  out.reserve(times.size());
  Field cur = f;
  double now = 0.0;
  for (double t : times) {
    if (t < now) throw Error("trajectory times must be nondecreasing");
    // Multiplier and dense engines evolve from the start to avoid drift.
    if (plan_.engine == Engine::splitstep) {
      cur = evolve(cur, t - now);
      now = t;
      out.push_back(cur);
    } else {
      out.push_back(evolve(f, t));
    }
  }
  return out;
}

Field free_gaussian_reference(const GridSpec& g, double t, double width, KineticConvention conv) {
  if (g.dim != 1) throw Error("gaussian reference is 1-D");
  // i u_t = -c u_xx with c = 1 (full) or 1/2 (half):
  // u = (w^2 / (w^2 + 2 i c t))^{1/2} exp(-x^2 / (2 (w^2 + 2 i c t))).
  const double c = conv == KineticConvention::half ? 0.5 : 1.0;
  const Complex s = Complex(width * width, 2.0 * c * t);
  const Complex amp = std::sqrt(Complex(width * width) / s);
  return Field::sample(g, [&](const Point& x) { return amp * std::exp(-x[0] * x[0] / (2.0 * s)); });
}

double wrap_monitor(const Field& f) { return boundary_mass(f, 0.1); }

}  // namespace obslab
