#include "obslab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "obslab/kernels.hpp"

namespace obslab {

Interval Interval::intersect(const Interval& o) const {
  Interval out;
  out.lo = std::max(lo, o.lo);
  if (hi < o.hi) {
    out.hi = hi;
    out.include_hi = include_hi;
  } else if (o.hi < hi) {
    out.hi = o.hi;
    out.include_hi = o.include_hi;
  } else {
    out.hi = hi;
    out.include_hi = include_hi && o.include_hi;
  }
  return out;
}

double EigenDecomposition::residual(const Eigen::MatrixXcd& m) const {
  const Eigen::MatrixXcd r = m * eigenvectors - eigenvectors * eigenvalues.asDiagonal();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < r.cols(); ++j)
    worst = std::max(worst, r.col(j).norm() / (1.0 + std::abs(eigenvalues(j))));
  return worst;
}

double EigenDecomposition::orthonormality_defect() const {
  const Eigen::Index n = eigenvectors.cols();
  return (eigenvectors.adjoint() * eigenvectors - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

std::shared_ptr<const EigenDecomposition> diagonalize(const HamiltonianSpec& h) {
  const Eigen::MatrixXd m = dense_matrix(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed");
  auto out = std::make_shared<EigenDecomposition>();
  out->eigenvalues = solver.eigenvalues();
  out->eigenvectors = solver.eigenvectors().cast<Complex>();
  return out;
}

std::shared_ptr<const EigenDecomposition> diagonalize(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed");
  auto out = std::make_shared<EigenDecomposition>();
  out->eigenvalues = solver.eigenvalues();
  out->eigenvectors = solver.eigenvectors();
  return out;
}

std::shared_ptr<const EigenDecomposition> diagonalize(const DilationMatrix& a) { return diagonalize(a.matrix); }

SpectralProjector SpectralProjector::multiplier(const HamiltonianSpec& h, const SpectralFunction& f) {
  if (h.has_potential()) throw Error("multiplier realization needs a kinetic-only hamiltonian");
  SpectralProjector p;
  p.kind_ = Realization::multiplier;
  p.weights_ = kinetic_symbol(h);
  for (auto& w : p.weights_) w = f(w);
  p.fft_ = std::make_shared<FourierTransform>(h.grid);
  return p;
}

SpectralProjector SpectralProjector::eigenbasis(std::shared_ptr<const EigenDecomposition> d,
                                                const SpectralFunction& f) {
  if (!d) throw Error("eigenbasis realization needs a decomposition");
  SpectralProjector p;
  p.kind_ = Realization::eigenbasis;
  p.weights_.resize(d->size());
  for (std::size_t j = 0; j < d->size(); ++j) {
    p.weights_[j] = f(d->eigenvalues(static_cast<Eigen::Index>(j)));
    if (p.weights_[j] != 0.0) p.active_.push_back(static_cast<Eigen::Index>(j));
  }
  p.decomp_ = std::move(d);
  return p;
}

std::size_t SpectralProjector::rank() const {
  return static_cast<std::size_t>(std::count_if(weights_.begin(), weights_.end(), [](double w) { return w != 0.0; }));
}

Eigen::VectorXcd SpectralProjector::apply(const Eigen::VectorXcd& v) const {
  if (kind_ == Realization::multiplier) {
    std::vector<Complex> buf(v.data(), v.data() + v.size());
    fft_->forward(buf);
    kernels::scale(buf, weights_);
    fft_->inverse(buf);
    return Eigen::Map<Eigen::VectorXcd>(buf.data(), v.size());
  }
  const auto& q = decomp_->eigenvectors;
  if (v.size() != q.rows()) throw Error("vector size does not match the eigenbasis");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  if (active_.empty()) return out;
  const Eigen::MatrixXcd qa = q(Eigen::all, active_);
  Eigen::VectorXcd c = qa.adjoint() * v;
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= weights_[static_cast<std::size_t>(active_[static_cast<std::size_t>(j)])];
  out = qa * c;
  return out;
}

Field SpectralProjector::apply(const Field& f) const {
  Field out = f;
  if (kind_ == Realization::multiplier) {
    if (f.size() != weights_.size()) throw Error("field size does not match the multiplier");
    fft_->forward(out.values);
    kernels::scale(out.values, weights_);
    fft_->inverse(out.values);
    return out;
  }
  const Eigen::Map<const Eigen::VectorXcd> in(f.values.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::VectorXcd r = apply(Eigen::VectorXcd(in));
  std::copy(r.data(), r.data() + r.size(), out.values.begin());
  return out;
}

Eigen::MatrixXcd SpectralProjector::matrix() const {
  if (kind_ != Realization::eigenbasis) throw Error("matrix() needs the eigenbasis realization");
  const auto& q = decomp_->eigenvectors;
  Eigen::VectorXd w(static_cast<Eigen::Index>(weights_.size()));
  for (std::size_t j = 0; j < weights_.size(); ++j) w(static_cast<Eigen::Index>(j)) = weights_[j];
  return q * w.asDiagonal() * q.adjoint();
}

SpectralFunction indicator(const Interval& i) {
  return [i](double x) { return i.contains(x) ? 1.0 : 0.0; };
}

SpectralProjector smooth_projector(const HamiltonianSpec& h, const SpectralFunction& g,
                                   std::shared_ptr<const EigenDecomposition> d) {
  if (!h.has_potential()) return SpectralProjector::multiplier(h, g);
  if (!d) d = diagonalize(h);
  return SpectralProjector::eigenbasis(std::move(d), g);
}

SpectralProjector energy_projector(const HamiltonianSpec& h, const Interval& i,
                                   std::shared_ptr<const EigenDecomposition> d) {
  return smooth_projector(h, indicator(i), std::move(d));
}

Field project_energy(const HamiltonianSpec& h, const Interval& i, const Field& f,
                     std::shared_ptr<const EigenDecomposition> d) {
  return energy_projector(h, i, std::move(d)).apply(f);
}

Field dyadic_cutoff(const HamiltonianSpec& h, const SpectralFunction& g, int k, const Field& f,
                    std::shared_ptr<const EigenDecomposition> d) {
  const double scale = std::ldexp(1.0, k);
  return smooth_projector(h, [g, scale](double x) { return g(x / scale); }, std::move(d)).apply(f);
}

SpectralProjector project_dilation(std::shared_ptr<const EigenDecomposition> a, int sign, double shift) {
  if (sign != 1 && sign != -1) throw Error("dilation projector sign must be +1 or -1");
  if (sign > 0) return SpectralProjector::eigenbasis(std::move(a), [shift](double x) { return x >= shift ? 1.0 : 0.0; });
  return SpectralProjector::eigenbasis(std::move(a), [shift](double x) { return x < shift ? 1.0 : 0.0; });
}

}  // namespace obslab
