#include "obslab/norm.hpp"

#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace obslab {

PowerIterationResult operator_norm(const GramMap& gram, Eigen::Index size, const PowerIterationOptions& opt) {
  PowerIterationResult out;
  if (size == 0) {
    out.converged = true;
    return out;
  }
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(size), w(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = std::complex<double>(normal(rng), normal(rng));
  v.normalize();
  double lambda = 0.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    gram(v, w);
    out.iterations = it;
    lambda = v.dot(w).real();
    const double wn = w.norm();
    if (wn == 0.0) {
      out.norm = 0.0;
      out.residual = 0.0;
      out.converged = true;
      return out;
    }
    out.residual = (w - lambda * v).norm() / std::max(lambda, 1e-300);
    if (out.residual <= opt.tolerance) {
      out.converged = true;
      break;
    }
    v = w / wn;
  }
  out.norm = std::sqrt(std::max(lambda, 0.0));
  return out;
}

double dense_operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> v) {
  PowerLawFit out;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size() && i < v.size(); ++i)
    if (t[i] > 0.0 && v[i] > 0.0 && std::isfinite(v[i])) {
      x.push_back(std::log(t[i]));
      y.push_back(std::log(v[i]));
    }
  out.points = x.size();
  if (x.size() < 2) return out;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    sse += r * r;
  }
  out.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  out.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  out.valid = true;
  return out;
}

}  // namespace obslab
