#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace obslab {

struct PowerIterationOptions {
  std::uint64_t seed = 0x5EED;
  int max_iterations = 500;
  double tolerance = 1e-6;  // relative eigen-residual of the Gram operator
};

struct PowerIterationResult {
  double norm = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Operator norm ||K|| from repeated application of the Gram map K^* K.
/// The start vector is a seeded complex Gaussian.
using GramMap = std::function<void(const Eigen::VectorXcd& in, Eigen::VectorXcd& out)>;
PowerIterationResult operator_norm(const GramMap& gram, Eigen::Index size, const PowerIterationOptions& opt = {});

/// Largest singular value of a dense matrix (SVD), for oracles.
double dense_operator_norm(const Eigen::MatrixXcd& m);

/// Log-log least-squares fit v ~ C t^slope.
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // log C
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
  bool valid = false;  // at least two positive samples
};
PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> v);

}  // namespace obslab
