#pragma once

#include <functional>

namespace obslab {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
double smooth_step(double t);
double smooth_step_d1(double t);
double smooth_step_d2(double t);

/// Dyadic bump phi(x) = beta(x) - beta(2x) where beta = 1 on (-inf, 5/4] and 0
/// on [3/2, inf). phi is supported in [5/8, 3/2], equals 1 on [3/4, 5/4] and
/// the rescaled copies phi(x / 2^k) telescope to 1 on [5/8 * 2^k0, inf).
struct DyadicBump {
  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  /// beta(x / 2^k): the low-frequency remainder of the dyadic sum starting at k.
  static double low_pass(double x);
};

/// Window equal to 1 on [lo + ramp, hi - ramp], smoothly vanishing at lo and hi.
struct SmoothWindow {
  double lo = 0.0;
  double hi = 1.0;
  double ramp = 0.25;

  double operator()(double x) const;
};

using SpectralFunction = std::function<double(double)>;

}  // namespace obslab
