#include "obslab/cutoff.hpp"

#include <cmath>

#include "obslab/grid.hpp"

namespace obslab {

namespace {

// S(t) = a / (a + b) with a = exp(-1/t), b = exp(-1/(1-t)), evaluated as a
// logistic of log(a/b) so nothing overflows near the endpoints.
struct StepParts {
  double s;  // S(t)
  double q;  // ab / (a+b)^2 = S (1 - S)
};

StepParts parts(double t) {
  const double e = 1.0 / (1.0 - t) - 1.0 / t;  // log(a/b); S is its logistic
  const double x = std::exp(-std::abs(e));
  const double s = e >= 0 ? 1.0 / (1.0 + x) : x / (1.0 + x);
  return {s, x / ((1.0 + x) * (1.0 + x))};
}

constexpr double kBetaStart = 1.25;
constexpr double kBetaWidth = 0.25;

double beta(double x) { return 1.0 - smooth_step((x - kBetaStart) / kBetaWidth); }
double beta_d1(double x) { return -smooth_step_d1((x - kBetaStart) / kBetaWidth) / kBetaWidth; }
double beta_d2(double x) { return -smooth_step_d2((x - kBetaStart) / kBetaWidth) / (kBetaWidth * kBetaWidth); }

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return parts(t).s;
}

double smooth_step_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const auto p = parts(t);
  const double u = 1.0 - t;
  return p.q * (1.0 / (t * t) + 1.0 / (u * u));
}

double smooth_step_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const auto p = parts(t);
  const double u = 1.0 - t;
  const double w = 1.0 / (t * t) + 1.0 / (u * u);
  const double dw = -2.0 / (t * t * t) + 2.0 / (u * u * u);
  // q' = q (1 - 2S) * d/dt log(a/b) with d/dt log(a/b) = w.
  const double dq = p.q * (1.0 - 2.0 * p.s) * w;
  return dq * w + p.q * dw;
}

double DyadicBump::operator()(double x) const { return beta(x) - beta(2.0 * x); }

double DyadicBump::derivative(double x) const { return beta_d1(x) - 2.0 * beta_d1(2.0 * x); }

double DyadicBump::second_derivative(double x) const { return beta_d2(x) - 4.0 * beta_d2(2.0 * x); }

double DyadicBump::low_pass(double x) { return beta(x); }

double SmoothWindow::operator()(double x) const {
  if (!(ramp > 0.0) || 2.0 * ramp > hi - lo + 1e-15) throw Error("smooth window needs 0 < 2 ramp <= hi - lo");
  return smooth_step((x - lo) / ramp) * (1.0 - smooth_step((x - (hi - ramp)) / ramp));
}

}  // namespace obslab
