#include "obslab/kernels.hpp"

#include <cmath>
#include <vector>

#include <omp.h>

namespace obslab::kernels {

namespace {

using Index = std::ptrdiff_t;

Index len(std::size_t n) { return static_cast<Index>(n); }

std::size_t chunk_count(std::size_t n) { return (n + kReductionChunk - 1) / kReductionChunk; }

template <class Partial, class T>
T chunked_sum(std::size_t n, Partial&& partial, T zero) {
  const std::size_t chunks = chunk_count(n);
  std::vector<T> parts(chunks, zero);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < len(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t hi = std::min(n, lo + kReductionChunk);
    parts[static_cast<std::size_t>(c)] = partial(lo, hi);
  }
  T total = zero;
  for (const T& p : parts) total += p;
  return total;
}

}  // namespace

void scale(std::span<Complex> v, std::span<const double> w) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < len(v.size()); ++i) v[static_cast<std::size_t>(i)] *= w[static_cast<std::size_t>(i)];
}

void multiply(std::span<Complex> v, std::span<const Complex> w) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < len(v.size()); ++i) v[static_cast<std::size_t>(i)] *= w[static_cast<std::size_t>(i)];
}

void apply_phase(std::span<Complex> v, std::span<const double> s, double t) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < len(v.size()); ++i) {
    const double th = -t * s[static_cast<std::size_t>(i)];
    v[static_cast<std::size_t>(i)] *= Complex(std::cos(th), std::sin(th));
  }
}

void phase_table(std::span<Complex> w, std::span<const double> s, double t) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < len(w.size()); ++i) {
    const double th = -t * s[static_cast<std::size_t>(i)];
    w[static_cast<std::size_t>(i)] = Complex(std::cos(th), std::sin(th));
  }
}

void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < len(y.size()); ++i) y[static_cast<std::size_t>(i)] += a * x[static_cast<std::size_t>(i)];
}

void mask(std::span<Complex> v, std::span<const std::uint8_t> keep) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < len(v.size()); ++i)
    if (!keep[static_cast<std::size_t>(i)]) v[static_cast<std::size_t>(i)] = 0.0;
}

double sum_norm2(std::span<const Complex> v) {
  return chunked_sum(
      v.size(),
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::norm(v[i]);
        return s;
      },
      0.0);
}

double sum_norm2_masked(std::span<const Complex> v, std::span<const std::uint8_t> keep) {
  return chunked_sum(
      v.size(),
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
          if (keep[i]) s += std::norm(v[i]);
        return s;
      },
      0.0);
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  return chunked_sum(
      a.size(),
      [&](std::size_t lo, std::size_t hi) {
        Complex s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::conj(a[i]) * b[i];
        return s;
      },
      Complex(0.0));
}

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

namespace serial {

void scale(std::span<Complex> v, std::span<const double> w) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w[i];
}

void multiply(std::span<Complex> v, std::span<const Complex> w) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w[i];
}

void apply_phase(std::span<Complex> v, std::span<const double> s, double t) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -t * s[i]);
}

void phase_table(std::span<Complex> w, std::span<const double> s, double t) {
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::polar(1.0, -t * s[i]);
}

void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void mask(std::span<Complex> v, std::span<const std::uint8_t> keep) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!keep[i]) v[i] = 0.0;
}

double sum_norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

double sum_norm2_masked(std::span<const Complex> v, std::span<const std::uint8_t> keep) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (keep[i]) s += std::norm(v[i]);
  return s;
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace serial

}  // namespace obslab::kernels
