#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "obslab/grid.hpp"

// Hot loops over grid samples. The default namespace runs them with OpenMP;
// `serial` holds plain reference loops used by the tests and the benchmark.
// Reductions sum fixed-size chunks and then combine the chunk partials in
// order, so results do not depend on the thread count.
namespace obslab::kernels {

inline constexpr std::size_t kReductionChunk = 8192;

void scale(std::span<Complex> v, std::span<const double> w);
void multiply(std::span<Complex> v, std::span<const Complex> w);
/// v_i *= exp(-i t s_i)
void apply_phase(std::span<Complex> v, std::span<const double> s, double t);
/// w_i = exp(-i t s_i)
void phase_table(std::span<Complex> w, std::span<const double> s, double t);
void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y);
void mask(std::span<Complex> v, std::span<const std::uint8_t> keep);

double sum_norm2(std::span<const Complex> v);
double sum_norm2_masked(std::span<const Complex> v, std::span<const std::uint8_t> keep);
/// sum conj(a_i) b_i
Complex dot(std::span<const Complex> a, std::span<const Complex> b);

namespace serial {
void scale(std::span<Complex> v, std::span<const double> w);
void multiply(std::span<Complex> v, std::span<const Complex> w);
void apply_phase(std::span<Complex> v, std::span<const double> s, double t);
void phase_table(std::span<Complex> w, std::span<const double> s, double t);
void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y);
void mask(std::span<Complex> v, std::span<const std::uint8_t> keep);
double sum_norm2(std::span<const Complex> v);
double sum_norm2_masked(std::span<const Complex> v, std::span<const std::uint8_t> keep);
Complex dot(std::span<const Complex> a, std::span<const Complex> b);
}  // namespace serial

/// Sets the OpenMP thread count; zero keeps the runtime default.
void set_threads(int n);
int max_threads();

}  // namespace obslab::kernels
