// OpenMP kernels against their serial references, plus one full
// propagation step per engine.

#include <benchmark/benchmark.h>

#include <random>

#include "obslab/kernels.hpp"
#include "obslab/propagate.hpp"

using namespace obslab;

namespace {

std::vector<Complex> random_vector(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<Complex> v(n);
  for (auto& z : v) z = Complex(d(rng), d(rng));
  return v;
}

std::vector<double> random_real(std::size_t n) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0.0, 10.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

template <bool Parallel>
void phase(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  auto v = random_vector(n);
  const auto s = random_real(n);
  for (auto _ : st) {
    if constexpr (Parallel) kernels::apply_phase(v, s, 1e-3);
    else kernels::serial::apply_phase(v, s, 1e-3);
    benchmark::DoNotOptimize(v.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long long>(n));
}

template <bool Parallel>
void norm2(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto v = random_vector(n);
  for (auto _ : st) {
    double x = Parallel ? kernels::sum_norm2(v) : kernels::serial::sum_norm2(v);
    benchmark::DoNotOptimize(x);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long long>(n));
}

template <bool Parallel>
void dot(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = random_vector(n), b = random_vector(n);
  for (auto _ : st) {
    Complex x = Parallel ? kernels::dot(a, b) : kernels::serial::dot(a, b);
    benchmark::DoNotOptimize(x);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long long>(n));
}

template <bool Parallel>
void axpy(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = random_vector(n);
  auto y = random_vector(n);
  for (auto _ : st) {
    if constexpr (Parallel) kernels::axpy(Complex(0.5, -0.25), x, y);
    else kernels::serial::axpy(Complex(0.5, -0.25), x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long long>(n));
}

void propagate(benchmark::State& st) {
  const auto engine = static_cast<Engine>(st.range(0));
  const std::size_t n = engine == Engine::dense ? 1024 : 65536;
  const GridSpec g = make_grid(1, 64.0, n);
  const auto h = engine == Engine::multiplier ? HamiltonianSpec::free(g)
                                              : HamiltonianSpec::with_potential(g, make_potential("gaussian_repulsive"));
  const Propagator p(h, {engine, 1e-2});
  const Field f = free_gaussian_reference(g, 0.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(p.evolve(f, 0.1).values.data());
  st.SetLabel(to_string(engine) + ", n=" + std::to_string(n));
}

}  // namespace

BENCHMARK(phase<false>)->Name("apply_phase/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(phase<true>)->Name("apply_phase/openmp")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(norm2<false>)->Name("sum_norm2/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(norm2<true>)->Name("sum_norm2/openmp")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(dot<false>)->Name("dot/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(dot<true>)->Name("dot/openmp")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(axpy<false>)->Name("axpy/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(axpy<true>)->Name("axpy/openmp")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(propagate)->Name("evolve")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
