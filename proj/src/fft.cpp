#include "obslab/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

#include "obslab/kernels.hpp"

namespace obslab {

namespace {

struct PlanCache {
  std::mutex lock;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans;

  fftw_plan get(const GridSpec& g, int sign) {
    std::lock_guard<std::mutex> guard(lock);
    auto key = std::make_tuple(g.dim, g.points_per_axis, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::vector<int> shape(static_cast<std::size_t>(g.dim), static_cast<int>(g.points_per_axis));
    auto* buf = fftw_alloc_complex(g.dofs());
    fftw_plan p = fftw_plan_dft(g.dim, shape.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (p == nullptr) throw Error("FFTW failed to create a plan");
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_complex* as_fftw(std::span<Complex> data) { return reinterpret_cast<fftw_complex*>(data.data()); }

}  // namespace

FourierTransform::FourierTransform(const GridSpec& grid)
    : grid_(grid),
      forward_plan_(cache().get(grid, FFTW_FORWARD)),
      backward_plan_(cache().get(grid, FFTW_BACKWARD)) {}

void FourierTransform::forward(std::span<Complex> data) const {
  if (data.size() != grid_.dofs()) throw Error("FFT size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data), as_fftw(data));
}

void FourierTransform::inverse(std::span<Complex> data) const {
  if (data.size() != grid_.dofs()) throw Error("FFT size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data), as_fftw(data));
  const double s = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= s;
}

Field apply_multiplier(const Field& f, std::span<const double> weights) {
  if (weights.size() != f.size()) throw Error("multiplier size mismatch");
  FourierTransform fft(f.grid);
  Field out = f;
  fft.forward(out.values);
  kernels::scale(out.values, weights);
  fft.inverse(out.values);
  return out;
}

double spectral_l2_norm(const Field& f) {
  FourierTransform fft(f.grid);
  std::vector<Complex> spec = f.values;
  fft.forward(spec);
  const double s = kernels::sum_norm2(spec) / static_cast<double>(spec.size());
  return std::sqrt(s * f.grid.cell_volume());
}

}  // namespace obslab
