#pragma once

#include <span>

#include "obslab/grid.hpp"

namespace obslab {

/// In-place FFTW transforms over a grid. forward() is unnormalized and
/// inverse() divides by the dof count, so inverse(forward(f)) == f.
/// Plans are cached per (dim, n) and shared between instances.
class FourierTransform {
 public:
  explicit FourierTransform(const GridSpec& grid);

  void forward(std::span<Complex> data) const;
  void inverse(std::span<Complex> data) const;
  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  void* forward_plan_;
  void* backward_plan_;
};

/// Applies the Fourier multiplier w(xi) given in FFT order.
Field apply_multiplier(const Field& f, std::span<const double> weights);

/// sqrt(h^dim * sum |F_k|^2 / N), equal to l2_norm by Parseval.
double spectral_l2_norm(const Field& f);

}  // namespace obslab
