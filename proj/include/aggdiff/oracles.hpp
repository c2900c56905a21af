#pragma once

#include <vector>

#include "aggdiff/grid.hpp"

namespace aggdiff {

/// Isotropic Gaussian M (2 pi sigma^2)^{-N/2} exp(-|x - mean|^2 / (2 sigma^2)).
struct GaussianState {
  double mass = 1.0;
  std::vector<double> mean;
  double variance = 1.0;

  int dim() const noexcept { return static_cast<int>(mean.size()); }
  double density(std::span<const double> x) const;
};

GaussianState make_gaussian(int dim, double mass, double variance, std::vector<double> mean = {});

/// O(n^{2N}) periodic Riemann sum h^N sum_j u_j v_{i-j}, guarded to n^N <= 4096.
Field direct_convolution(const Field& u, const Field& v);

/// Heat flow with unit diffusion: variance + 2t.
GaussianState exact_heat(const GaussianState& g, double t);

/// Linear Fokker-Planck flow: mean e^{-s}, variance 1 + (variance - 1) e^{-2s}.
GaussianState exact_ou(const GaussianState& g, double s);

struct GaussianEntropy {
  /// int f log(f / Maxwellian) for a unit-mass Gaussian
  double h_rel = 0.0;
  /// int f |y + grad log f|^2
  double dissipation = 0.0;
};

GaussianEntropy gaussian_entropy(const GaussianState& g);

/// Samples the density at every grid point.
Field sample_gaussian(const GaussianState& g, const GridPtr& grid);

/// M G(t, .) with G the unit-diffusion heat kernel (t > 0).
Field heat_kernel_field(const GridPtr& grid, double t, double mass = 1.0);

}  // namespace aggdiff
