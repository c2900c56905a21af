#include "aggdiff/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aggdiff {

double GaussianState::density(std::span<const double> x) const {
  double r2 = 0.0;
  for (std::size_t d = 0; d < mean.size(); ++d) {
    const double dx = x[d] - mean[d];
    r2 += dx * dx;
  }
  return mass * std::pow(2.0 * std::numbers::pi * variance, -0.5 * dim()) *
         std::exp(-r2 / (2.0 * variance));
}

GaussianState make_gaussian(int dim, double mass, double variance, std::vector<double> mean) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (!(variance > 0.0)) throw std::invalid_argument("variance must be positive");
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
  if (mean.empty()) mean.assign(dim, 0.0);
  if (static_cast<int>(mean.size()) != dim) throw std::invalid_argument("mean has wrong length");
  return GaussianState{mass, std::move(mean), variance};
}

Field direct_convolution(const Field& u, const Field& v) {
  require_same_grid(*u.grid, *v.grid);
  const Grid& g = *u.grid;
  if (g.size() > 4096) throw std::invalid_argument("direct_convolution limited to 4096 points");
  const int n = g.n(), dim = g.dim(), c = n / 2;
  Field out(u.grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto a = g.unravel(i);
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto b = g.unravel(j);
      // x_i - x_j sits at index a - b + n/2 (mod n)
      std::array<int, 3> k{0, 0, 0};
      for (int d = 0; d < dim; ++d) k[d] = ((a[d] - b[d] + c) % n + n) % n;
      s += u[j] * v[g.ravel(k)];
    }
    out[i] = g.cell_volume() * s;
  }
  return out;
}

GaussianState exact_heat(const GaussianState& g, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  GaussianState out = g;
  out.variance += 2.0 * t;
  return out;
}

GaussianState exact_ou(const GaussianState& g, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("s must be >= 0");
  GaussianState out = g;
  for (double& m : out.mean) m *= std::exp(-s);
  out.variance = 1.0 + (g.variance - 1.0) * std::exp(-2.0 * s);
  return out;
}

GaussianEntropy gaussian_entropy(const GaussianState& g) {
  const double n = g.dim();
  const double v = g.variance;
  double m2 = 0.0;
  for (double m : g.mean) m2 += m * m;
  GaussianEntropy e;
  e.h_rel = 0.5 * (n * v + m2 - n - n * std::log(v));
  e.dissipation = m2 + n * (v - 1.0) * (v - 1.0) / v;
  return e;
}

Field sample_gaussian(const GaussianState& g, const GridPtr& grid) {
  if (g.dim() != grid->dim()) throw std::invalid_argument("Gaussian and grid dimensions differ");
  Field f(grid);
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < grid->size(); ++i) {
    for (int d = 0; d < grid->dim(); ++d) x[d] = grid->coordinate(i, d);
    f[i] = g.density(std::span<const double>(x.data(), grid->dim()));
  }
  return f;
}

Field heat_kernel_field(const GridPtr& grid, double t, double mass) {
  if (!(t > 0.0)) throw std::invalid_argument("heat kernel needs t > 0");
  return sample_gaussian(make_gaussian(grid->dim(), mass, 2.0 * t), grid);
}

}  // namespace aggdiff
