#include "aggdiff/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft_plans.hpp"

namespace aggdiff {

namespace {

double forward_scale(const Grid& g) {
  return g.cell_volume() / std::pow(2.0 * std::numbers::pi, 0.5 * g.dim());
}

}  // namespace

namespace detail {

void forward_values(const Grid& grid, std::span<const double> in, std::span<Complex> out,
                    std::span<Complex> scratch) {
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) scratch[i] = Complex(in[i], 0.0);
  grid.plans().forward(scratch.data(), out.data());
  const double c = forward_scale(grid);
  const auto phase = grid.centring_phase();
  for (std::size_t i = 0; i < n; ++i) out[i] *= c * phase[i];
}

void inverse_values(const Grid& grid, std::span<const Complex> spectrum, std::span<double> out,
                    std::span<Complex> scratch, bool check_residue) {
  const std::size_t n = grid.size();
  const double c = 1.0 / (forward_scale(grid) * static_cast<double>(n));
  const auto phase = grid.centring_phase();
  Complex* a = scratch.data();
  Complex* b = scratch.data() + n;
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = spectrum[i] * (c * phase[i]);
    bound += std::abs(a[i]);
  }
  grid.plans().backward(a, b);
  double residue = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = b[i].real();
    residue = std::max(residue, std::abs(b[i].imag()));
  }
  if (check_residue && residue > 1e-12 * bound + 1e-300)
    throw std::runtime_error("inverse transform produced a complex field (imaginary residue " +
                             std::to_string(residue) + ")");
}

}  // namespace detail

Spectrum forward(const Field& u) {
  Spectrum s(u.grid);
  std::vector<Complex> scratch(u.size());
  detail::forward_values(*u.grid, u.values, s.coeffs, scratch);
  return s;
}

Field inverse(const Spectrum& s) {
  Field u(s.grid);
  std::vector<Complex> scratch(2 * s.size());
  detail::inverse_values(*s.grid, s.coeffs, u.values, scratch);
  return u;
}

Spectrum spectral_derivative(const Spectrum& s, std::span<const int> multi_index) {
  const Grid& g = *s.grid;
  if (static_cast<int>(multi_index.size()) != g.dim())
    throw std::invalid_argument("multi-index length must equal the grid dimension");
  int order = 0;
  for (int a : multi_index) {
    if (a < 0) throw std::invalid_argument("negative derivative order");
    order += a;
  }
  if (order > 8) throw std::invalid_argument("derivative order above 8");

  Spectrum out = s;
  if (order == 0) return out;
  const auto xi = g.wavenumbers();
  const int nyquist = g.n() / 2;
  for (std::size_t f = 0; f < out.size(); ++f) {
    const auto idx = g.unravel(f);
    Complex factor(1.0, 0.0);
    for (int d = 0; d < g.dim(); ++d) {
      const int a = multi_index[d];
      if (a == 0) continue;
      if (idx[d] == nyquist && a % 2 == 1) {
        factor = 0.0;
        break;
      }
      factor *= std::pow(Complex(0.0, xi[idx[d]]), a);
    }
    out.coeffs[f] *= factor;
  }
  return out;
}

Spectrum riesz_power(const Spectrum& s, double m) {
  if (!(m >= 0.0)) throw std::invalid_argument("Riesz power requires m >= 0");
  Spectrum out = s;
  if (m == 0.0) return out;
  const auto xi2 = s.grid->wavenumber_squared();
  for (std::size_t f = 0; f < out.size(); ++f) out.coeffs[f] *= std::pow(xi2[f], 0.5 * m);
  return out;
}

double spectral_l2(const Spectrum& s) {
  double sum = 0.0;
  for (const Complex& c : s.coeffs) sum += std::norm(c);
  return std::sqrt(sum * std::pow(s.grid->wavenumber_spacing(), s.grid->dim()));
}

double convolution_factor(int dim) { return std::pow(2.0 * std::numbers::pi, 0.5 * dim); }

Field convolve(const Field& u, const Field& v) {
  require_same_grid(*u.grid, *v.grid);
  Spectrum a = forward(u);
  const Spectrum b = forward(v);
  const double c = convolution_factor(u.grid->dim());
  for (std::size_t f = 0; f < a.size(); ++f) a.coeffs[f] *= c * b.coeffs[f];
  return inverse(a);
}

namespace {

double max_abs(const Field& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

bool outer_band_small(const Field& u) {
  const Grid& g = *u.grid;
  const double peak = max_abs(u);
  if (peak == 0.0) return true;
  const double cut = 0.5 * g.half_width();
  for (std::size_t f = 0; f < u.size(); ++f) {
    bool outer = false;
    for (int d = 0; d < g.dim(); ++d) outer = outer || std::abs(g.coordinate(f, d)) > cut;
    if (outer && std::abs(u[f]) > 1e-12 * peak) return false;
  }
  return true;
}

}  // namespace

bool convolution_is_faithful(const Field& u, const Field& v) {
  return outer_band_small(u) && outer_band_small(v);
}

double boundary_mass_fraction(const Field& u) {
  const Grid& g = *u.grid;
  double total = 0.0;
  double edge = 0.0;
  for (std::size_t f = 0; f < u.size(); ++f) {
    const double a = std::abs(u[f]);
    total += a;
    const auto idx = g.unravel(f);
    bool at_edge = false;
    for (int d = 0; d < g.dim(); ++d) at_edge = at_edge || idx[d] == 0 || idx[d] == g.n() - 1;
    if (at_edge) edge += a;
  }
  return total > 0.0 ? edge / total : 0.0;
}

std::vector<double> dealias_mask(const Grid& grid) {
  std::vector<double> mask(grid.size(), 1.0);
  const int cutoff = grid.n() / 3;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto idx = grid.unravel(f);
    for (int d = 0; d < grid.dim(); ++d)
      if (std::abs(grid.frequency(idx[d])) > cutoff) mask[f] = 0.0;
  }
  return mask;
}

namespace {

// Row j holds the periodic interpolation weights for the point x_j' given the
// source samples; the Nyquist mode enters as a cosine, giving the kernel
// sin(n t / 2) cot(t / 2) / n with t = pi (x' - x_i) / L.
std::vector<double> interpolation_matrix(const Grid& source, std::span<const double> points) {
  const int ns = source.n();
  const double L = source.half_width();
  const auto xs = source.coordinates();
  std::vector<double> m(points.size() * ns, 0.0);
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double x = points[j];
    if (x < -L || x >= L) continue;
    for (int i = 0; i < ns; ++i) {
      const double z = x - xs[i];
      double w;
      if (std::abs(z) < 1e-13 * L) {
        w = 1.0;
      } else {
        const double t = std::numbers::pi * z / L;
        w = std::sin(0.5 * ns * t) / std::tan(0.5 * t) / ns;
      }
      m[j * ns + i] = w;
    }
  }
  return m;
}

}  // namespace

Field resample_scaled(const Field& u, double scale, const GridPtr& target) {
  const Grid& src = *u.grid;
  const Grid& tgt = *target;
  if (src.dim() != tgt.dim()) throw std::invalid_argument("resample between different dimensions");
  if (!(scale > 0.0)) throw std::invalid_argument("resample scale must be positive");

  const int dim = src.dim();
  const int ns = src.n();
  const int nt = tgt.n();
  std::vector<double> points(nt);
  for (int j = 0; j < nt; ++j) points[j] = scale * tgt.coordinates()[j];
  const std::vector<double> m = interpolation_matrix(src, points);

  // Apply the 1-D interpolation along each axis in turn.
  std::vector<int> shape(dim, ns);
  std::vector<double> data = u.values;
  for (int axis = 0; axis < dim; ++axis) {
    std::size_t outer = 1, inner = 1;
    for (int d = 0; d < axis; ++d) outer *= shape[d];
    for (int d = axis + 1; d < dim; ++d) inner *= shape[d];
    std::vector<double> next(outer * nt * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      const double* in = data.data() + o * ns * inner;
      double* out = next.data() + o * nt * inner;
      for (int j = 0; j < nt; ++j) {
        const double* row = m.data() + static_cast<std::size_t>(j) * ns;
        double* dst = out + static_cast<std::size_t>(j) * inner;
        for (int i = 0; i < ns; ++i) {
          const double w = row[i];
          if (w == 0.0) continue;
          const double* s = in + static_cast<std::size_t>(i) * inner;
          for (std::size_t k = 0; k < inner; ++k) dst[k] += w * s[k];
        }
      }
    }
    shape[axis] = nt;
    data = std::move(next);
  }
  return Field(target, std::move(data));
}

}  // namespace aggdiff
