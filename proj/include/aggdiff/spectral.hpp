#pragma once

#include <span>
#include <vector>

#include "aggdiff/grid.hpp"

namespace aggdiff {

// Transform convention: forward(u)(xi) = h^N (2 pi)^{-N/2} sum_j u(x_j) e^{-i xi.x_j},
// the Riemann-sum version of the symmetric continuous transform. With it the
// discrete Plancherel identity reads
//     h^N sum |u_j|^2 = (pi/L)^N sum |u^_k|^2
// and convolution becomes forward(u * v) = (2 pi)^{N/2} u^ v^.

Spectrum forward(const Field& u);

/// Throws std::runtime_error if the imaginary residue exceeds 1e-12 of the
/// coefficient l1 bound (the input did not come from a real field).
Field inverse(const Spectrum& s);

/// Multiplies by prod_d (i xi_d)^{gamma_d}. The Nyquist mode of an axis is
/// zeroed whenever that axis carries an odd derivative order.
Spectrum spectral_derivative(const Spectrum& s, std::span<const int> multi_index);

/// Multiplies by |xi|^m (the D^m operator); m must be >= 0.
Spectrum riesz_power(const Spectrum& s, double m);

/// Discrete L2 norm of a spectrum, (pi/L)^{N/2} (sum |c_k|^2)^{1/2}.
double spectral_l2(const Spectrum& s);

/// (2 pi)^{N/2}, the factor in forward(u * v) = factor * u^ v^.
double convolution_factor(int dim);

/// h^N-weighted periodic convolution approximating the R^N integral.
Field convolve(const Field& u, const Field& v);

/// True when both fields are below 1e-12 of their maximum everywhere outside
/// the inner half of the box; advisory precondition of convolve.
bool convolution_is_faithful(const Field& u, const Field& v);

/// Fraction of the absolute mass sitting within one cell of the box boundary.
double boundary_mass_fraction(const Field& u);

/// 2/3-rule mask: 1 where every |k_d| < n/3, else 0.
std::vector<double> dealias_mask(const Grid& grid);

/// g(y) = u(scale * y) evaluated on `target` by trigonometric interpolation,
/// one axis at a time. Points scale*y outside the source box evaluate to 0.
Field resample_scaled(const Field& u, double scale, const GridPtr& target);

namespace detail {

/// forward() into caller-owned storage; `scratch` must hold grid.size() values.
void forward_values(const Grid& grid, std::span<const double> in, std::span<Complex> out,
                    std::span<Complex> scratch);

/// inverse() into caller-owned storage; `scratch` must hold 2 * grid.size()
/// values. `spectrum` is not modified.
void inverse_values(const Grid& grid, std::span<const Complex> spectrum, std::span<double> out,
                    std::span<Complex> scratch, bool check_residue = true);

}  // namespace detail

}  // namespace aggdiff
