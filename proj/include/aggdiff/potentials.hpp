#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aggdiff/grid.hpp"

namespace aggdiff {

enum class PotentialKind { Zero, Gaussian, MorseType, Tabulated };

/// Radial interaction potential W(x) = k(|x|).
///
/// Families:
///   Gaussian   k(r) = A exp(-r^2 / sigma^2)
///   MorseType  k(r) = A (1 - exp(-r^alpha)), alpha >= 1
///   Tabulated  monotone cubic (PCHIP) interpolation of samples (r_i, k_i),
///              r_0 = 0, constant beyond the last radius.
class PotentialSpec {
 public:
  static PotentialSpec zero();
  static PotentialSpec gaussian(double amplitude, double width);
  static PotentialSpec morse(double amplitude, double exponent);
  static PotentialSpec tabulated(std::vector<double> radii, std::vector<double> values);
  /// Two-column "r value" text file with one header line.
  static PotentialSpec load_tabulated(const std::string& path);

  PotentialKind kind() const noexcept { return kind_; }
  double amplitude() const noexcept { return amplitude_; }
  double width() const noexcept { return width_; }
  double exponent() const noexcept { return exponent_; }
  std::span<const double> table_radii() const noexcept { return radii_; }
  std::span<const double> table_values() const noexcept { return values_; }

  /// Same family with the amplitude (or every table value) multiplied by lambda.
  PotentialSpec scaled(double lambda) const;

  double profile(double r) const;
  /// k'(r); at r = 0 the one-sided limit.
  double profile_d1(double r) const;
  /// k''(r); +-infinity where the profile is not twice differentiable at 0.
  double profile_d2(double r) const;

  /// k(infinity): A for MorseType, the last sample for Tabulated, else 0.
  double far_field() const;
  /// Radius beyond which the profile derivative is negligible.
  double effective_radius() const;
  /// True if r lies past the last tabulated radius (constant tail in use).
  bool extrapolated(double r) const;

  std::string describe() const;

 private:
  PotentialKind kind_ = PotentialKind::Zero;
  double amplitude_ = 0.0;
  double width_ = 1.0;
  double exponent_ = 2.0;
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<double> slopes_;

  std::size_t segment(double r) const;
};

double eval_potential(const PotentialSpec& w, std::span<const double> x);
std::vector<double> eval_gradient(const PotentialSpec& w, std::span<const double> x);
double eval_laplacian(const PotentialSpec& w, std::span<const double> x);
/// Delta W as a function of the radius in dimension N.
double radial_laplacian(const PotentialSpec& w, double r, int dim);

/// W and its analytic gradient sampled at the grid points, centred at the origin.
struct SampledPotential {
  PotentialSpec spec;
  Field potential;
  std::vector<Field> gradient;
  /// Constant removed before sampling (the MorseType/Tabulated far field).
  double far_field_shift = 0.0;
  std::vector<std::string> warnings;

  bool is_zero() const noexcept { return spec.kind() == PotentialKind::Zero; }
};

SampledPotential sample_on_grid(const PotentialSpec& w, const GridPtr& grid);

struct NormValue {
  double value = 0.0;
  bool finite = true;
};

struct PotentialNorms {
  int dim = 1;
  NormValue w_l1;
  NormValue w_l2;
  NormValue grad_l1;
  NormValue grad_linf;
  std::map<double, NormValue> grad_lq;
  /// ||[Delta W]_+||_{N/2} (a quasi-norm for N = 1).
  NormValue lap_plus_lhalfN;
  /// int [Delta W]_+^{N/2} dx, the quantity displayed for Morse potentials.
  double lap_plus_integral = 0.0;
  /// sup_x |x . grad W(x)|.
  NormValue radial_bound;
  /// For W = 1 - exp(-|x|^2): int_{|x|<=N} (|x|^2 - N)^{N/2} exp(-N|x|^2/2) dx,
  /// evaluated literally; NaN when the power of a negative base is undefined.
  std::optional<double> morse_display_value;

  /// ||grad W||_q for q in the requested list, q = infinity, or q = 1.
  NormValue grad_norm(double q) const;
};

/// Unit sphere area omega_{N-1}: 2, 2 pi, 4 pi.
double unit_sphere_area(int dim);

/// Radial quadrature of every norm consumed by the smallness conditions and
/// the bounds pipeline, relative tolerance 1e-10.
PotentialNorms potential_norms(const PotentialSpec& w, int dim,
                               std::span<const double> q_list = {});

/// Plain Fourier transform int (W - W_inf)(x) e^{-i x.xi} dx of a radial
/// potential and of its virial field x . grad W, as functions of |xi|.
/// Closed forms for Gaussian profiles; Hankel quadrature tabulated on
/// [0, k_max] otherwise.
class RadialTransform {
 public:
  RadialTransform(const PotentialSpec& w, int dim, double k_max);

  double value(double k) const;
  double virial(double k) const;

 private:
  int dim_;
  bool closed_form_ = false;
  double gauss_amplitude_ = 0.0;
  double gauss_width_ = 1.0;
  double k_step_ = 0.0;
  std::vector<double> table_value_;
  std::vector<double> table_virial_;

  double lookup(const std::vector<double>& table, double k) const;
};

}  // namespace aggdiff
