#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>
#include <stdexcept>

#include "aggdiff/potentials.hpp"
#include "aggdiff/quadrature.hpp"

namespace aggdiff {

namespace {

constexpr int kTableSize = 2048;

// Radial kernel of the N-dimensional Fourier transform of a radial function.
double hankel_kernel(int dim, double k, double r) {
  const double kr = k * r;
  switch (dim) {
    case 1:
      return 2.0 * std::cos(kr);
    case 2:
      return 2.0 * std::numbers::pi * std::cyl_bessel_j(0.0, kr) * r;
    default:
      return 4.0 * std::numbers::pi * (kr == 0.0 ? 1.0 : std::sin(kr) / kr) * r * r;
  }
}

// Composite Gauss-Legendre rule on [0, radius]: panels shrink geometrically
// towards r = 0 (profiles like 1 - exp(-r^alpha) are not smooth there), split
// at the table knots and are at most half an oscillation wide at k_max.
struct RadialRule {
  std::vector<double> r, w;
};

RadialRule radial_rule(double radius, double k_max, std::span<const double> knots) {
  const double width = std::min({0.25, std::numbers::pi / k_max, radius});
  std::vector<double> breaks{0.0};
  for (int j = 40; j >= 1; --j) breaks.push_back(std::ldexp(width, -j));
  const int uniform = static_cast<int>(std::ceil(radius / width));
  for (int i = 1; i <= uniform; ++i) breaks.push_back(std::min(radius, i * width));
  for (double k : knots)
    if (k > 0.0 && k < radius) breaks.push_back(k);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const auto [x, wt] = gauss_legendre(16);
  RadialRule rule;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    for (std::size_t q = 0; q < x.size(); ++q) {
      rule.r.push_back(0.5 * (a + b) + 0.5 * (b - a) * x[q]);
      rule.w.push_back(0.5 * (b - a) * wt[q]);
    }
  }
  return rule;
}

}  // namespace

RadialTransform::RadialTransform(const PotentialSpec& w, int dim, double k_max) : dim_(dim) {
  unit_sphere_area(dim);
  if (!(k_max > 0.0)) throw std::invalid_argument("k_max must be positive");
  switch (w.kind()) {
    case PotentialKind::Zero:
      closed_form_ = true;
      return;
    case PotentialKind::Gaussian:
      closed_form_ = true;
      gauss_amplitude_ = w.amplitude();
      gauss_width_ = w.width();
      return;
    case PotentialKind::MorseType:
      if (w.exponent() == 2.0) {
        // A(1 - e^{-r^2}) minus its far field is a Gaussian of amplitude -A
        closed_form_ = true;
        gauss_amplitude_ = -w.amplitude();
        gauss_width_ = 1.0;
        return;
      }
      break;
    case PotentialKind::Tabulated:
      break;
  }

  const double far = w.far_field();
  const RadialRule rule = radial_rule(w.effective_radius(), k_max, w.table_radii());
  std::vector<double> g(rule.r.size()), v(rule.r.size());
  for (std::size_t j = 0; j < rule.r.size(); ++j) {
    g[j] = rule.w[j] * (w.profile(rule.r[j]) - far);
    v[j] = rule.w[j] * rule.r[j] * w.profile_d1(rule.r[j]);
  }
  k_step_ = k_max / (kTableSize - 3);
  table_value_.resize(kTableSize);
  table_virial_.resize(kTableSize);
  for (int i = 0; i < kTableSize; ++i) {
    const double k = std::abs(i - 1) * k_step_;
    double sv = 0.0, sw = 0.0;
    for (std::size_t j = 0; j < rule.r.size(); ++j) {
      const double kern = hankel_kernel(dim, k, rule.r[j]);
      sv += g[j] * kern;
      sw += v[j] * kern;
    }
    table_value_[i] = sv;
    table_virial_[i] = sw;
  }
}

double RadialTransform::lookup(const std::vector<double>& table, double k) const {
  // Catmull-Rom; index 0 holds k = -step (even mirror)
  const double x = k / k_step_ + 1.0;
  int i = static_cast<int>(std::floor(x));
  i = std::max(1, std::min(i, static_cast<int>(table.size()) - 3));
  const double t = x - i;
  const double p0 = table[i - 1], p1 = table[i], p2 = table[i + 1], p3 = table[i + 2];
  return p1 + 0.5 * t *
                  (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                  t * (3.0 * (p1 - p2) + p3 - p0)));
}

double RadialTransform::value(double k) const {
  k = std::abs(k);
  if (closed_form_) {
    if (gauss_amplitude_ == 0.0) return 0.0;
    const double s2 = gauss_width_ * gauss_width_;
    return gauss_amplitude_ * std::pow(std::numbers::pi * s2, 0.5 * dim_) *
           std::exp(-0.25 * s2 * k * k);
  }
  if (k > k_step_ * (kTableSize - 3)) return 0.0;
  return lookup(table_value_, k);
}

double RadialTransform::virial(double k) const {
  k = std::abs(k);
  if (closed_form_) {
    const double s2 = gauss_width_ * gauss_width_;
    return -(dim_ - 0.5 * s2 * k * k) * value(k);
  }
  if (k > k_step_ * (kTableSize - 3)) return 0.0;
  return lookup(table_virial_, k);
}

}  // namespace aggdiff
