#include "aggdiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "aggdiff/oracles.hpp"
#include "aggdiff/quadrature.hpp"
#include "aggdiff/spectral.hpp"

namespace aggdiff {

namespace {

constexpr double kBoundaryThreshold = 1e-10;

double spectral_weighted(const Spectrum& s, double m) {
  const Grid& g = *s.grid;
  const auto xi2 = g.wavenumber_squared();
  double sum = 0.0;
  for (std::size_t f = 0; f < s.size(); ++f) {
    const double w = m == 0.0 ? 1.0 : std::pow(xi2[f], m);
    sum += w * std::norm(s.coeffs[f]);
  }
  return std::sqrt(sum * std::pow(g.wavenumber_spacing(), g.dim()));
}

}  // namespace

double lp_norm(const Field& u, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (p == 1.0) {
    for (double v : u.values) s += std::abs(v);
    return u.grid->cell_volume() * s;
  }
  if (p == 2.0) {
    for (double v : u.values) s += v * v;
    return std::sqrt(u.grid->cell_volume() * s);
  }
  for (double v : u.values) s += std::pow(std::abs(v), p);
  return std::pow(u.grid->cell_volume() * s, 1.0 / p);
}

double hm_seminorm(const Field& u, double m) {
  if (!(m >= 0.0)) throw std::invalid_argument("hm_seminorm needs m >= 0");
  return spectral_weighted(forward(u), m);
}

TaintedValue second_moment(const Field& u) {
  const Grid& g = *u.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.radius_squared(i) * u[i];
  return {g.cell_volume() * s, boundary_mass_fraction(u) > kBoundaryThreshold};
}

TaintedValue weighted_l2(const Field& u) {
  const Grid& g = *u.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.radius_squared(i) * u[i] * u[i];
  return {std::sqrt(g.cell_volume() * s), boundary_mass_fraction(u) > kBoundaryThreshold};
}

double l1_heat_distance(const Field& rho, double t, double mass) {
  if (!(t > 0.0)) throw std::invalid_argument("l1_heat_distance needs t > 0");
  const Grid& g = *rho.grid;
  const double var = 2.0 * t;
  const double norm = mass * std::pow(2.0 * std::numbers::pi * var, -0.5 * g.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    s += std::abs(rho[i] - norm * std::exp(-g.radius_squared(i) / (2.0 * var)));
  return g.cell_volume() * s;
}

namespace {

LowFrequency low_freq_from_spectrum(const Spectrum& s, double t, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("low_freq_fraction needs k > 0");
  const Grid& g = *s.grid;
  const double radius2 = 2.0 * k / (t + 1.0);
  const auto xi2 = g.wavenumber_squared();
  double inside = 0.0, total = 0.0;
  for (std::size_t f = 0; f < s.size(); ++f) {
    const double e = std::norm(s.coeffs[f]);
    total += e;
    if (xi2[f] <= radius2) inside += e;
  }
  LowFrequency out;
  const double dk = g.wavenumber_spacing();
  out.only_dc = radius2 < dk * dk;
  out.fraction = total > 0.0 ? inside / total : 0.0;
  return out;
}

}  // namespace

LowFrequency low_freq_fraction(const Field& u, double t, double k) {
  return low_freq_from_spectrum(forward(u), t, k);
}

TimeSeries::TimeSeries(std::vector<std::string> columns)
    : names_(std::move(columns)), data_(names_.size()) {}

bool TimeSeries::has(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t TimeSeries::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::out_of_range("no column named '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

const std::vector<double>& TimeSeries::column(const std::string& name) const {
  return data_[index_of(name)];
}

void TimeSeries::add_row(const std::vector<double>& row) {
  if (row.size() != names_.size())
    throw std::invalid_argument("row has " + std::to_string(row.size()) + " values, expected " +
                                std::to_string(names_.size()));
  for (std::size_t c = 0; c < row.size(); ++c) data_[c].push_back(row[c]);
}

std::vector<double> TimeSeries::row(std::size_t i) const {
  std::vector<double> r(names_.size());
  for (std::size_t c = 0; c < names_.size(); ++c) r[c] = data_[c].at(i);
  return r;
}

void TimeSeries::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : metadata_)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  metadata_.emplace_back(key, value);
}

const std::vector<std::string>& base_columns() {
  static const std::vector<std::string> cols{"t",  "mass", "l1", "l2",    "linf",   "h1",
                                             "h2", "m2",   "xrho2", "l1heat", "lowfreq"};
  return cols;
}

const std::vector<std::string>& entropy_columns() {
  static const std::vector<std::string> cols{"s",   "H",   "Hrel", "D",  "cross",
                                             "T2",  "T31", "T32",  "T4", "logsob"};
  return cols;
}

std::vector<double> diagnostics_row(const Field& rho, double t, const DiagnosticsOptions& opt,
                                    bool* tainted) {
  const Spectrum s = forward(rho);
  const double mass = rho.integral();
  const auto m2 = second_moment(rho);
  const auto xr = weighted_l2(rho);
  const double ref_mass = opt.mass > 0.0 ? opt.mass : mass;
  const double heat = t > 0.0 ? l1_heat_distance(rho, t, ref_mass)
                              : std::numeric_limits<double>::quiet_NaN();
  if (tainted) *tainted = m2.tainted;
  return {t,
          mass,
          lp_norm(rho, 1.0),
          lp_norm(rho, 2.0),
          lp_norm(rho, std::numeric_limits<double>::infinity()),
          spectral_weighted(s, 1.0),
          spectral_weighted(s, 2.0),
          m2.value,
          xr.value,
          heat,
          low_freq_from_spectrum(s, t, opt.split_k).fraction};
}

ProductCheck dm_product_check(const Field& f, const Field& g, const Field& h, double m) {
  if (!(m >= 1.0)) throw std::invalid_argument("dm_product_check needs m >= 1");
  require_same_grid(*f.grid, *g.grid);
  require_same_grid(*f.grid, *h.grid);
  Field u = convolve(g, h);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= f[i];
  ProductCheck c;
  c.lhs = hm_seminorm(u, m);
  const double f2 = lp_norm(f, 2.0), g2 = lp_norm(g, 2.0), h2 = lp_norm(h, 2.0);
  c.rhs = std::pow(2.0, m - 1.0) * (hm_seminorm(f, m) * g2 * h2 + f2 * hm_seminorm(g, m) * h2);
  c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : 0.0;
  return c;
}

namespace {

double derivative_lp(const Field& u, double order, double p) {
  if (order == 0.0) return lp_norm(u, p);
  if (p == 2.0) return hm_seminorm(u, order);
  return lp_norm(inverse(riesz_power(forward(u), order)), p);
}

double reciprocal(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace

GnsCheck gns_check(const Field& u, double j, double m, double p, double q, double s,
                   double theta) {
  const double n = u.grid->dim();
  const double rhs_exp = j / n + theta * (reciprocal(q) - m / n) + (1.0 - theta) * reciprocal(s);
  if (std::abs(reciprocal(p) - rhs_exp) > 1e-12)
    throw std::invalid_argument("exponents violate 1/p = j/N + theta(1/q - m/N) + (1-theta)/s");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
  GnsCheck c;
  c.lhs = derivative_lp(u, j, p);
  c.rhs_without_constant =
      std::pow(derivative_lp(u, m, q), theta) * std::pow(lp_norm(u, s), 1.0 - theta);
  c.ratio = c.rhs_without_constant > 0.0 ? c.lhs / c.rhs_without_constant : 0.0;
  return c;
}

BetaCheck truncated_beta_check(double t, double alpha) {
  if (!(t >= 1.0)) throw std::invalid_argument("truncated_beta_check needs t >= 1");
  if (!(alpha >= 1.0)) throw std::invalid_argument("truncated_beta_check needs alpha >= 1");
  // s = t - u^2 removes the endpoint singularity
  auto f = [&](double u) { return 2.0 * std::pow(1.0 + t - u * u, -alpha); };
  BetaCheck c;
  c.integral = integrate(f, 0.0, std::sqrt(t), 1e-12, 1e-300).value;
  c.shape = alpha > 1.0 ? 1.0 / std::sqrt(t) : std::log1p(t) / std::sqrt(t);
  c.ratio = c.integral / c.shape;
  return c;
}

}  // namespace aggdiff
