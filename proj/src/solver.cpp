#include "aggdiff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "aggdiff/oracles.hpp"
#include "aggdiff/spectral.hpp"
#include "flux.hpp"

namespace aggdiff {

Scheme parse_scheme(const std::string& name) {
  if (name == "etdrk2" || name == "IMEX_ETD_RK2") return Scheme::EtdRk2;
  if (name == "etdrk4" || name == "IMEX_ETD_RK4") return Scheme::EtdRk4;
  throw std::invalid_argument("unknown scheme '" + name + "' (etdrk2, etdrk4)");
}

const char* scheme_name(Scheme s) { return s == Scheme::EtdRk2 ? "etdrk2" : "etdrk4"; }

ClipPolicy parse_clip_policy(const std::string& name) {
  if (name == "clip_and_count") return ClipPolicy::ClipAndCount;
  if (name == "error_above_threshold") return ClipPolicy::ErrorAboveThreshold;
  throw std::invalid_argument("unknown clip policy '" + name +
                              "' (clip_and_count, error_above_threshold)");
}

const char* clip_policy_name(ClipPolicy p) {
  return p == ClipPolicy::ClipAndCount ? "clip_and_count" : "error_above_threshold";
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");
  if (diagnostics_every < 1) throw std::invalid_argument("diagnostics_every must be >= 1");
  if (!(negative_threshold >= 0.0)) throw std::invalid_argument("negative_threshold must be >= 0");
}

double etd_phi(int k, double z) {
  if (k < 0 || k > 3) throw std::invalid_argument("etd_phi defined for k = 0..3");
  if (std::abs(z) < 1.0) {
    double term = 1.0, fact = 1.0;
    for (int j = 1; j <= k; ++j) fact *= j;
    term = 1.0 / fact;
    double sum = term;
    for (int j = 1; j < 40; ++j) {
      term *= z / (j + k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  switch (k) {
    case 0:
      return std::exp(z);
    case 1:
      return std::expm1(z) / z;
    case 2:
      return (std::expm1(z) - z) / (z * z);
    default:
      return (std::expm1(z) - z - 0.5 * z * z) / (z * z * z);
  }
}

EtdIntegrator::EtdIntegrator(GridPtr grid, Scheme scheme, double dt)
    : grid_(std::move(grid)), scheme_(scheme), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto xi2 = grid_->wavenumber_squared();
  const std::size_t n = grid_->size();
  e_.resize(n);
  if (scheme == Scheme::EtdRk2) {
    phi1_.resize(n);
    phi2_.resize(n);
  } else {
    e_half_.resize(n);
    q_half_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double z = -xi2[i] * dt;
    e_[i] = std::exp(z);
    if (scheme == Scheme::EtdRk2) {
      phi1_[i] = dt * etd_phi(1, z);
      phi2_[i] = dt * etd_phi(2, z);
    } else {
      const double p1 = etd_phi(1, z), p2 = etd_phi(2, z), p3 = etd_phi(3, z);
      e_half_[i] = std::exp(0.5 * z);
      q_half_[i] = 0.5 * dt * etd_phi(1, 0.5 * z);
      f1_[i] = dt * (p1 - 3.0 * p2 + 4.0 * p3);
      f2_[i] = dt * (p2 - 2.0 * p3);
      f3_[i] = dt * (4.0 * p3 - p2);
    }
  }
}

void EtdIntegrator::step(std::vector<Complex>& u, double t, const Nonlinear& nonlinear) const {
  const std::size_t n = u.size();
  const double h = dt_;
  std::vector<Complex> nu(n), a(n), na(n);
  nonlinear(u, t, nu);
  if (scheme_ == Scheme::EtdRk2) {
    for (std::size_t i = 0; i < n; ++i) a[i] = e_[i] * u[i] + phi1_[i] * nu[i];
    nonlinear(a, t + h, na);
    for (std::size_t i = 0; i < n; ++i) u[i] = a[i] + phi2_[i] * (na[i] - nu[i]);
    return;
  }
  std::vector<Complex> b(n), nb(n), c(n), nc(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = e_half_[i] * u[i] + q_half_[i] * nu[i];
  nonlinear(a, t + 0.5 * h, na);
  for (std::size_t i = 0; i < n; ++i) b[i] = e_half_[i] * u[i] + q_half_[i] * na[i];
  nonlinear(b, t + 0.5 * h, nb);
  for (std::size_t i = 0; i < n; ++i)
    c[i] = e_half_[i] * a[i] + q_half_[i] * (2.0 * nb[i] - nu[i]);
  nonlinear(c, t + h, nc);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = e_[i] * u[i] + f1_[i] * nu[i] + 2.0 * f2_[i] * (na[i] + nb[i]) + f3_[i] * nc[i];
}

Interaction::Interaction(const SampledPotential& w) {
  if (w.is_zero()) return;
  const double c = convolution_factor(w.potential.grid->dim());
  for (const Field& g : w.gradient) {
    Spectrum s = forward(g);
    for (Complex& v : s.coeffs) v *= c;
    multipliers_.push_back(std::move(s.coeffs));
  }
}

Interaction Interaction::from_radial(const GridPtr& grid, const std::function<double(double)>& m) {
  const Grid& g = *grid;
  Interaction out;
  const auto xi2 = g.wavenumber_squared();
  const auto xi = g.wavenumbers();
  std::vector<double> radial(g.size());
  bool any = false;
  for (std::size_t f = 0; f < g.size(); ++f) {
    radial[f] = m(std::sqrt(xi2[f]));
    any = any || radial[f] != 0.0;
  }
  if (!any) return out;
  const int nyquist = g.n() / 2;
  for (int d = 0; d < g.dim(); ++d) {
    std::vector<Complex> mult(g.size());
    for (std::size_t f = 0; f < g.size(); ++f) {
      const int k = g.unravel(f)[d];
      mult[f] = k == nyquist ? Complex{} : Complex(0.0, xi[k] * radial[f]);
    }
    out.multipliers_.push_back(std::move(mult));
  }
  return out;
}

namespace detail {

void bilinear_flux(const Grid& grid, const std::vector<Complex>& rho_hat,
                   const std::vector<Complex>& psi_hat, const Interaction& interaction,
                   bool dealias, std::vector<Complex>& out) {
  const std::size_t n = grid.size();
  out.assign(n, Complex{});
  if (interaction.is_zero()) return;
  const std::vector<double> mask = dealias ? dealias_mask(grid) : std::vector<double>(n, 1.0);
  std::vector<Complex> scratch(2 * n), tmp(n), prod_hat(n);
  std::vector<double> rho(n), v(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = rho_hat[i] * mask[i];
  detail::inverse_values(grid, tmp, rho, scratch);
  const auto xi = grid.wavenumbers();
  const int nyquist = grid.n() / 2;
  for (int d = 0; d < grid.dim(); ++d) {
    const auto& m = interaction.multiplier(d);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] * psi_hat[i] * mask[i];
    detail::inverse_values(grid, tmp, v, scratch);
    for (std::size_t i = 0; i < n; ++i) v[i] *= rho[i];
    detail::forward_values(grid, v, prod_hat, scratch);
    for (std::size_t f = 0; f < n; ++f) {
      const int k = grid.unravel(f)[d];
      if (k == nyquist) continue;
      out[f] += Complex(0.0, xi[k]) * prod_hat[f] * mask[f];
    }
  }
}

}  // namespace detail

void divergence_flux(const Grid& grid, const std::vector<Complex>& rho_hat,
                     const Interaction& interaction, bool dealias, std::vector<Complex>& out) {
  detail::bilinear_flux(grid, rho_hat, rho_hat, interaction, dealias, out);
}

Field rhs_nonlinear(const Field& rho, const SampledPotential& w, bool dealias) {
  require_same_grid(*rho.grid, *w.potential.grid);
  const Interaction inter(w);
  Spectrum s = forward(rho);
  std::vector<Complex> out;
  divergence_flux(*rho.grid, s.coeffs, inter, dealias, out);
  s.coeffs = std::move(out);
  Field r = inverse(s);
  if (!r.all_finite()) throw std::runtime_error("nonlinear term produced non-finite values");
  return r;
}

namespace {

std::string state_summary(const Field& u) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : u.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::ostringstream os;
  os.precision(10);
  os << "min " << lo << ", max " << hi << ", mass " << u.integral();
  return os.str();
}

}  // namespace

void apply_clip_policy(Field& u, const SolverConfig& cfg, ClipStats& stats, double t) {
  double umax = 0.0, umin = 0.0;
  for (double v : u.values) {
    umax = std::max(umax, std::abs(v));
    umin = std::min(umin, v);
  }
  stats.most_negative = std::min(stats.most_negative, umin);
  if (cfg.clip_policy == ClipPolicy::ErrorAboveThreshold) {
    if (umin < -cfg.negative_threshold * umax) {
      std::ostringstream os;
      os << "negative density " << umin << " at t=" << t << " exceeds " << cfg.negative_threshold
         << " of the maximum " << umax;
      throw std::runtime_error(os.str());
    }
    return;
  }
  const double tol = 1e-12 * umax;
  long count = 0;
  for (double& v : u.values)
    if (v < -tol) {
      v = 0.0;
      ++count;
    }
  if (count > 0) {
    stats.clipped_values += count;
    ++stats.steps_with_clipping;
  }
}

Field step(const Field& rho, const SampledPotential& w, const SolverConfig& cfg) {
  require_same_grid(*rho.grid, *w.potential.grid);
  if (cfg.dt == 0.0) return rho;
  cfg.validate();
  const Interaction inter(w);
  const EtdIntegrator integ(rho.grid, cfg.scheme, cfg.dt);
  Spectrum s = forward(rho);
  const Grid& g = *rho.grid;
  integ.step(s.coeffs, 0.0, [&](const std::vector<Complex>& u, double, std::vector<Complex>& out) {
    divergence_flux(g, u, inter, cfg.dealias, out);
  });
  Field out = inverse(s);
  if (!out.all_finite()) throw std::runtime_error("step produced non-finite values");
  ClipStats stats;
  apply_clip_policy(out, cfg, stats, cfg.dt);
  return out;
}

double max_velocity(const Field& rho, const Interaction& interaction) {
  if (interaction.is_zero()) return 0.0;
  const Grid& g = *rho.grid;
  const Spectrum s = forward(rho);
  std::vector<double> speed2(g.size(), 0.0), v(g.size());
  std::vector<Complex> tmp(g.size()), scratch(2 * g.size());
  for (int d = 0; d < g.dim(); ++d) {
    const auto& m = interaction.multiplier(d);
    for (std::size_t i = 0; i < g.size(); ++i) tmp[i] = m[i] * s.coeffs[i];
    detail::inverse_values(g, tmp, v, scratch);
    for (std::size_t i = 0; i < g.size(); ++i) speed2[i] += v[i] * v[i];
  }
  return std::sqrt(*std::max_element(speed2.begin(), speed2.end()));
}

SimulationResult simulate(const Field& rho0, const SampledPotential& w, const SolverConfig& cfg,
                          const DiagnosticsOptions& diag, const Observer& observer) {
  cfg.validate();
  require_same_grid(*rho0.grid, *w.potential.grid);
  if (!rho0.all_finite()) throw std::invalid_argument("initial data is not finite");
  const Grid& g = *rho0.grid;
  const long steps = cfg.t_end == 0.0 ? 0 : static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  const double h = steps > 0 ? cfg.t_end / steps : cfg.dt;

  SimulationResult res;
  res.dt = h;
  res.series = TimeSeries(base_columns());
  res.series.set_meta("scheme", scheme_name(cfg.scheme));
  res.series.set_meta("dt", std::to_string(h));
  res.series.set_meta("dealias", cfg.dealias ? "true" : "false");
  res.series.set_meta("clip_policy", clip_policy_name(cfg.clip_policy));
  res.series.set_meta("potential", w.spec.describe());
  res.series.set_meta("threads", "1");
  for (const auto& msg : w.warnings) res.warnings.push_back(msg);

  const Interaction inter(w);
  const EtdIntegrator integ(rho0.grid, cfg.scheme, h);
  Field u = rho0;
  Spectrum uhat = forward(u);
  bool warned_cfl = false, warned_boundary = false;

  auto record = [&](double t) {
    bool tainted = false;
    const std::vector<double> row = diagnostics_row(u, t, diag, &tainted);
    res.series.add_row(row);
    if (tainted && !warned_boundary) {
      warned_boundary = true;
      res.warnings.push_back("boundary mass above 1e-10 of the total at t=" + std::to_string(t) +
                             "; moments are tainted");
    }
    if (!inter.is_zero() && !warned_cfl) {
      const double courant = h * max_velocity(u, inter) / g.spacing();
      if (courant > 0.5) {
        warned_cfl = true;
        res.warnings.push_back("dt max|v| / h = " + std::to_string(courant) + " exceeds 0.5 at t=" +
                               std::to_string(t));
      }
    }
    if (observer) observer(t, u, row);
  };

  record(0.0);
  auto nonlinear = [&](const std::vector<Complex>& v, double, std::vector<Complex>& out) {
    divergence_flux(g, v, inter, cfg.dealias, out);
  };
  for (long k = 1; k <= steps; ++k) {
    const double t_prev = (k - 1) * h;
    integ.step(uhat.coeffs, t_prev, nonlinear);
    const double t = k == steps ? cfg.t_end : k * h;
    Field next = inverse(uhat);
    if (!next.all_finite()) {
      std::ostringstream os;
      os << "non-finite state at step " << k << " (t=" << t << "); last good state at t=" << t_prev
         << ": " << state_summary(u);
      throw std::runtime_error(os.str());
    }
    const long before = res.clips.clipped_values;
    apply_clip_policy(next, cfg, res.clips, t);
    u = std::move(next);
    if (res.clips.clipped_values != before) uhat = forward(u);
    if (k % cfg.diagnostics_every == 0 || k == steps) record(t);
  }
  res.steps = steps;
  res.final_state = std::move(u);
  res.series.set_meta("steps", std::to_string(steps));
  res.series.set_meta("clipped_values", std::to_string(res.clips.clipped_values));
  return res;
}

Field make_initial(const InitialDataSpec& spec, const GridPtr& grid) {
  const int dim = grid->dim();
  auto center_or_zero = [dim](std::vector<double> c) {
    if (c.empty()) c.assign(dim, 0.0);
    if (static_cast<int>(c.size()) != dim)
      throw std::invalid_argument("initial-data centre has the wrong dimension");
    return c;
  };
  if (!(spec.mass >= 0.0)) throw std::invalid_argument("initial mass must be >= 0");
  if (spec.mass == 0.0) return Field(grid);
  switch (spec.kind) {
    case InitialKind::Gaussian:
      return sample_gaussian(
          make_gaussian(dim, spec.mass, spec.sigma * spec.sigma, center_or_zero(spec.center)),
          grid);
    case InitialKind::TwoGaussians: {
      if (!(spec.weight > 0.0 && spec.weight < 1.0))
        throw std::invalid_argument("two-Gaussian weight must lie in (0, 1)");
      Field a = sample_gaussian(make_gaussian(dim, spec.weight * spec.mass,
                                              spec.sigma * spec.sigma, center_or_zero(spec.center)),
                                grid);
      a += sample_gaussian(make_gaussian(dim, (1.0 - spec.weight) * spec.mass,
                                         spec.sigma2 * spec.sigma2, center_or_zero(spec.center2)),
                           grid);
      return a;
    }
    case InitialKind::SmoothedIndicator: {
      if (!(spec.radius > 0.0 && spec.edge > 0.0))
        throw std::invalid_argument("indicator radius and edge must be positive");
      const auto c = center_or_zero(spec.center);
      Field f(grid);
      for (std::size_t i = 0; i < grid->size(); ++i) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) {
          const double dx = grid->coordinate(i, d) - c[d];
          r2 += dx * dx;
        }
        f[i] = 0.5 * (1.0 - std::tanh((std::sqrt(r2) - spec.radius) / spec.edge));
      }
      f *= spec.mass / f.integral();
      return f;
    }
  }
  return Field(grid);
}

double contraction_margin(const PotentialNorms& norms, double rho0_norm, double horizon, double p,
                          double c_m) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  const double q = std::isinf(p) ? 1.0 : (p == 1.0 ? std::numeric_limits<double>::infinity()
                                                    : p / (p - 1.0));
  const NormValue g = norms.grad_norm(q);
  if (horizon == 0.0) return 0.0;
  if (!g.finite) return std::numeric_limits<double>::infinity();
  return 4.0 * c_m * std::sqrt(horizon) * g.value * rho0_norm;
}

double sobolev_norm(const Field& u, int m, double p) {
  if (m < 0) throw std::invalid_argument("sobolev_norm needs m >= 0");
  const int dim = u.grid->dim();
  const Spectrum s = forward(u);
  double total = 0.0;
  std::array<int, 3> gamma{0, 0, 0};
  // enumerate multi-indices with |gamma| <= m
  const int base = m + 1;
  int count = 1;
  for (int d = 0; d < dim; ++d) count *= base;
  for (int code = 0; code < count; ++code) {
    int c = code, order = 0;
    for (int d = 0; d < dim; ++d) {
      gamma[d] = c % base;
      c /= base;
      order += gamma[d];
    }
    if (order > m) continue;
    if (order == 0) {
      total += lp_norm(u, p);
      continue;
    }
    total += lp_norm(inverse(spectral_derivative(s, std::span<const int>(gamma.data(), dim))), p);
  }
  return total;
}

}  // namespace aggdiff
