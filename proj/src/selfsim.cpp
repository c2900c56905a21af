#include "aggdiff/selfsim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "aggdiff/quadrature.hpp"
#include "aggdiff/spectral.hpp"
#include "flux.hpp"

namespace aggdiff {

double rescaled_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  return 0.5 * std::log1p(2.0 * t);
}

double source_time(double s) { return 0.5 * std::expm1(2.0 * s); }

namespace {

// Fraction of |u| sitting at points with some |x_d| >= limit.
double mass_outside(const Field& u, double limit) {
  const Grid& g = *u.grid;
  double out = 0.0, total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a = std::abs(u[i]);
    total += a;
    for (int d = 0; d < g.dim(); ++d)
      if (std::abs(g.coordinate(i, d)) >= limit) {
        out += a;
        break;
      }
  }
  return total > 0.0 ? out / total : 0.0;
}

Field rescale(const Field& u, double scale, double amplitude, const GridPtr& target) {
  const double lost = mass_outside(u, scale * target->half_width());
  if (lost > 1e-10) {
    std::ostringstream os;
    os << "a fraction " << lost << " of the mass falls outside the rescaled box; enlarge the target";
    throw std::invalid_argument(os.str());
  }
  Field out = resample_scaled(u, scale, target);
  out *= amplitude;
  return out;
}

}  // namespace

RescaledState to_selfsimilar(const Field& rho, double t, const GridPtr& target) {
  const double s = rescaled_time(t);
  const int dim = target->dim();
  return {rescale(rho, std::exp(s), std::exp(dim * s), target), s};
}

Field from_selfsimilar(const RescaledState& state, const GridPtr& target) {
  const int dim = target->dim();
  return rescale(state.f, std::exp(-state.s), std::exp(-dim * state.s), target);
}

SampledPotential rescaled_potential(const PotentialSpec& w, double s, const GridPtr& grid) {
  const Grid& g = *grid;
  const double e = std::exp(s);
  SampledPotential out{w, Field(grid), {}, w.far_field(), {}};
  for (int d = 0; d < g.dim(); ++d) out.gradient.emplace_back(grid);
  if (w.kind() == PotentialKind::Zero) return out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = std::sqrt(g.radius_squared(i));
    out.potential[i] = w.profile(e * r) - out.far_field_shift;
    if (r > 0.0) {
      const double c = e * w.profile_d1(e * r) / r;
      for (int d = 0; d < g.dim(); ++d) out.gradient[d][i] = c * g.coordinate(i, d);
    }
  }
  return out;
}

double rescaled_l1(const PotentialSpec& w, double s, int dim) {
  const double area = unit_sphere_area(dim);
  if (w.kind() == PotentialKind::Zero) return 0.0;
  const double e = std::exp(s);
  const double far = w.far_field();
  const double top = w.effective_radius() / e;
  auto integrand = [&](double r) {
    return area * std::pow(r, dim - 1) * std::abs(w.profile(e * r) - far);
  };
  // split at the table knots so kinks of |W| land on panel edges
  std::vector<double> edges{0.0};
  for (double r : w.table_radii())
    if (r > 0.0 && r / e < top) edges.push_back(r / e);
  edges.push_back(top);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    total += integrate(integrand, edges[i], edges[i + 1], 1e-12).value;
  return total;
}

RescaledKernel::RescaledKernel(const PotentialSpec& w, const GridPtr& grid) : grid_(grid) {
  if (w.kind() == PotentialKind::Zero) return;
  zero_ = false;
  const double k_max = std::sqrt(static_cast<double>(grid->dim())) * grid->wavenumber_spacing() *
                       (grid->n() / 2);
  transform_ = std::make_shared<RadialTransform>(w, grid->dim(), k_max);
}

double RescaledKernel::potential(double s, double k) const {
  if (zero_) return 0.0;
  return std::exp(-grid_->dim() * s) * transform_->value(std::exp(-s) * k);
}

double RescaledKernel::virial(double s, double k) const {
  if (zero_) return 0.0;
  return std::exp(-grid_->dim() * s) * transform_->virial(std::exp(-s) * k);
}

Interaction RescaledKernel::interaction(double s) const {
  if (zero_) return {};
  return Interaction::from_radial(grid_, [&](double k) { return potential(s, k); });
}

namespace {

// Interaction at the most recent stage time; ETD-RK4 queries t + h/2 twice.
class InteractionCache {
 public:
  explicit InteractionCache(const RescaledKernel& kernel) : kernel_(kernel) {}

  const Interaction& at(double s) {
    if (!valid_ || s != s_) {
      inter_ = kernel_.interaction(s);
      s_ = s;
      valid_ = true;
    }
    return inter_;
  }

 private:
  const RescaledKernel& kernel_;
  Interaction inter_;
  double s_ = 0.0;
  bool valid_ = false;
};

void confinement(const Grid& g, const std::vector<Complex>& f_hat, std::vector<Complex>& out) {
  const std::size_t n = g.size();
  std::vector<Complex> scratch(2 * n), prod_hat(n);
  std::vector<double> f(n), yf(n);
  detail::inverse_values(g, f_hat, f, scratch, false);
  const auto xi = g.wavenumbers();
  const int nyquist = g.n() / 2;
  for (int d = 0; d < g.dim(); ++d) {
    for (std::size_t i = 0; i < n; ++i) yf[i] = g.coordinate(i, d) * f[i];
    detail::forward_values(g, yf, prod_hat, scratch);
    for (std::size_t k = 0; k < n; ++k) {
      const int idx = g.unravel(k)[d];
      if (idx == nyquist) continue;
      out[k] += Complex(0.0, xi[idx]) * prod_hat[k];
    }
  }
}

void nonlinear_with(const Grid& g, const Interaction& inter, const std::vector<Complex>& f_hat,
                    bool dealias, std::vector<Complex>& out) {
  detail::bilinear_flux(g, f_hat, f_hat, inter, dealias, out);
  confinement(g, f_hat, out);
}

void check_boundary(const Field& f, double s) {
  const double frac = boundary_mass_fraction(f);
  if (frac > 1e-10) {
    std::ostringstream os;
    os << "boundary mass fraction " << frac << " at s=" << s
       << " exceeds 1e-10; enlarge the rescaled box";
    throw std::runtime_error(os.str());
  }
}

}  // namespace

void rescaled_nonlinear(const RescaledKernel& kernel, const std::vector<Complex>& f_hat, double s,
                        bool dealias, std::vector<Complex>& out) {
  nonlinear_with(*kernel.grid(), kernel.interaction(s), f_hat, dealias, out);
}

Field step_rescaled(const Field& f, double s, double ds, const RescaledKernel& kernel,
                    const SolverConfig& cfg) {
  require_same_grid(*f.grid, *kernel.grid());
  if (ds == 0.0) return f;
  const EtdIntegrator integ(f.grid, cfg.scheme, ds);
  InteractionCache cache(kernel);
  const Grid& g = *f.grid;
  Spectrum sp = forward(f);
  integ.step(sp.coeffs, s, [&](const std::vector<Complex>& u, double t, std::vector<Complex>& out) {
    nonlinear_with(g, cache.at(t), u, cfg.dealias, out);
  });
  Field out = inverse(sp);
  if (!out.all_finite()) throw std::runtime_error("rescaled step produced non-finite values");
  ClipStats stats;
  apply_clip_policy(out, cfg, stats, s + ds);
  check_boundary(out, s + ds);
  return out;
}

std::vector<double> EntropyRow::values() const {
  return {s, h, h_rel, dissipation, cross, t2, t31, t32, t4, logsob};
}

EntropyRow entropy_ledger(const Field& f, double s, const RescaledKernel& kernel) {
  require_same_grid(*f.grid, *kernel.grid());
  const Grid& g = *f.grid;
  const std::size_t n = g.size();
  const int dim = g.dim();
  const double dv = g.cell_volume();

  double fmax = 0.0;
  for (double v : f.values) fmax = std::max(fmax, std::abs(v));
  const double eps = std::max(kEntropyZeroFloor, kEntropyRelativeFloor * fmax);
  const double log_eps = std::log(eps);

  const Spectrum fh = forward(f);
  const auto xi = g.wavenumbers();
  const auto xi2 = g.wavenumber_squared();
  const int nyquist = g.n() / 2;
  std::vector<Complex> scratch(2 * n), tmp(n);

  auto inverse_of = [&](const std::function<Complex(std::size_t)>& mult) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = mult(k) * fh.coeffs[k];
    detail::inverse_values(g, tmp, out, scratch, false);
    return out;
  };
  auto derivative = [&](int d, const std::function<double(std::size_t)>& radial) {
    return inverse_of([&, d](std::size_t k) {
      const int idx = g.unravel(k)[d];
      return idx == nyquist ? Complex{} : Complex(0.0, xi[idx] * radial(k));
    });
  };

  std::vector<std::vector<double>> grad(dim);
  for (int d = 0; d < dim; ++d) grad[d] = derivative(d, [](std::size_t) { return 1.0; });

  EntropyRow r;
  r.s = s;
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f[i];
    const double y2 = g.radius_squared(i);
    mass += v;
    double flogf = 0.0;
    if (v > eps)
      flogf = v * std::log(v);
    else if (v > kEntropyZeroFloor)
      flogf = v * log_eps;
    r.h += flogf + 0.5 * y2 * v;
    if (v > eps) {
      double q = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double c = g.coordinate(i, d) * v + grad[d][i];
        q += c * c;
      }
      r.dissipation += q / v;
    }
  }
  mass *= dv;
  r.h *= dv;
  r.dissipation *= dv;
  r.h_rel = mass > 0.0 ? r.h - mass * std::log(mass) + 0.5 * dim * mass * std::log(2.0 * std::numbers::pi)
                       : std::numeric_limits<double>::quiet_NaN();
  r.logsob = r.dissipation - 2.0 * r.h_rel;
  if (kernel.is_zero()) return r;

  std::vector<double> m0(n), m1(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = std::sqrt(xi2[k]);
    m0[k] = kernel.potential(s, kk);
    m1[k] = kernel.virial(s, kk);
  }
  const auto conv = inverse_of([&](std::size_t k) { return Complex(m0[k]); });
  const auto vconv = inverse_of([&](std::size_t k) { return Complex(m1[k]); });
  std::vector<std::vector<double>> vel(dim);
  for (int d = 0; d < dim; ++d) vel[d] = derivative(d, [&](std::size_t k) { return m0[k]; });

  for (std::size_t i = 0; i < n; ++i) {
    const double v = f[i];
    r.cross += v * conv[i];
    r.t4 += v * vconv[i];
    for (int d = 0; d < dim; ++d) {
      r.t2 -= v * vel[d][i] * vel[d][i];
      r.t31 += v * g.coordinate(i, d) * vel[d][i];
      r.t32 += grad[d][i] * vel[d][i];
    }
  }
  r.cross *= 0.5 * dv;
  r.t4 *= 0.5 * dv;
  r.t2 *= dv;
  r.t31 *= 2.0 * dv;
  r.t32 *= 2.0 * dv;
  return r;
}

RescaledRunResult simulate_rescaled(const Field& f0, const PotentialSpec& w,
                                    const SolverConfig& cfg, const DiagnosticsOptions& diag,
                                    const Observer& observer) {
  cfg.validate();
  if (!f0.all_finite()) throw std::invalid_argument("initial data is not finite");
  const GridPtr grid = f0.grid;
  const Grid& g = *grid;
  const long steps = cfg.t_end == 0.0 ? 0 : static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  const double h = steps > 0 ? cfg.t_end / steps : cfg.dt;

  RescaledRunResult res;
  res.ds = h;
  std::vector<std::string> cols = base_columns();
  for (const auto& c : entropy_columns()) cols.push_back(c);
  res.series = TimeSeries(cols);
  res.series.set_meta("frame", "rescaled");
  res.series.set_meta("scheme", scheme_name(cfg.scheme));
  res.series.set_meta("ds", std::to_string(h));
  res.series.set_meta("dealias", cfg.dealias ? "true" : "false");
  res.series.set_meta("clip_policy", clip_policy_name(cfg.clip_policy));
  res.series.set_meta("potential", w.describe());
  res.series.set_meta("threads", "1");
  res.series.set_meta("entropy_floor", "f<=1e-300 -> 0; f<=1e-16*max -> f*log(1e-16*max)");

  const RescaledKernel kernel(w, grid);
  InteractionCache cache(kernel);
  const EtdIntegrator integ(grid, cfg.scheme, h);
  Field f = f0;
  Spectrum fh = forward(f);
  const double mass0 = f0.integral();

  auto record = [&](double s) {
    std::vector<double> row = diagnostics_row(f, source_time(s), diag);
    row[res.series.index_of("l1heat")] =
        l1_heat_distance(f, 0.5, diag.mass > 0.0 ? diag.mass : mass0);
    for (double v : entropy_ledger(f, s, kernel).values()) row.push_back(v);
    res.series.add_row(row);
    if (observer) observer(s, f, row);
  };

  check_boundary(f, 0.0);
  record(0.0);
  auto nonlinear = [&](const std::vector<Complex>& u, double s, std::vector<Complex>& out) {
    nonlinear_with(g, cache.at(s), u, cfg.dealias, out);
  };
  for (long k = 1; k <= steps; ++k) {
    const double s_prev = (k - 1) * h;
    integ.step(fh.coeffs, s_prev, nonlinear);
    const double s = k == steps ? cfg.t_end : k * h;
    Field next = inverse(fh);
    if (!next.all_finite()) {
      std::ostringstream os;
      os << "non-finite rescaled state at step " << k << " (s=" << s << ")";
      throw std::runtime_error(os.str());
    }
    const long before = res.clips.clipped_values;
    apply_clip_policy(next, cfg, res.clips, s);
    check_boundary(next, s);
    f = std::move(next);
    if (res.clips.clipped_values != before) fh = forward(f);
    if (k % cfg.diagnostics_every == 0 || k == steps) record(s);
  }
  res.steps = steps;
  res.final_state = std::move(f);
  res.series.set_meta("steps", std::to_string(steps));
  res.series.set_meta("clipped_values", std::to_string(res.clips.clipped_values));
  return res;
}

}  // namespace aggdiff
