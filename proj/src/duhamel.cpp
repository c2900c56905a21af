#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "aggdiff/quadrature.hpp"
#include "aggdiff/solver.hpp"
#include "aggdiff/spectral.hpp"
#include "flux.hpp"

namespace aggdiff {

void PicardConfig::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("Picard horizon must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("Picard tolerance must be positive");
  if (time_nodes < 3) throw std::invalid_argument("need at least 3 time nodes");
  if (quadrature_nodes < 8) throw std::invalid_argument("need at least 8 quadrature nodes");
}

std::vector<double> Trajectory::lobatto_times(double horizon, int count) {
  if (count < 2) throw std::invalid_argument("need at least 2 time nodes");
  std::vector<double> t(count);
  for (int j = 0; j < count; ++j)
    t[j] = 0.5 * horizon * (1.0 - std::cos(std::numbers::pi * j / (count - 1)));
  t.front() = 0.0;
  t.back() = horizon;
  return t;
}

namespace {

void heat_propagate(const Grid& g, std::vector<Complex>& s, double t) {
  const auto xi2 = g.wavenumber_squared();
  for (std::size_t f = 0; f < s.size(); ++f) s[f] *= std::exp(-xi2[f] * t);
}

// Spectral evaluation of a Trajectory at arbitrary times.
class TrajectoryEval {
 public:
  explicit TrajectoryEval(const Trajectory& tr) : times_(tr.times) {
    if (tr.times.size() != tr.states.size() || tr.times.size() < 2)
      throw std::invalid_argument("trajectory needs matching times and states (>= 2)");
    grid_ = tr.states.front().grid;
    for (const Field& s : tr.states) {
      require_same_grid(*grid_, *s.grid);
      values_.push_back(forward(s).coeffs);
    }
    if (tr.heat_anchor) {
      anchor_ = forward(*tr.heat_anchor).coeffs;
      for (std::size_t j = 0; j < times_.size(); ++j) {
        std::vector<Complex> h = anchor_;
        heat_propagate(*grid_, h, times_[j]);
        for (std::size_t f = 0; f < h.size(); ++f) values_[j][f] -= h[f];
      }
    }
    const int k = static_cast<int>(times_.size());
    weights_.resize(k);
    for (int j = 0; j < k; ++j) weights_[j] = (j % 2 ? -1.0 : 1.0) * (j == 0 || j == k - 1 ? 0.5 : 1.0);
  }

  const GridPtr& grid() const { return grid_; }

  std::vector<Complex> at(double t) const {
    const std::size_t n = grid_->size();
    std::vector<Complex> out(n, Complex{});
    std::size_t exact = times_.size();
    for (std::size_t j = 0; j < times_.size(); ++j)
      if (std::abs(t - times_[j]) <= 1e-15 * (1.0 + std::abs(t))) exact = j;
    if (exact < times_.size()) {
      out = values_[exact];
    } else {
      double denom = 0.0;
      std::vector<double> lam(times_.size());
      for (std::size_t j = 0; j < times_.size(); ++j) {
        lam[j] = weights_[j] / (t - times_[j]);
        denom += lam[j];
      }
      for (std::size_t j = 0; j < times_.size(); ++j) {
        const double c = lam[j] / denom;
        for (std::size_t f = 0; f < n; ++f) out[f] += c * values_[j][f];
      }
    }
    if (!anchor_.empty()) {
      std::vector<Complex> h = anchor_;
      heat_propagate(*grid_, h, t);
      for (std::size_t f = 0; f < n; ++f) out[f] += h[f];
    }
    return out;
  }

 private:
  std::vector<double> times_;
  std::vector<double> weights_;
  GridPtr grid_;
  std::vector<std::vector<Complex>> values_;
  std::vector<Complex> anchor_;
};

std::vector<Complex> bilinear_spectrum(const TrajectoryEval& rho, const TrajectoryEval& psi,
                                       double t, const Interaction& inter, int quadrature_nodes,
                                       bool dealias) {
  if (quadrature_nodes < 8) throw std::invalid_argument("need at least 8 quadrature nodes");
  const Grid& g = *rho.grid();
  std::vector<Complex> acc(g.size(), Complex{});
  if (t <= 0.0 || inter.is_zero()) return acc;
  const int panels = std::max(1, quadrature_nodes / 16);
  const int per = std::max(8, quadrature_nodes / panels);
  const auto [x, w] = gauss_legendre(per);
  const double top = std::sqrt(t);
  const auto xi2 = g.wavenumber_squared();
  std::vector<Complex> flux;
  for (int p = 0; p < panels; ++p) {
    const double a = top * p / panels, b = top * (p + 1) / panels;
    for (int i = 0; i < per; ++i) {
      const double u = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
      const double weight = 0.5 * (b - a) * w[i] * 2.0 * u;
      const double s = t - u * u;
      detail::bilinear_flux(g, rho.at(s), psi.at(s), inter, dealias, flux);
      for (std::size_t f = 0; f < g.size(); ++f)
        acc[f] += weight * std::exp(-xi2[f] * u * u) * flux[f];
    }
  }
  return acc;
}

}  // namespace

Field Trajectory::at(double t) const {
  if (t < 0.0 || t > horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("time outside the trajectory horizon");
  const TrajectoryEval ev(*this);
  Spectrum s(ev.grid());
  s.coeffs = ev.at(t);
  return inverse(s);
}

Field duhamel_bilinear(const Trajectory& rho, const Trajectory& psi, double t,
                       const Interaction& interaction, int quadrature_nodes, bool dealias) {
  if (t < 0.0 || t > rho.horizon() * (1.0 + 1e-12) || t > psi.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("time outside the trajectory horizon");
  const TrajectoryEval er(rho), ep(psi);
  Spectrum s(er.grid());
  s.coeffs = bilinear_spectrum(er, ep, t, interaction, quadrature_nodes, dealias);
  return inverse(s);
}

PicardResult duhamel_picard(const Field& rho0, const SampledPotential& w, const PicardConfig& cfg) {
  cfg.validate();
  require_same_grid(*rho0.grid, *w.potential.grid);
  const Interaction inter(w);
  const Grid& g = *rho0.grid;

  PicardResult res;
  Trajectory& tr = res.trajectory;
  tr.times = Trajectory::lobatto_times(cfg.horizon, cfg.time_nodes);
  tr.heat_anchor = rho0;
  const Spectrum s0 = forward(rho0);
  std::vector<Field> heat;
  for (double t : tr.times) {
    Spectrum h = s0;
    heat_propagate(g, h.coeffs, t);
    heat.push_back(inverse(h));
  }
  tr.states = heat;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    const TrajectoryEval ev(tr);
    std::vector<Field> next;
    double residual = 0.0;
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
      Spectrum b(rho0.grid);
      b.coeffs = bilinear_spectrum(ev, ev, tr.times[j], inter, cfg.quadrature_nodes, cfg.dealias);
      Field state = heat[j] + inverse(b);
      double d2 = 0.0;
      for (std::size_t i = 0; i < state.size(); ++i) {
        const double d = state[i] - tr.states[j][i];
        d2 += d * d;
      }
      residual = std::max(residual, std::sqrt(g.cell_volume() * d2));
      next.push_back(std::move(state));
    }
    tr.states = std::move(next);
    res.residuals.push_back(residual);
    res.iterations = it;
    if (!std::isfinite(residual)) break;
    if (residual < cfg.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace aggdiff
