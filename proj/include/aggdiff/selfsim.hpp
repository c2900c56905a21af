#pragma once

#include <memory>
#include <vector>

#include "aggdiff/diagnostics.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/potentials.hpp"
#include "aggdiff/solver.hpp"

namespace aggdiff {

/// f(s, y) = e^{Ns} rho((e^{2s} - 1)/2, e^s y).
struct RescaledState {
  Field f;
  double s = 0.0;

  double source_time() const { return 0.5 * std::expm1(2.0 * s); }
};

double rescaled_time(double t);
double source_time(double s);

/// Resamples rho onto `target`; throws when more than 1e-10 of the mass lies
/// outside the scaled target box (use a larger half_width).
RescaledState to_selfsimilar(const Field& rho, double t, const GridPtr& target);
Field from_selfsimilar(const RescaledState& state, const GridPtr& target);

/// W~(s, y) = W(y e^s) and grad_y W~ = e^s grad W(y e^s), sampled analytically.
SampledPotential rescaled_potential(const PotentialSpec& w, double s, const GridPtr& grid);

/// ||W~(s)||_1 by radial quadrature (far field removed).
double rescaled_l1(const PotentialSpec& w, double s, int dim);

/// Fourier multipliers of W~(s) and of its s-derivative y . grad W~(s):
///   W~^(s, xi) = e^{-Ns} W^(e^{-s} |xi|).
/// The rescaled width shrinks like e^{-s}, so the solver and the ledger use
/// these multipliers instead of grid samples.
class RescaledKernel {
 public:
  RescaledKernel(const PotentialSpec& w, const GridPtr& grid);

  bool is_zero() const noexcept { return zero_; }
  const GridPtr& grid() const noexcept { return grid_; }
  /// Plain transform of W~(s) (far field removed) at |xi| = k.
  double potential(double s, double k) const;
  /// Plain transform of y . grad W~(s) at |xi| = k.
  double virial(double s, double k) const;
  Interaction interaction(double s) const;

 private:
  GridPtr grid_;
  bool zero_ = true;
  std::shared_ptr<const RadialTransform> transform_;
};

/// N(f, s) = div(y f) + div(f (grad W~(s) * f)) in spectral form.
void rescaled_nonlinear(const RescaledKernel& kernel, const std::vector<Complex>& f_hat, double s,
                        bool dealias, std::vector<Complex>& out);

/// One step of size ds; throws when boundary mass exceeds 1e-10 of the total.
Field step_rescaled(const Field& f, double s, double ds, const RescaledKernel& kernel,
                    const SolverConfig& cfg);

struct EntropyRow {
  double s = 0.0;
  double h = 0.0;
  double h_rel = 0.0;
  double dissipation = 0.0;
  double cross = 0.0;
  double t2 = 0.0;
  double t31 = 0.0;
  double t32 = 0.0;
  double t4 = 0.0;
  double logsob = 0.0;

  std::vector<double> values() const;
};

/// Floors of the f log f integrand: contributions vanish where f <= 1e-300
/// and are linearized below 1e-16 ||f||_inf.
constexpr double kEntropyZeroFloor = 1e-300;
constexpr double kEntropyRelativeFloor = 1e-16;

/// H, H_rel = int f log(f / (M Maxwellian)), D = int f |y + grad log f|^2,
/// cross = 1/2 int f (W~ * f), T2 = -int f |grad W~ * f|^2,
/// T31 = 2 int f y . (grad W~ * f), T32 = 2 int grad f . (grad W~ * f),
/// T4 = 1/2 int f (d_s W~ * f) from the virial multiplier, logsob = D - 2 H_rel.
EntropyRow entropy_ledger(const Field& f, double s, const RescaledKernel& kernel);

struct RescaledRunResult {
  Field final_state;
  TimeSeries series;
  ClipStats clips;
  std::vector<std::string> warnings;
  long steps = 0;
  double ds = 0.0;
};

/// Integrates the rescaled equation on [0, cfg.t_end] (s units) with step
/// cfg.dt; each row holds the base diagnostics of f (t = (e^{2s}-1)/2,
/// l1heat = ||f - M Maxwellian||_1) followed by the entropy ledger.
RescaledRunResult simulate_rescaled(const Field& f0, const PotentialSpec& w,
                                    const SolverConfig& cfg, const DiagnosticsOptions& diag = {},
                                    const Observer& observer = {});

}  // namespace aggdiff
