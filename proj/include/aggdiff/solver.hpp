#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aggdiff/diagnostics.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/potentials.hpp"

namespace aggdiff {

enum class Scheme { EtdRk2, EtdRk4 };
enum class ClipPolicy { ClipAndCount, ErrorAboveThreshold };

Scheme parse_scheme(const std::string& name);
const char* scheme_name(Scheme s);
ClipPolicy parse_clip_policy(const std::string& name);
const char* clip_policy_name(ClipPolicy p);

struct SolverConfig {
  double dt = 0.01;
  double t_end = 1.0;
  Scheme scheme = Scheme::EtdRk4;
  bool dealias = true;
  int diagnostics_every = 10;
  ClipPolicy clip_policy = ClipPolicy::ClipAndCount;
  /// ErrorAboveThreshold aborts once min(u) < -negative_threshold ||u||_inf.
  double negative_threshold = 1e-8;

  void validate() const;
};

/// Exponential time differencing for u^' = -|xi|^2 u^ + N(u, t) in spectral
/// space; the diffusion is integrated exactly.
class EtdIntegrator {
 public:
  using Nonlinear =
      std::function<void(const std::vector<Complex>& u_hat, double t, std::vector<Complex>& out)>;

  EtdIntegrator(GridPtr grid, Scheme scheme, double dt);

  double dt() const noexcept { return dt_; }
  Scheme scheme() const noexcept { return scheme_; }
  /// Advances u_hat from t to t + dt in place.
  void step(std::vector<Complex>& u_hat, double t, const Nonlinear& nonlinear) const;

 private:
  GridPtr grid_;
  Scheme scheme_;
  double dt_;
  std::vector<double> e_, e_half_, q_half_, f1_, f2_, f3_, phi1_, phi2_;
};

/// phi_k(z) = sum_j z^j / (j + k)!, k = 0..3.
double etd_phi(int k, double z);

/// grad W in spectral form: v^_d = multiplier_d(xi) rho^.
class Interaction {
 public:
  Interaction() = default;
  /// Uses the analytic gradient samples (never a derivative of the W sample).
  explicit Interaction(const SampledPotential& w);

  bool is_zero() const noexcept { return multipliers_.empty(); }
  const std::vector<Complex>& multiplier(int axis) const { return multipliers_.at(axis); }

  /// Radial form v^_d = i xi_d m(|xi|) rho^ with m the plain Fourier transform of W.
  static Interaction from_radial(const GridPtr& grid, const std::function<double(double)>& m);

 private:
  std::vector<std::vector<Complex>> multipliers_;
};

/// Spectrum of div(rho v), v_d = inverse(multiplier_d rho^); the 2/3 rule
/// masks rho, v and the product when `dealias` is set.
void divergence_flux(const Grid& grid, const std::vector<Complex>& rho_hat,
                     const Interaction& interaction, bool dealias, std::vector<Complex>& out);

/// div(rho (grad W * rho)) as a Field.
Field rhs_nonlinear(const Field& rho, const SampledPotential& w, bool dealias = true);

/// One step of size cfg.dt (dt = 0 returns rho).
Field step(const Field& rho, const SampledPotential& w, const SolverConfig& cfg);

struct ClipStats {
  long clipped_values = 0;
  long steps_with_clipping = 0;
  double most_negative = 0.0;
};

/// Applies the negative-value policy to `u` after a step; throws under
/// ErrorAboveThreshold.
void apply_clip_policy(Field& u, const SolverConfig& cfg, ClipStats& stats, double t);

/// Called with every recorded diagnostics row.
using Observer =
    std::function<void(double t, const Field& state, const std::vector<double>& row)>;

struct SimulationResult {
  Field final_state;
  TimeSeries series;
  ClipStats clips;
  std::vector<std::string> warnings;
  long steps = 0;
  double dt = 0.0;
};

/// Integrates to cfg.t_end with a step size of t_end / ceil(t_end / dt),
/// recording a diagnostics row every cfg.diagnostics_every steps and at the end.
SimulationResult simulate(const Field& rho0, const SampledPotential& w, const SolverConfig& cfg,
                          const DiagnosticsOptions& diag = {}, const Observer& observer = {});

/// max_x |grad W * rho|, for the step-size advisory dt max|v| / h <= 1/2.
double max_velocity(const Field& rho, const Interaction& interaction);

enum class InitialKind { Gaussian, TwoGaussians, SmoothedIndicator };

struct InitialDataSpec {
  InitialKind kind = InitialKind::Gaussian;
  double mass = 1.0;
  std::vector<double> center;
  double sigma = 1.0;
  /// TwoGaussians: second bump; mass is split by `weight` (first) and 1 - weight.
  std::vector<double> center2;
  double sigma2 = 1.0;
  double weight = 0.5;
  /// SmoothedIndicator: (1 - tanh((|x - center| - radius) / edge)) / 2, mass-normalized.
  double radius = 1.0;
  double edge = 0.25;
};

Field make_initial(const InitialDataSpec& spec, const GridPtr& grid);

// Duhamel route ------------------------------------------------------------

struct PicardConfig {
  double horizon = 1.0;
  int max_iter = 50;
  /// Stop once sup_t ||rho^{k+1} - rho^k||_2 < tol.
  double tol = 1e-11;
  /// Chebyshev-Lobatto time nodes carrying the trajectory.
  int time_nodes = 25;
  /// Gauss-Legendre nodes of the Duhamel time integral (>= 8).
  int quadrature_nodes = 128;
  bool dealias = true;

  void validate() const;
};

/// States on Chebyshev-Lobatto nodes of [0, T], evaluated anywhere in [0, T]
/// by barycentric interpolation. With `heat_anchor` set only the deviation
/// from e^{t Delta} anchor is interpolated.
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;
  std::optional<Field> heat_anchor;

  static std::vector<double> lobatto_times(double horizon, int count);
  double horizon() const { return times.back(); }
  Field at(double t) const;
};

/// B(rho, psi)(t) = int_0^t e^{(t-s) Delta} div(rho_s (grad W * psi_s)) ds,
/// integrated in u = sqrt(t - s) by composite Gauss-Legendre.
Field duhamel_bilinear(const Trajectory& rho, const Trajectory& psi, double t,
                       const Interaction& interaction, int quadrature_nodes = 128,
                       bool dealias = true);

struct PicardResult {
  Trajectory trajectory;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;
};

/// rho^{k+1} = e^{t Delta} rho0 + B(rho^k, rho^k) on the time nodes.
PicardResult duhamel_picard(const Field& rho0, const SampledPotential& w, const PicardConfig& cfg);

/// 4 C_m sqrt(T) ||grad W||_q ||rho0||_{m,p} with 1/p + 1/q = 1; the caller
/// supplies ||rho0||_{m,p}.
double contraction_margin(const PotentialNorms& norms, double rho0_norm, double horizon, double p,
                          double c_m = 1.0);

/// sum over |gamma| <= m of ||d^gamma u||_p (integer m).
double sobolev_norm(const Field& u, int m, double p);

}  // namespace aggdiff
