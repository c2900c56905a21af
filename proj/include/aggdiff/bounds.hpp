#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aggdiff/potentials.hpp"

namespace aggdiff {

/// ln Gamma(x) for x > 0 (Lanczos); relative error below 1e-13 on (0, 50].
double log_gamma(double x);
/// Gamma(x) for x > 0.
double gamma_fn(double x);

/// Phi(z) = sum_n z^n / Gamma(n (1 - delta) + 1), summed until a term falls
/// below tol * |partial sum| (at most 10^4 terms).
/// Throws std::runtime_error carrying the partial value when the cap is hit.
double mittag_leffler_phi(double z, double delta, double tol = 1e-16);

struct GrowthEnvelope {
  /// ||rho0||_p exp(C_env ||grad W||_inf M sqrt(t))
  double exponential = 0.0;
  /// ||rho0||_p Phi(B Gamma(1/2) sqrt(t)) with B = C_env ||grad W||_inf M, delta = 1/2
  double mittag_leffler = 0.0;
};

GrowthEnvelope lp_growth_envelope(double t, double rho0_lp, double mass, double grad_w_linf,
                                  double c_env = 1.0);

struct LinftyBound {
  /// (2C)^{1+N/(2mu)} ||grad W||_q^{N/(2mu)} M^{1+N/(2mu)} + C0_tilde
  double formula = 0.0;
  /// Local bound C0_tilde on [0, t0] taken from the exponential growth envelope.
  double local_bound = 0.0;
  double mu = 0.0;
  /// sup_t ||rho_t||_inf over a supplied simulation trace.
  std::optional<double> measured;
  std::string provenance;
};

/// Requires q > N. `rho0_linf` feeds the local bound on [0, t0].
LinftyBound linfty_bound(const PotentialNorms& norms, double mass, double rho0_linf, double q,
                         double c_policy = 1.0, double c_env = 1.0, double t0 = 1.0,
                         const std::vector<double>* measured_linf = nullptr);

struct BoundConstants {
  /// Uniform L-infinity bound; unavailable unless supplied.
  std::optional<double> c_inf;
  /// Uniform L2 bound; defaults to sqrt(M c_inf) when c_inf is known.
  std::optional<double> c_2;
  /// The unnamed constant of condition iv.
  double c_policy = 1.0;
};

enum class Verdict { Holds, Fails, Unknown };

struct ConditionResult {
  Verdict verdict = Verdict::Unknown;
  /// NaN when unknown.
  double margin = 0.0;
  std::string note;
};

struct ConditionReport {
  int dim = 1;
  double mass = 0.0;
  ConditionResult cond_i, cond_ii, cond_iii, cond_iv;
  std::string c_inf_source;
  std::string c_2_source;
  double c_policy = 1.0;

  bool any_holds() const;
  std::string to_text() const;
  /// One "key=value" per line; see README for the keys.
  std::string to_key_value() const;
};

const char* verdict_name(Verdict v);

ConditionReport check_smallness(const PotentialNorms& norms, double mass,
                                const BoundConstants& constants);

/// Time-indexed theoretical envelopes consumed by the acceptance runs.
struct BoundEnvelope {
  int dim = 1;
  double rho0_lp = 0.0;
  double mass = 0.0;
  double grad_w_linf = 0.0;
  double c_env = 1.0;
  double c_inf = 0.0;
  double k_l2 = 1.0;
  double c_hm = 1.0;

  double lp_growth(double t) const;
  double linfty_uniform() const { return c_inf; }
  /// K (t+1)^{-N/4}
  double l2_decay(double t) const;
  /// K (t+1)^{-N/2}, the exponent as displayed in the theorem statement
  double l2_decay_displayed(double t) const;
  /// C (t+1)^{-(N/4 + m/2)}
  double hm_decay(double t, double m) const;
};

}  // namespace aggdiff
