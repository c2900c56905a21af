#include "aggdiff/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace aggdiff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::array<double, 14> kLanczos = {
    57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
    -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
    .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma needs x > 0");
  double y = x;
  double tmp = x + 5.24218750000000000;
  tmp = (x + 0.5) * std::log(tmp) - tmp;
  double ser = 0.999999999999997092;
  for (double c : kLanczos) ser += c / ++y;
  return tmp + std::log(2.5066282746310005 * ser / x);
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_fn needs x > 0");
  if (x > 171.0) return std::exp(log_gamma(x));
  // recur into (1, 2] so the exponential only ever sees a value near zero
  double scale = 1.0;
  while (x > 2.0) {
    x -= 1.0;
    scale *= x;
  }
  while (x <= 1.0) {
    scale /= x;
    x += 1.0;
  }
  return scale * std::exp(log_gamma(x));
}

double mittag_leffler_phi(double z, double delta, double tol) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (z == 0.0) return 1.0;
  const double a = 1.0 - delta;
  const double logz = std::log(std::abs(z));
  double sum = 1.0;
  double prev = 1.0;
  for (int n = 1; n < 10000; ++n) {
    const double mag = std::exp(n * logz - log_gamma(n * a + 1.0));
    const double term = (z < 0.0 && n % 2 == 1) ? -mag : mag;
    sum += term;
    if (mag <= prev && mag < tol * std::abs(sum)) return sum;
    prev = mag;
  }
  throw std::runtime_error("Mittag-Leffler series did not converge in 10^4 terms; partial sum " +
                           fmt(sum));
}

GrowthEnvelope lp_growth_envelope(double t, double rho0_lp, double mass, double grad_w_linf,
                                  double c_env) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  const double b = c_env * grad_w_linf * mass;
  GrowthEnvelope e;
  e.exponential = rho0_lp * std::exp(b * std::sqrt(t));
  e.mittag_leffler = rho0_lp * mittag_leffler_phi(b * std::sqrt(std::numbers::pi) * std::sqrt(t), 0.5);
  return e;
}

LinftyBound linfty_bound(const PotentialNorms& norms, double mass, double rho0_linf, double q,
                         double c_policy, double c_env, double t0,
                         const std::vector<double>* measured_linf) {
  const int n = norms.dim;
  if (!(q > n))
    throw std::invalid_argument(
        "linfty_bound needs N < q <= infinity, otherwise the heat-gradient kernel is not "
        "integrable in time");
  LinftyBound out;
  out.mu = 0.5 * (1.0 - (std::isinf(q) ? 0.0 : n / q));
  out.local_bound = lp_growth_envelope(t0, rho0_linf, mass, norms.grad_linf.value, c_env).exponential;
  const NormValue gq = norms.grad_norm(q);
  const double e = n / (2.0 * out.mu);
  if (!gq.finite) {
    out.formula = std::numeric_limits<double>::infinity();
  } else {
    out.formula = std::pow(2.0 * c_policy, 1.0 + e) * std::pow(gq.value, e) *
                      std::pow(mass, 1.0 + e) +
                  out.local_bound;
  }
  std::ostringstream prov;
  prov << "formula with C=" << c_policy << ", C_env=" << c_env << ", t0=" << t0 << ", q=" << q;
  if (measured_linf && !measured_linf->empty()) {
    out.measured = *std::max_element(measured_linf->begin(), measured_linf->end());
    prov << "; measured sup over " << measured_linf->size() << " samples";
  }
  out.provenance = prov.str();
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Fails:
      return "fails";
    case Verdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

ConditionResult judge(double margin, std::string note = {}) {
  ConditionResult r;
  r.margin = margin;
  r.verdict = std::isfinite(margin) ? (margin < 1.0 ? Verdict::Holds : Verdict::Fails)
                                    : Verdict::Fails;
  r.note = std::move(note);
  return r;
}

ConditionResult unknown(std::string note) { return {Verdict::Unknown, kNaN, std::move(note)}; }

}  // namespace

ConditionReport check_smallness(const PotentialNorms& norms, double mass,
                                const BoundConstants& constants) {
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
  ConditionReport rep;
  rep.dim = norms.dim;
  rep.mass = mass;
  rep.c_policy = constants.c_policy;
  const double n = norms.dim;

  rep.cond_i = norms.grad_linf.finite
                   ? judge(norms.grad_linf.value * std::pow(mass, (n + 4.0) / (n + 2.0)))
                   : unknown("||grad W||_inf is infinite");

  std::optional<double> c_inf = constants.c_inf;
  rep.c_inf_source = c_inf ? "supplied" : "unavailable";
  std::optional<double> c_2 = constants.c_2;
  if (c_2) {
    rep.c_2_source = "supplied";
  } else if (c_inf) {
    c_2 = std::sqrt(mass * *c_inf);
    rep.c_2_source = "interpolation sqrt(M C_inf)";
  } else {
    rep.c_2_source = "unavailable";
  }

  if (!norms.w_l1.finite)
    rep.cond_ii = unknown("W is not integrable");
  else if (!c_inf)
    rep.cond_ii = unknown("C_inf not supplied");
  else
    rep.cond_ii = judge(norms.w_l1.value * *c_inf);

  if (!norms.w_l2.finite)
    rep.cond_iii = unknown("W is not square integrable");
  else if (!c_2)
    rep.cond_iii = unknown("C_2 not available");
  else
    rep.cond_iii = judge(norms.w_l2.value * *c_2);

  if (!norms.lap_plus_lhalfN.finite)
    rep.cond_iv = unknown("[Delta W]_+ is not in L^{N/2}");
  else
    rep.cond_iv = judge(4.0 * constants.c_policy * mass * norms.lap_plus_lhalfN.value,
                        "C_policy=" + fmt(constants.c_policy));
  return rep;
}

bool ConditionReport::any_holds() const {
  for (const auto* c : {&cond_i, &cond_ii, &cond_iii, &cond_iv})
    if (c->verdict == Verdict::Holds) return true;
  return false;
}

std::string ConditionReport::to_text() const {
  std::ostringstream os;
  os.precision(10);
  os << "smallness conditions (N=" << dim << ", M=" << mass << ")\n";
  const char* names[] = {"i   ||grad W||_inf M^((N+4)/(N+2))", "ii  ||W||_1 C_inf",
                         "iii ||W||_2 C_2", "iv  4 C M ||[Delta W]_+||_{N/2}"};
  const ConditionResult* cs[] = {&cond_i, &cond_ii, &cond_iii, &cond_iv};
  for (int k = 0; k < 4; ++k) {
    os << "  " << names[k] << ": " << verdict_name(cs[k]->verdict);
    if (cs[k]->verdict != Verdict::Unknown) os << "  margin " << cs[k]->margin;
    if (!cs[k]->note.empty()) os << "  (" << cs[k]->note << ")";
    os << "\n";
  }
  os << "  C_inf: " << c_inf_source << "\n";
  os << "  C_2: " << c_2_source << "\n";
  os << "  C_policy: " << c_policy << "\n";
  os << "verdict: " << (any_holds() ? "some condition holds" : "no condition established") << "\n";
  return os.str();
}

std::string ConditionReport::to_key_value() const {
  std::ostringstream os;
  os.precision(17);
  os << "dim=" << dim << "\nmass=" << mass << "\n";
  const char* keys[] = {"cond_i", "cond_ii", "cond_iii", "cond_iv"};
  const ConditionResult* cs[] = {&cond_i, &cond_ii, &cond_iii, &cond_iv};
  for (int k = 0; k < 4; ++k) {
    os << keys[k] << ".verdict=" << verdict_name(cs[k]->verdict) << "\n";
    os << keys[k] << ".margin=" << cs[k]->margin << "\n";
  }
  os << "c_inf_source=" << c_inf_source << "\nc_2_source=" << c_2_source << "\n";
  os << "c_policy=" << c_policy << "\n";
  os << "any_holds=" << (any_holds() ? 1 : 0) << "\n";
  return os.str();
}

double BoundEnvelope::lp_growth(double t) const {
  return lp_growth_envelope(t, rho0_lp, mass, grad_w_linf, c_env).exponential;
}

double BoundEnvelope::l2_decay(double t) const { return k_l2 * std::pow(t + 1.0, -0.25 * dim); }

double BoundEnvelope::l2_decay_displayed(double t) const {
  return k_l2 * std::pow(t + 1.0, -0.5 * dim);
}

double BoundEnvelope::hm_decay(double t, double m) const {
  return c_hm * std::pow(t + 1.0, -(0.25 * dim + 0.5 * m));
}

}  // namespace aggdiff
