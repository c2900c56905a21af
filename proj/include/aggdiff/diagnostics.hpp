#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aggdiff/grid.hpp"

namespace aggdiff {

/// h^N sum |u|^p to the power 1/p; p = infinity gives the grid maximum of |u|.
double lp_norm(const Field& u, double p);

/// ||D^m u||_2 = ||xi|^m u^||_2.
double hm_seminorm(const Field& u, double m);

struct TaintedValue {
  double value = 0.0;
  /// Boundary mass above the monitor threshold: moments are unreliable.
  bool tainted = false;
};

/// int |x|^2 u
TaintedValue second_moment(const Field& u);
/// (int |x|^2 u^2)^{1/2}
TaintedValue weighted_l2(const Field& u);

/// ||rho - M G(t)||_1 with G sampled analytically; t > 0.
double l1_heat_distance(const Field& rho, double t, double mass);

struct LowFrequency {
  double fraction = 0.0;
  /// The ball |xi| <= sqrt(2k/(t+1)) holds no mode besides xi = 0.
  bool only_dc = false;
};

LowFrequency low_freq_fraction(const Field& u, double t, double k);

/// Tabular diagnostics; columns are stored by name, each of equal length.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const noexcept { return names_; }
  std::size_t rows() const noexcept { return data_.empty() ? 0 : data_.front().size(); }
  bool has(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;

  void add_row(const std::vector<double>& row);
  std::vector<double> row(std::size_t i) const;

  std::vector<std::pair<std::string, std::string>>& metadata() noexcept { return metadata_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const noexcept {
    return metadata_;
  }
  void set_meta(const std::string& key, const std::string& value);

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> data_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

/// Column layout of every run CSV.
const std::vector<std::string>& base_columns();
const std::vector<std::string>& entropy_columns();

struct DiagnosticsOptions {
  /// Fourier-splitting parameter k of low_freq_fraction.
  double split_k = 2.5;
  /// Reference mass of l1_heat_distance; values <= 0 select the current mass.
  double mass = 0.0;
};

/// t,mass,l1,l2,linf,h1,h2,m2,xrho2,l1heat,lowfreq for one state.
/// l1heat is NaN at t = 0. `tainted` reports a boundary-mass monitor breach.
std::vector<double> diagnostics_row(const Field& rho, double t, const DiagnosticsOptions& opt,
                                    bool* tainted = nullptr);

enum class FitModel { Power, Exponential, PowerLog };

FitModel parse_fit_model(const std::string& name);
const char* fit_model_name(FitModel m);

struct DecayReport {
  std::string quantity;
  FitModel model = FitModel::Power;
  double t0 = 0.0, t1 = 0.0;
  int samples = 0;
  /// log-log slope (Power, PowerLog) or log-linear rate (Exponential)
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  /// same fit on the later half of the window
  double half_window_slope = 0.0;
  bool has_theory = false;
  double theory = 0.0;
  double tolerance = 0.0;

  bool verdict() const;
  std::string to_key_value() const;
};

/// Least squares on the samples with t in [t0, t1].
///   Power:       log y = c + slope log t
///   Exponential: log y = c + slope t
///   PowerLog:    log(y / log t) = c + slope log t   (needs t > 1)
/// Throws when fewer than 10 samples fall in the window or any value there is
/// not positive (the message lists the offending rows).
DecayReport fit_decay(const std::vector<double>& t, const std::vector<double>& y, double t0,
                      double t1, FitModel model, const std::string& quantity = "");

DecayReport fit_power_law(const TimeSeries& ts, const std::string& quantity, double t0, double t1,
                          const std::string& time_column = "t");
DecayReport fit_exponential(const TimeSeries& ts, const std::string& quantity, double t0,
                            double t1, const std::string& time_column = "s");

struct ProductCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// ||D^m(f (g*h))||_2 against 2^{m-1}(||D^m f|| ||g|| ||h|| + ||f|| ||D^m g|| ||h||), all L2.
ProductCheck dm_product_check(const Field& f, const Field& g, const Field& h, double m);

struct GnsCheck {
  double lhs = 0.0;
  double rhs_without_constant = 0.0;
  double ratio = 0.0;
};

/// ||D^j u||_p / (||D^m u||_q^theta ||u||_s^{1-theta}). Throws unless
/// 1/p = j/N + theta (1/q - m/N) + (1 - theta)/s to 1e-12.
GnsCheck gns_check(const Field& u, double j, double m, double p, double q, double s,
                   double theta);

struct BetaCheck {
  double integral = 0.0;
  /// t^{-1/2} for alpha > 1, t^{-1/2} log(1 + t) for alpha = 1
  double shape = 0.0;
  double ratio = 0.0;
};

/// int_0^t (t-s)^{-1/2} (1+s)^{-alpha} ds with t >= 1, alpha >= 1.
BetaCheck truncated_beta_check(double t, double alpha);

}  // namespace aggdiff
