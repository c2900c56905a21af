#include <cmath>
#include <sstream>
#include <stdexcept>

#include "aggdiff/diagnostics.hpp"

namespace aggdiff {

FitModel parse_fit_model(const std::string& name) {
  if (name == "power") return FitModel::Power;
  if (name == "exp") return FitModel::Exponential;
  if (name == "power-log") return FitModel::PowerLog;
  throw std::invalid_argument("unknown fit model '" + name + "' (power, exp, power-log)");
}

const char* fit_model_name(FitModel m) {
  switch (m) {
    case FitModel::Power:
      return "power";
    case FitModel::Exponential:
      return "exp";
    case FitModel::PowerLog:
      return "power-log";
  }
  return "power";
}

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, stderr_slope = 0.0, rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit window has no spread in time");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  f.stderr_slope = x.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  return f;
}

void transform(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1,
               FitModel model, std::vector<double>& xs, std::vector<double>& ys) {
  std::ostringstream bad;
  int nbad = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= t0 && t[i] <= t1)) continue;
    double v = y[i];
    if (model == FitModel::PowerLog) {
      if (!(t[i] > 1.0)) throw std::invalid_argument("power-log fits need t > 1 in the window");
      v /= std::log(t[i]);
    }
    if (!(v > 0.0) || !std::isfinite(v) || (model != FitModel::Exponential && !(t[i] > 0.0))) {
      if (nbad++ < 20) bad << " row " << i << " (t=" << t[i] << ", y=" << y[i] << ")";
      continue;
    }
    xs.push_back(model == FitModel::Exponential ? t[i] : std::log(t[i]));
    ys.push_back(std::log(v));
  }
  if (nbad > 0)
    throw std::invalid_argument("non-positive values in fit window:" + bad.str() +
                                (nbad > 20 ? " ..." : ""));
}

}  // namespace

DecayReport fit_decay(const std::vector<double>& t, const std::vector<double>& y, double t0,
                      double t1, FitModel model, const std::string& quantity) {
  if (t.size() != y.size()) throw std::invalid_argument("time and value columns differ in length");
  std::vector<double> xs, ys;
  transform(t, y, t0, t1, model, xs, ys);
  if (xs.size() < 10)
    throw std::invalid_argument("fit window [" + std::to_string(t0) + ", " + std::to_string(t1) +
                                "] holds " + std::to_string(xs.size()) +
                                " samples; at least 10 required");
  const LineFit full = least_squares(xs, ys);

  DecayReport r;
  r.quantity = quantity;
  r.model = model;
  r.t0 = t0;
  r.t1 = t1;
  r.samples = static_cast<int>(xs.size());
  r.slope = full.slope;
  r.stderr_slope = full.stderr_slope;
  r.intercept = full.intercept;
  r.residual_rms = full.rms;

  const double mid = 0.5 * (t0 + t1);
  std::vector<double> hx, hy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ti = model == FitModel::Exponential ? xs[i] : std::exp(xs[i]);
    if (ti >= mid) {
      hx.push_back(xs[i]);
      hy.push_back(ys[i]);
    }
  }
  r.half_window_slope = hx.size() >= 3 ? least_squares(hx, hy).slope : std::nan("");
  return r;
}

DecayReport fit_power_law(const TimeSeries& ts, const std::string& quantity, double t0, double t1,
                          const std::string& time_column) {
  return fit_decay(ts.column(time_column), ts.column(quantity), t0, t1, FitModel::Power, quantity);
}

DecayReport fit_exponential(const TimeSeries& ts, const std::string& quantity, double t0,
                            double t1, const std::string& time_column) {
  return fit_decay(ts.column(time_column), ts.column(quantity), t0, t1, FitModel::Exponential,
                   quantity);
}

bool DecayReport::verdict() const {
  return has_theory && std::abs(slope - theory) <= tolerance;
}

std::string DecayReport::to_key_value() const {
  std::ostringstream os;
  os.precision(17);
  os << "quantity=" << quantity << "\n"
     << "model=" << fit_model_name(model) << "\n"
     << "window_start=" << t0 << "\n"
     << "window_end=" << t1 << "\n"
     << "samples=" << samples << "\n"
     << "slope=" << slope << "\n"
     << "stderr=" << stderr_slope << "\n"
     << "intercept=" << intercept << "\n"
     << "residual_rms=" << residual_rms << "\n"
     << "half_window_slope=" << half_window_slope << "\n";
  if (has_theory) {
    os << "theory=" << theory << "\n"
       << "tolerance=" << tolerance << "\n"
       << "verdict=" << (verdict() ? "pass" : "fail") << "\n";
  }
  return os.str();
}

}  // namespace aggdiff
