#include "aggdiff/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "aggdiff/quadrature.hpp"

namespace aggdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

// Fritsch-Carlson slopes with a zero slope at r = 0 (even extension).
std::vector<double> pchip_slopes(const std::vector<double>& r, const std::vector<double>& k) {
  const std::size_t n = r.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = r[i + 1] - r[i];
    delta[i] = (k[i + 1] - k[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  // three-point end slope, clipped to preserve shape
  const std::size_t m = n - 1;
  double dn = ((2.0 * h[m - 1] + h[m - 2]) * delta[m - 1] - h[m - 1] * delta[m - 2]) /
              (h[m - 1] + h[m - 2]);
  if (dn * delta[m - 1] <= 0.0)
    dn = 0.0;
  else if (delta[m - 1] * delta[m - 2] <= 0.0 && std::abs(dn) > 3.0 * std::abs(delta[m - 1]))
    dn = 3.0 * delta[m - 1];
  d[m] = dn;
  return d;
}

double radial_point(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::gaussian(double amplitude, double width) {
  require_finite(amplitude, "amplitude");
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("Gaussian width must be positive");
  PotentialSpec w;
  w.kind_ = PotentialKind::Gaussian;
  w.amplitude_ = amplitude;
  w.width_ = width;
  return w;
}

PotentialSpec PotentialSpec::morse(double amplitude, double exponent) {
  require_finite(amplitude, "amplitude");
  if (!(exponent >= 1.0) || !std::isfinite(exponent))
    throw std::invalid_argument("Morse exponent must be >= 1");
  PotentialSpec w;
  w.kind_ = PotentialKind::MorseType;
  w.amplitude_ = amplitude;
  w.exponent_ = exponent;
  return w;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> radii, std::vector<double> values) {
  if (radii.size() != values.size()) throw std::invalid_argument("table columns differ in length");
  if (radii.size() < 4) throw std::invalid_argument("table needs at least 4 rows");
  if (radii.front() != 0.0) throw std::invalid_argument("table must start at r = 0");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require_finite(radii[i], "table radius");
    require_finite(values[i], "table value");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw std::invalid_argument("table radii must be strictly increasing");
  }
  PotentialSpec w;
  w.kind_ = PotentialKind::Tabulated;
  w.slopes_ = pchip_slopes(radii, values);
  w.radii_ = std::move(radii);
  w.values_ = std::move(values);
  return w;
}

PotentialSpec PotentialSpec::load_tabulated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open potential table " + path);
  std::string line;
  std::getline(in, line);
  std::vector<double> r, k;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a >> b))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'r value'");
    r.push_back(a);
    k.push_back(b);
  }
  return tabulated(std::move(r), std::move(k));
}

PotentialSpec PotentialSpec::scaled(double lambda) const {
  PotentialSpec w = *this;
  w.amplitude_ *= lambda;
  for (double& v : w.values_) v *= lambda;
  for (double& v : w.slopes_) v *= lambda;
  return w;
}

std::size_t PotentialSpec::segment(double r) const {
  auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  std::size_t i = static_cast<std::size_t>(it - radii_.begin());
  i = i == 0 ? 0 : i - 1;
  return std::min(i, radii_.size() - 2);
}

double PotentialSpec::profile(double r) const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::Gaussian:
      return amplitude_ * std::exp(-r * r / (width_ * width_));
    case PotentialKind::MorseType:
      return amplitude_ * -std::expm1(-std::pow(r, exponent_));
    case PotentialKind::Tabulated: {
      if (r >= radii_.back()) return values_.back();
      const std::size_t i = segment(r);
      const double h = radii_[i + 1] - radii_[i];
      const double t = (r - radii_[i]) / h;
      const double t2 = t * t, t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
             (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
    }
  }
  return 0.0;
}

double PotentialSpec::profile_d1(double r) const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::Gaussian: {
      const double s2 = width_ * width_;
      return -2.0 * amplitude_ * r / s2 * std::exp(-r * r / s2);
    }
    case PotentialKind::MorseType: {
      const double a = exponent_;
      if (a == 1.0) return amplitude_ * std::exp(-r);
      if (r == 0.0) return 0.0;
      const double ra = std::pow(r, a);
      return amplitude_ * a * ra / r * std::exp(-ra);
    }
    case PotentialKind::Tabulated: {
      if (r >= radii_.back()) return 0.0;
      const std::size_t i = segment(r);
      const double h = radii_[i + 1] - radii_[i];
      const double t = (r - radii_[i]) / h;
      const double t2 = t * t;
      return ((6 * t2 - 6 * t) * values_[i] + (-6 * t2 + 6 * t) * values_[i + 1]) / h +
             (3 * t2 - 4 * t + 1) * slopes_[i] + (3 * t2 - 2 * t) * slopes_[i + 1];
    }
  }
  return 0.0;
}

double PotentialSpec::profile_d2(double r) const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::Gaussian: {
      const double s2 = width_ * width_;
      return amplitude_ * (4.0 * r * r / (s2 * s2) - 2.0 / s2) * std::exp(-r * r / s2);
    }
    case PotentialKind::MorseType: {
      const double a = exponent_;
      if (a == 1.0) return -amplitude_ * std::exp(-r);
      if (r == 0.0) {
        if (a < 2.0) return amplitude_ == 0.0 ? 0.0 : std::copysign(kInf, amplitude_);
        return a == 2.0 ? 2.0 * amplitude_ : 0.0;
      }
      const double ra = std::pow(r, a);
      return amplitude_ * a * std::exp(-ra) * ((a - 1.0) * ra / (r * r) - a * ra * ra / (r * r));
    }
    case PotentialKind::Tabulated: {
      if (r >= radii_.back()) return 0.0;
      const std::size_t i = segment(r);
      const double h = radii_[i + 1] - radii_[i];
      const double t = (r - radii_[i]) / h;
      return ((12 * t - 6) * values_[i] + (-12 * t + 6) * values_[i + 1]) / (h * h) +
             ((6 * t - 4) * slopes_[i] + (6 * t - 2) * slopes_[i + 1]) / h;
    }
  }
  return 0.0;
}

double PotentialSpec::far_field() const {
  switch (kind_) {
    case PotentialKind::MorseType:
      return amplitude_;
    case PotentialKind::Tabulated:
      return values_.back();
    default:
      return 0.0;
  }
}

double PotentialSpec::effective_radius() const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::Gaussian:
      return width_ * std::sqrt(80.0);
    case PotentialKind::MorseType:
      return std::pow(80.0, 1.0 / exponent_);
    case PotentialKind::Tabulated:
      return radii_.back();
  }
  return 0.0;
}

bool PotentialSpec::extrapolated(double r) const {
  return kind_ == PotentialKind::Tabulated && r > radii_.back();
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case PotentialKind::Zero:
      os << "zero";
      break;
    case PotentialKind::Gaussian:
      os << "gaussian(A=" << amplitude_ << ",sigma=" << width_ << ")";
      break;
    case PotentialKind::MorseType:
      os << "morse(A=" << amplitude_ << ",alpha=" << exponent_ << ")";
      break;
    case PotentialKind::Tabulated:
      os << "tabulated(rows=" << radii_.size() << ",rmax=" << radii_.back() << ")";
      break;
  }
  return os.str();
}

double eval_potential(const PotentialSpec& w, std::span<const double> x) {
  return w.profile(radial_point(x));
}

std::vector<double> eval_gradient(const PotentialSpec& w, std::span<const double> x) {
  std::vector<double> g(x.size(), 0.0);
  const double r = radial_point(x);
  if (r == 0.0) return g;
  const double c = w.profile_d1(r) / r;
  for (std::size_t d = 0; d < x.size(); ++d) g[d] = c * x[d];
  return g;
}

double radial_laplacian(const PotentialSpec& w, double r, int dim) {
  if (r > 0.0) return w.profile_d2(r) + (dim - 1) * w.profile_d1(r) / r;
  const double d1 = w.profile_d1(0.0);
  if (dim > 1 && d1 != 0.0) return std::copysign(kInf, d1);
  return dim * w.profile_d2(0.0);
}

double eval_laplacian(const PotentialSpec& w, std::span<const double> x) {
  return radial_laplacian(w, radial_point(x), static_cast<int>(x.size()));
}

SampledPotential sample_on_grid(const PotentialSpec& w, const GridPtr& grid) {
  const Grid& g = *grid;
  SampledPotential out{w, Field(grid), {}, w.far_field(), {}};
  for (int d = 0; d < g.dim(); ++d) out.gradient.emplace_back(grid);
  if (w.kind() == PotentialKind::Zero) return out;

  double wmax = 0.0, wedge = 0.0;
  bool extrapolated = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = std::sqrt(g.radius_squared(i));
    const double v = w.profile(r) - out.far_field_shift;
    out.potential[i] = v;
    extrapolated = extrapolated || w.extrapolated(r);
    if (r > 0.0) {
      const double c = w.profile_d1(r) / r;
      for (int d = 0; d < g.dim(); ++d) out.gradient[d][i] = c * g.coordinate(i, d);
    }
    wmax = std::max(wmax, std::abs(v));
    const auto idx = g.unravel(i);
    for (int d = 0; d < g.dim(); ++d)
      if (idx[d] == 0) wedge = std::max(wedge, std::abs(v));
  }
  if (wedge > 1e-8 * wmax) {
    std::ostringstream os;
    os << "potential does not decay inside the box: |W| at the boundary is " << wedge
       << " against max " << wmax;
    out.warnings.push_back(os.str());
  }
  if (extrapolated) out.warnings.push_back("grid extends past the tabulated radius");
  return out;
}

double unit_sphere_area(int dim) {
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * std::numbers::pi;
    case 3:
      return 4.0 * std::numbers::pi;
  }
  throw std::invalid_argument("dimension must be 1, 2 or 3");
}

NormValue PotentialNorms::grad_norm(double q) const {
  if (std::isinf(q)) return grad_linf;
  if (q == 1.0) return grad_l1;
  auto it = grad_lq.find(q);
  if (it == grad_lq.end()) throw std::out_of_range("gradient norm for this q was not computed");
  return it->second;
}

namespace {

// omega * int_0^R |g|^p r^{N-1} dr, split at the given breakpoints.
double radial_power_integral(const std::function<double(double)>& g, double p, int dim,
                             double radius, const std::vector<double>& breaks) {
  auto integrand = [&](double r) {
    const double v = std::abs(g(r));
    if (v == 0.0) return 0.0;
    return std::pow(v, p) * std::pow(r, dim - 1);
  };
  std::vector<double> pts{0.0};
  for (double b : breaks)
    if (b > 0.0 && b < radius) pts.push_back(b);
  pts.push_back(radius);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    const auto res = integrate(integrand, pts[i], pts[i + 1], 1e-12, 1e-300, 20000);
    total += res.value;
  }
  return unit_sphere_area(dim) * total;
}

// Sign changes of f on (0, R], refined by bisection.
std::vector<double> sign_changes(const std::function<double(double)>& f, double radius) {
  std::vector<double> roots;
  const int samples = 4000;
  double a = radius * 1e-9, fa = f(a);
  for (int i = 1; i <= samples; ++i) {
    const double b = radius * i / samples;
    const double fb = f(b);
    if ((fa > 0.0) != (fb > 0.0)) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace

PotentialNorms potential_norms(const PotentialSpec& w, int dim, std::span<const double> q_list) {
  unit_sphere_area(dim);
  PotentialNorms out;
  out.dim = dim;
  for (double q : q_list) {
    if (!(q >= 1.0)) throw std::invalid_argument("norm exponent q must be >= 1");
    out.grad_lq[q] = NormValue{};
  }
  if (w.kind() == PotentialKind::Zero) return out;

  const double radius = w.effective_radius();
  if (w.kind() == PotentialKind::Tabulated) {
    double slope_max = 0.0;
    const auto radii = w.table_radii();
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
      slope_max = std::max(slope_max, std::abs(w.profile_d1(0.5 * (radii[i] + radii[i + 1]))));
    const double r_end = radii.back();
    const double tail_slope = std::abs(w.profile_d1(r_end * (1.0 - 1e-9)));
    if (tail_slope > 1e-6 * slope_max)
      throw std::invalid_argument("tabulated potential does not flatten before its last radius; "
                                  "supply a wider table");
  }

  auto k = [&](double r) { return w.profile(r) - w.far_field(); };
  auto dk = [&](double r) { return w.profile_d1(r); };
  std::vector<double> breaks;
  if (w.kind() == PotentialKind::Tabulated)
    breaks.assign(w.table_radii().begin(), w.table_radii().end());

  const bool decays = w.far_field() == 0.0;
  if (decays) {
    out.w_l1 = {radial_power_integral(k, 1.0, dim, radius, breaks), true};
    out.w_l2 = {std::sqrt(radial_power_integral(k, 2.0, dim, radius, breaks)), true};
  } else {
    out.w_l1 = {kInf, false};
    out.w_l2 = {kInf, false};
  }
  out.grad_l1 = {radial_power_integral(dk, 1.0, dim, radius, breaks), true};
  out.grad_linf = {maximize([&](double r) { return std::abs(dk(r)); }, 0.0, radius).second, true};
  for (auto& [q, nv] : out.grad_lq) {
    if (q == 1.0)
      nv = out.grad_l1;
    else
      nv = {std::pow(radial_power_integral(dk, q, dim, radius, breaks), 1.0 / q), true};
  }
  out.radial_bound = {maximize([&](double r) { return r * std::abs(dk(r)); }, 0.0, radius).second,
                      true};

  auto lap = [&](double r) { return radial_laplacian(w, r, dim); };
  auto lap_plus = [&](double r) { return std::max(lap(r), 0.0); };
  std::vector<double> lap_breaks = sign_changes(lap, radius);
  lap_breaks.insert(lap_breaks.end(), breaks.begin(), breaks.end());
  const double p = 0.5 * dim;
  out.lap_plus_integral = radial_power_integral(lap_plus, p, dim, radius, lap_breaks);
  if (std::isfinite(out.lap_plus_integral))
    out.lap_plus_lhalfN = {std::pow(out.lap_plus_integral, 1.0 / p), true};
  else
    out.lap_plus_lhalfN = {kInf, false};

  if (w.kind() == PotentialKind::MorseType && w.exponent() == 2.0 && w.amplitude() == 1.0) {
    // the integrand (|x|^2 - N)^{N/2} has a real value for every |x| only when N/2 is an integer
    if (dim == 2) {
      const double n = dim;
      auto f = [n](double r) { return (r * r - n) * std::exp(-n * r * r / 2.0) * r; };
      out.morse_display_value =
          unit_sphere_area(dim) * integrate(f, 0.0, n, 1e-12, 1e-300).value;
    } else {
      out.morse_display_value = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

}  // namespace aggdiff
