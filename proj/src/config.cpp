#include "aggdiff/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "aggdiff/io.hpp"
#include "json.hpp"

namespace aggdiff {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw std::invalid_argument("unknown key '" + k + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(where + "." + key + " has the wrong type");
  }
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw std::invalid_argument(where + "." + key + " is required");
  return get_or<T>(j, key, T{}, where);
}

PotentialSpec parse_potential(const json& j, const std::string& base_dir) {
  only_keys(j, "potential", {"kind", "amplitude", "width", "exponent", "path"});
  const auto kind = require<std::string>(j, "kind", "potential");
  if (kind == "zero") return PotentialSpec::zero();
  if (kind == "gaussian")
    return PotentialSpec::gaussian(require<double>(j, "amplitude", "potential"),
                                   get_or<double>(j, "width", 1.0, "potential"));
  if (kind == "morse")
    return PotentialSpec::morse(get_or<double>(j, "amplitude", 1.0, "potential"),
                                get_or<double>(j, "exponent", 2.0, "potential"));
  if (kind == "tabulated") {
    std::filesystem::path p = require<std::string>(j, "path", "potential");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    PotentialSpec w = PotentialSpec::load_tabulated(p.string());
    if (j.contains("amplitude")) w = w.scaled(require<double>(j, "amplitude", "potential"));
    return w;
  }
  throw std::invalid_argument("potential.kind '" + kind +
                              "' is not one of zero, gaussian, morse, tabulated");
}

InitialDataSpec parse_initial(const json& j, int dim) {
  const std::string w = "initial";
  only_keys(j, w,
            {"kind", "mass", "center", "sigma", "center2", "sigma2", "weight", "radius", "edge"});
  InitialDataSpec s;
  const auto kind = get_or<std::string>(j, "kind", "gaussian", w);
  if (kind == "gaussian")
    s.kind = InitialKind::Gaussian;
  else if (kind == "two_gaussians")
    s.kind = InitialKind::TwoGaussians;
  else if (kind == "smoothed_indicator")
    s.kind = InitialKind::SmoothedIndicator;
  else
    throw std::invalid_argument("initial.kind '" + kind +
                                "' is not one of gaussian, two_gaussians, smoothed_indicator");
  s.mass = get_or(j, "mass", s.mass, w);
  s.center = get_or(j, "center", std::vector<double>(dim, 0.0), w);
  s.center2 = get_or(j, "center2", std::vector<double>(dim, 0.0), w);
  if (static_cast<int>(s.center.size()) != dim || static_cast<int>(s.center2.size()) != dim)
    throw std::invalid_argument("initial centres need " + std::to_string(dim) + " coordinates");
  s.sigma = get_or(j, "sigma", s.sigma, w);
  s.sigma2 = get_or(j, "sigma2", s.sigma2, w);
  s.weight = get_or(j, "weight", s.weight, w);
  s.radius = get_or(j, "radius", s.radius, w);
  s.edge = get_or(j, "edge", s.edge, w);
  if (!(s.sigma > 0.0 && s.sigma2 > 0.0)) throw std::invalid_argument("initial sigma must be > 0");
  return s;
}

SolverConfig parse_solver(const json& j) {
  const std::string w = "solver";
  only_keys(j, w,
            {"dt", "t_end", "scheme", "dealias", "diagnostics_every", "negative_clip_policy",
             "negative_threshold"});
  SolverConfig c;
  c.dt = require<double>(j, "dt", w);
  c.t_end = require<double>(j, "t_end", w);
  c.scheme = parse_scheme(get_or<std::string>(j, "scheme", "etdrk4", w));
  c.dealias = get_or(j, "dealias", c.dealias, w);
  c.diagnostics_every = get_or(j, "diagnostics_every", c.diagnostics_every, w);
  c.clip_policy =
      parse_clip_policy(get_or<std::string>(j, "negative_clip_policy", "clip_and_count", w));
  c.negative_threshold = get_or(j, "negative_threshold", c.negative_threshold, w);
  c.validate();
  return c;
}

PicardConfig parse_picard(const json& j) {
  const std::string w = "picard";
  only_keys(j, w, {"horizon", "max_iter", "tol", "time_nodes", "quadrature_nodes", "dealias"});
  PicardConfig c;
  c.horizon = require<double>(j, "horizon", w);
  c.max_iter = get_or(j, "max_iter", c.max_iter, w);
  c.tol = get_or(j, "tol", c.tol, w);
  c.time_nodes = get_or(j, "time_nodes", c.time_nodes, w);
  c.quadrature_nodes = get_or(j, "quadrature_nodes", c.quadrature_nodes, w);
  c.dealias = get_or(j, "dealias", c.dealias, w);
  c.validate();
  return c;
}

std::optional<double> optional_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return require<double>(j, key, where);
}

}  // namespace

GridPtr ExperimentConfig::make_grid() const { return aggdiff::make_grid(dimension, n, half_width); }

BoundConstants ExperimentConfig::bound_constants() const {
  BoundConstants b;
  b.c_inf = constants.c_inf;
  b.c_2 = constants.c_2;
  b.c_policy = constants.c_policy;
  return b;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::metadata() const {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : "unset"; };
  return {{"version", AGGDIFF_VERSION},
          {"dimension", std::to_string(dimension)},
          {"grid_n", std::to_string(n)},
          {"half_width", format_double(half_width)},
          {"potential", potential.describe()},
          {"initial_mass", format_double(initial.mass)},
          {"c_env", format_double(constants.c_env)},
          {"c_m", format_double(constants.c_m)},
          {"c_policy", format_double(constants.c_policy)},
          {"c_inf", opt(constants.c_inf)},
          {"c_2", opt(constants.c_2)}};
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, "config",
            {"dimension", "grid", "potential", "initial", "solver", "picard", "diagnostics",
             "constants", "output"});
  ExperimentConfig c;
  c.dimension = require<int>(j, "dimension", "config");
  if (c.dimension < 1 || c.dimension > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");

  if (!j.contains("grid")) throw std::invalid_argument("grid is required");
  const json& grid = j.at("grid");
  only_keys(grid, "grid", {"n", "half_width"});
  c.n = require<int>(grid, "n", "grid");
  c.half_width = require<double>(grid, "half_width", "grid");
  c.make_grid();

  c.potential = j.contains("potential") ? parse_potential(j.at("potential"), base_dir)
                                        : PotentialSpec::zero();
  c.initial = parse_initial(j.contains("initial") ? j.at("initial") : json::object(), c.dimension);
  if (!j.contains("solver")) throw std::invalid_argument("solver is required");
  c.solver = parse_solver(j.at("solver"));
  if (j.contains("picard")) c.picard = parse_picard(j.at("picard"));

  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    only_keys(d, "diagnostics", {"split_k", "heat_mass", "fit_windows"});
    c.diagnostics.split_k = get_or(d, "split_k", c.diagnostics.split_k, "diagnostics");
    c.diagnostics.mass = get_or(d, "heat_mass", c.diagnostics.mass, "diagnostics");
    if (d.contains("fit_windows")) {
      const json& fw = d.at("fit_windows");
      if (!fw.is_object()) throw std::invalid_argument("diagnostics.fit_windows must be an object");
      for (const auto& [k, v] : fw.items()) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
          throw std::invalid_argument("fit window '" + k + "' must be [t0, t1]");
        c.fit_windows[k] = {v[0].get<double>(), v[1].get<double>()};
      }
    }
  }

  if (j.contains("constants")) {
    const json& k = j.at("constants");
    const std::string w = "constants";
    only_keys(k, w, {"c_env", "c_m", "c_policy", "c_inf", "c_2"});
    c.constants.c_env = get_or(k, "c_env", 1.0, w);
    c.constants.c_m = get_or(k, "c_m", 1.0, w);
    c.constants.c_policy = get_or(k, "c_policy", 1.0, w);
    c.constants.c_inf = optional_number(k, "c_inf", w);
    c.constants.c_2 = optional_number(k, "c_2", w);
  }
  c.output = get_or<std::string>(j, "output", c.output, "config");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace aggdiff
