#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "aggdiff/bounds.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/potentials.hpp"
#include "aggdiff/solver.hpp"

namespace aggdiff {

struct ConstantPolicies {
  double c_env = 1.0;
  double c_m = 1.0;
  double c_policy = 1.0;
  std::optional<double> c_inf;
  std::optional<double> c_2;
};

/// One experiment, read from a JSON file. Every object rejects unknown keys.
///
///   dimension              1 | 2 | 3
///   grid                   {n, half_width}
///   potential              {kind: zero|gaussian|morse|tabulated, amplitude,
///                           width, exponent, path}
///   initial                {kind: gaussian|two_gaussians|smoothed_indicator,
///                           mass, center, sigma, center2, sigma2, weight,
///                           radius, edge}
///   solver                 {dt, t_end, scheme, dealias, diagnostics_every,
///                           negative_clip_policy, negative_threshold}
///   picard (optional)      {horizon, max_iter, tol, time_nodes,
///                           quadrature_nodes, dealias}
///   diagnostics            {split_k, heat_mass, fit_windows: {column: [t0, t1]}}
///   constants              {c_env, c_m, c_policy, c_inf, c_2}
///   output                 path prefix of every file written
///
/// For the rescaled runner the grid is the y-grid and dt, t_end are in s.
struct ExperimentConfig {
  int dimension = 1;
  int n = 256;
  double half_width = 20.0;
  PotentialSpec potential;
  InitialDataSpec initial;
  SolverConfig solver;
  std::optional<PicardConfig> picard;
  DiagnosticsOptions diagnostics;
  std::map<std::string, std::pair<double, double>> fit_windows;
  ConstantPolicies constants;
  std::string output = "run";

  GridPtr make_grid() const;
  BoundConstants bound_constants() const;
  /// Constant policies and run parameters as metadata pairs.
  std::vector<std::pair<std::string, std::string>> metadata() const;
};

/// Parses and validates; relative tabulated-potential paths resolve against
/// the directory of `path`.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");

}  // namespace aggdiff
