#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "aggdiff/bounds.hpp"
#include "aggdiff/config.hpp"
#include "aggdiff/diagnostics.hpp"

namespace aggdiff::cli {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
/// A verdict came back negative (no condition holds, a gate item failed, a
/// fit missed its theory value).
constexpr int kExitVerdict = 2;

ConditionReport evaluate_conditions(const ExperimentConfig& cfg);

/// Writes <output>_conditions.txt and <output>_conditions.kv.
int cmd_check(const ExperimentConfig& cfg, std::ostream& log);

/// Streams <output>.csv and writes <output>.ckpt with the final state.
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_rescaled(const ExperimentConfig& cfg, std::ostream& log);

struct FitRequest {
  std::string csv;
  std::string quantity = "l2";
  /// Defaults to [t_end / 10, t_end] of the time column.
  std::optional<std::pair<double, double>> window;
  FitModel model = FitModel::Power;
  std::optional<double> theory;
  double tolerance = 0.0;
  /// Report path; empty writes only to the log.
  std::string out;
};

int cmd_fit(const FitRequest& req, std::ostream& log);

struct GateItem {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Closed-form oracle checks of the spectral core, special functions, heat
/// and Fokker-Planck flows and the entropy ledger.
std::vector<GateItem> oracle_gate();
int cmd_validate(std::ostream& log);

}  // namespace aggdiff::cli
