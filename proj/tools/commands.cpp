#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "aggdiff/io.hpp"
#include "aggdiff/oracles.hpp"
#include "aggdiff/potentials.hpp"
#include "aggdiff/selfsim.hpp"
#include "aggdiff/solver.hpp"
#include "aggdiff/spectral.hpp"

namespace aggdiff::cli {

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

CsvWriter open_run_csv(const ExperimentConfig& cfg, const std::string& path,
                       std::vector<std::string> columns, const std::string& frame) {
  CsvWriter csv(path, std::move(columns));
  csv.meta("frame", frame);
  for (const auto& [k, v] : cfg.metadata()) csv.meta(k, v);
  csv.meta("scheme", scheme_name(cfg.solver.scheme));
  csv.meta("dt", format_double(cfg.solver.dt));
  csv.meta("t_end", format_double(cfg.solver.t_end));
  csv.meta("dealias", cfg.solver.dealias ? "true" : "false");
  csv.meta("clip_policy", clip_policy_name(cfg.solver.clip_policy));
  csv.meta("threads", "1");
  return csv;
}

double rel_linf(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace

ConditionReport evaluate_conditions(const ExperimentConfig& cfg) {
  const PotentialNorms norms = potential_norms(cfg.potential, cfg.dimension);
  return check_smallness(norms, cfg.initial.mass, cfg.bound_constants());
}

int cmd_check(const ExperimentConfig& cfg, std::ostream& log) {
  const ConditionReport rep = evaluate_conditions(cfg);
  std::string kv = rep.to_key_value();
  for (const auto& [k, v] : cfg.metadata()) kv += "meta." + k + "=" + v + "\n";
  write_text(cfg.output + "_conditions.txt", rep.to_text());
  write_text(cfg.output + "_conditions.kv", kv);
  log << rep.to_text();
  return rep.any_holds() ? kExitOk : kExitVerdict;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  const GridPtr grid = cfg.make_grid();
  const SampledPotential w = sample_on_grid(cfg.potential, grid);
  const Field rho0 = make_initial(cfg.initial, grid);
  CsvWriter csv = open_run_csv(cfg, cfg.output + ".csv", base_columns(), "physical");
  const SimulationResult res =
      simulate(rho0, w, cfg.solver, cfg.diagnostics,
               [&](double, const Field&, const std::vector<double>& row) { csv.row(row); });
  csv.meta("steps", std::to_string(res.steps));
  csv.meta("clipped_values", std::to_string(res.clips.clipped_values));
  for (const auto& msg : res.warnings) {
    csv.meta("warning", msg);
    log << "warning: " << msg << "\n";
  }
  write_checkpoint(res.final_state, cfg.solver.t_end, cfg.output + ".ckpt");
  log << "wrote " << cfg.output << ".csv (" << res.series.rows() << " rows) and " << cfg.output
      << ".ckpt\n";
  return kExitOk;
}

int cmd_rescaled(const ExperimentConfig& cfg, std::ostream& log) {
  const GridPtr grid = cfg.make_grid();
  const Field f0 = make_initial(cfg.initial, grid);
  std::vector<std::string> cols = base_columns();
  for (const auto& c : entropy_columns()) cols.push_back(c);
  CsvWriter csv = open_run_csv(cfg, cfg.output + ".csv", cols, "rescaled");
  csv.meta("entropy_floor", "f<=1e-300 -> 0; f<=1e-16*max -> f*log(1e-16*max)");
  const RescaledRunResult res =
      simulate_rescaled(f0, cfg.potential, cfg.solver, cfg.diagnostics,
                        [&](double, const Field&, const std::vector<double>& row) { csv.row(row); });
  csv.meta("steps", std::to_string(res.steps));
  csv.meta("clipped_values", std::to_string(res.clips.clipped_values));
  write_checkpoint(res.final_state, cfg.solver.t_end, cfg.output + ".ckpt");
  log << "wrote " << cfg.output << ".csv (" << res.series.rows() << " rows) and " << cfg.output
      << ".ckpt\n";
  return kExitOk;
}

int cmd_fit(const FitRequest& req, std::ostream& log) {
  const TimeSeries ts = read_csv(req.csv);
  require_run_schema(ts);
  if (!ts.has(req.quantity))
    throw std::invalid_argument("column '" + req.quantity + "' not in " + req.csv);
  const std::string time_col =
      req.model == FitModel::Exponential && ts.has("s") ? "s" : "t";
  const auto& t = ts.column(time_col);
  if (t.empty()) throw std::invalid_argument(req.csv + " has no rows");
  const double t_end = t.back();
  const auto [t0, t1] = req.window.value_or(std::make_pair(t_end / 10.0, t_end));
  DecayReport rep = fit_decay(t, ts.column(req.quantity), t0, t1, req.model, req.quantity);
  if (req.theory) {
    rep.has_theory = true;
    rep.theory = *req.theory;
    rep.tolerance = req.tolerance;
  }
  const std::string text = rep.to_key_value();
  if (!req.out.empty()) write_text(req.out, text);
  log << text;
  return rep.has_theory && !rep.verdict() ? kExitVerdict : kExitOk;
}

std::vector<GateItem> oracle_gate() {
  std::vector<GateItem> items;
  auto add = [&](std::string name, double value, double tol) {
    items.push_back({std::move(name), value, tol, value <= tol});
  };

  for (int dim : {1, 2}) {
    const GridPtr g = make_grid(dim, 32, 8.0);
    std::vector<double> ma(dim, 0.3), mb(dim, -0.2);
    const Field u = sample_gaussian(make_gaussian(dim, 1.0, 0.5, ma), g);
    const Field v = sample_gaussian(make_gaussian(dim, 2.0, 0.8, mb), g);
    add("convolution_vs_direct_" + std::to_string(dim) + "d",
        rel_linf(convolve(u, v), direct_convolution(u, v)), 1e-10);
  }

  {
    const GridPtr g = make_grid(2, 64, 10.0);
    Field u(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double x = g->coordinate(i, 0), y = g->coordinate(i, 1);
      u[i] = std::exp(-(x * x + 2 * y * y) / 3.0) * (1.0 + 0.3 * std::sin(x + 0.5 * y));
    }
    const Spectrum s = forward(u);
    const double l2 = lp_norm(u, 2.0);
    add("plancherel", std::abs(spectral_l2(s) - l2) / l2, 1e-12);
    add("transform_roundtrip", rel_linf(inverse(s), u), 1e-12);
  }

  {
    const double exact = std::numbers::e * std::erfc(-1.0);
    add("mittag_leffler_phi_1_half", std::abs(mittag_leffler_phi(1.0, 0.5) - exact) / exact, 1e-10);
    add("gamma_half", std::abs(gamma_fn(0.5) - std::sqrt(std::numbers::pi)), 1e-13);
  }

  {
    const GridPtr g = make_grid(1, 256, 40.0);
    const GaussianState g0 = make_gaussian(1, 1.0, 1.0);
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 1.0;
    const auto res = simulate(sample_gaussian(g0, g), sample_on_grid(PotentialSpec::zero(), g), cfg);
    add("heat_flow_vs_exact", rel_linf(res.final_state, sample_gaussian(exact_heat(g0, 1.0), g)),
        1e-8);
  }

  {
    const GridPtr g = make_grid(1, 256, 12.0);
    const GaussianState g0 = make_gaussian(1, 1.0, 1.5, {0.7});
    const RescaledKernel zero(PotentialSpec::zero(), g);
    SolverConfig cfg;
    const double ds = 0.01;
    const Field f1 = step_rescaled(sample_gaussian(g0, g), 0.0, ds, zero, cfg);
    add("fokker_planck_step_vs_exact", rel_linf(f1, sample_gaussian(exact_ou(g0, ds), g)), 1e-6);

    const EntropyRow row = entropy_ledger(sample_gaussian(g0, g), 0.0, zero);
    const GaussianEntropy exact = gaussian_entropy(g0);
    add("gaussian_relative_entropy", std::abs(row.h_rel - exact.h_rel) / exact.h_rel, 1e-8);
    add("gaussian_dissipation", std::abs(row.dissipation - exact.dissipation) / exact.dissipation,
        1e-8);
  }
  return items;
}

int cmd_validate(std::ostream& log) {
  bool ok = true;
  for (const GateItem& it : oracle_gate()) {
    log << (it.pass ? "pass " : "FAIL ") << it.name << " " << format_double(it.value)
        << " (tolerance " << it.tolerance << ")\n";
    ok = ok && it.pass;
  }
  log << (ok ? "oracle gate passed\n" : "oracle gate FAILED\n");
  return ok ? kExitOk : kExitVerdict;
}

}  // namespace aggdiff::cli
