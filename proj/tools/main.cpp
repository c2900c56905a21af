#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace aggdiff;

int main(int argc, char** argv) {
  CLI::App app{"aggregation-diffusion solver and decay-rate checks"};
  app.set_version_flag("--version", std::string(AGGDIFF_VERSION));
  app.require_subcommand(1);

  std::string config_path, out;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment JSON file")->required()->check(
        CLI::ExistingFile);
    sub->add_option("--out", out, "output prefix (overrides the config)");
  };
  auto* check = app.add_subcommand("check", "evaluate the smallness conditions");
  add_config(check);
  auto* simulate = app.add_subcommand("simulate", "run the solver in physical variables");
  add_config(simulate);
  auto* rescaled = app.add_subcommand("rescaled", "run the solver in self-similar variables");
  add_config(rescaled);

  cli::FitRequest fit_req;
  std::vector<double> window;
  std::string model = "power";
  double theory = 0.0;
  auto* fit = app.add_subcommand("fit", "fit a decay law to one CSV column");
  fit->add_option("csv", fit_req.csv, "run CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--quantity", fit_req.quantity, "column to fit");
  fit->add_option("--window", window, "fit window t0 t1")->expected(2)->delimiter(',');
  fit->add_option("--model", model, "power, exp or power-log")
      ->check(CLI::IsMember({"power", "exp", "power-log"}));
  auto* theory_opt = fit->add_option("--theory", theory, "expected slope");
  fit->add_option("--tolerance", fit_req.tolerance, "allowed |slope - theory|");
  fit->add_option("--out", fit_req.out, "report file");

  auto* validate = app.add_subcommand("validate", "run the oracle gate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help and version exit 0; every other parse failure is a usage error
    return app.exit(e) == 0 ? cli::kExitOk : cli::kExitError;
  }

  try {
    if (fit->parsed()) {
      fit_req.model = parse_fit_model(model);
      if (!window.empty()) fit_req.window = std::make_pair(window[0], window[1]);
      if (theory_opt->count()) fit_req.theory = theory;
      return cli::cmd_fit(fit_req, std::cout);
    }
    if (validate->parsed()) return cli::cmd_validate(std::cout);

    ExperimentConfig cfg = load_config(config_path);
    if (!out.empty()) cfg.output = out;
    if (check->parsed()) return cli::cmd_check(cfg, std::cout);
    if (simulate->parsed()) return cli::cmd_simulate(cfg, std::cout);
    if (rescaled->parsed()) return cli::cmd_rescaled(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitError;
  }
  return cli::kExitError;
}
