#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rsfbl/experiments.hpp"

namespace {

// Exit codes: 0 on success, 1 for usage/config/runtime errors, 2 when the
// optimizer itself broke down on every requested cell.
constexpr int kExitError = 1;
constexpr int kExitSolverFailure = 2;

int cmd_run(const std::string& config_path, std::uint64_t seed, bool seed_set,
            int draws, const std::string& out, double tol, bool tol_set) {
  rsfbl::ScenarioConfig cfg = rsfbl::load_config_file(config_path);
  if (seed_set) cfg.base_seed = seed;
  if (draws > 0) cfg.num_draws = draws;
  if (!out.empty()) cfg.output_csv = out;
  if (tol_set) cfg.sca_tolerance = tol;
  if (cfg.output_csv.empty()) {
    std::cerr << "error: no output path (set output_csv in the config or pass --out)\n";
    return kExitError;
  }

  const auto records = rsfbl::run_sweep(cfg);
  rsfbl::write_csv_file(cfg.output_csv, records);

  int converged = 0;
  int failures = 0;
  for (const auto& rec : records) {
    if (rec.status == "converged") ++converged;
    if (rec.status == "solver_failure" || rec.status == "numerical_failure") ++failures;
  }
  std::cout << "wrote " << records.size() << " records to " << cfg.output_csv
            << " (" << converged << " converged)\n";
  if (converged == 0 && failures > 0) return kExitSolverFailure;
  return 0;
}

int cmd_aggregate(const std::string& csv_path, const std::string& out) {
  const auto records = rsfbl::read_records_csv_file(csv_path);
  const auto rows = rsfbl::aggregate(records);
  if (out.empty()) {
    rsfbl::write_summary_csv(std::cout, rows);
  } else {
    rsfbl::write_summary_csv_file(out, rows);
    std::cout << "wrote " << rows.size() << " summary rows to " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-blocklength sum-rate optimization for rate-splitting downlinks"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  int draws = 0;
  std::string out;
  double tol = 0.0;
  auto* run = app.add_subcommand("run", "Run the sweep described by a config file");
  run->add_option("config", config_path, "Path to a key=value config file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "Override base_seed");
  run->add_option("--draws", draws, "Override num_draws")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Override output_csv");
  auto* tol_opt =
      run->add_option("--tol", tol, "Override sca_tolerance")->check(CLI::PositiveNumber);

  std::string csv_path;
  std::string summary_out;
  auto* agg = app.add_subcommand("aggregate", "Summarize a records CSV per cell");
  agg->add_option("csv", csv_path, "Records CSV produced by `run`")
      ->required()
      ->check(CLI::ExistingFile);
  agg->add_option("--out", summary_out, "Write the summary here instead of stdout");

  std::string scenario;
  auto* tmpl = app.add_subcommand("show-config-template",
                                  "Print a ready-to-edit config for a scenario");
  tmpl->add_option("scenario", scenario,
                   "One of: underloaded4x2, overloaded2x4, random4x8")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, seed, seed_opt->count() > 0, draws, out, tol,
                     tol_opt->count() > 0);
    }
    if (agg->parsed()) {
      return cmd_aggregate(csv_path, summary_out);
    }
    std::cout << rsfbl::config_template(scenario);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
