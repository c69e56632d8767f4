#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rabs/report.hpp"

namespace rabs {
namespace cli {

inline std::vector<double> parse_delta_list(const std::string& text) {
  std::vector<double> deltas;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      deltas.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse delta value '" + item + "'");
    }
  }
  if (deltas.empty()) throw ConfigError("empty delta list");
  return deltas;
}

inline void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  int workers = 0;
};

inline void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out", args.out_path, "output path (default: stdout)");
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--workers", args.workers, "worker threads (default: RABS_WORKERS or cores)");
}

inline int run(int argc, const char* const* argv) {
  CLI::App app{"Robust RABS deployment and OFDM subcarrier allocation for ISAC"};
  app.require_subcommand(1);

  CommonArgs solve_args, sweep_args, gap_args, alloc_args;
  std::optional<int> fixed_location, alloc_location;
  std::string sweep_deltas, gap_deltas;
  int num_seeds = 1;
  bool timing = false;
  long exact_budget = 20000;

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one instance and dump the solution JSON");
  attach_common(solve_cmd, solve_args);
  solve_cmd->add_option("--location", fixed_location, "fixed-cell mode: force this candidate location");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "robustness sweep with the fixed-cell baseline (CSV)");
  attach_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--deltas", sweep_deltas, "comma-separated robustness values (default: 13-point grid)");
  sweep_cmd->add_option("--seeds", num_seeds, "number of consecutive seeds starting at the base seed");
  sweep_cmd->add_flag("--timing", timing, "record wall time per row (breaks byte-determinism)");

  CLI::App* gap_cmd = app.add_subcommand("gap", "rounding heuristic vs branch-and-bound (CSV)");
  attach_common(gap_cmd, gap_args);
  gap_cmd->add_option("--deltas", gap_deltas, "comma-separated robustness values (default: 13-point grid)");
  gap_cmd->add_option("--exact-budget", exact_budget, "branch-and-bound node budget per subproblem");

  CLI::App* alloc_cmd = app.add_subcommand("alloc", "per-grid allocation counts vs demand (CSV)");
  attach_common(alloc_cmd, alloc_args);
  alloc_cmd->add_option("--location", alloc_location, "fixed-cell mode: force this candidate location");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve_cmd->parsed()) {
      const ExperimentConfig cfg = load_config(solve_args.config_path);
      const Scenario scenario = build_scenario(cfg, solve_args.seed);
      const LinkCoefficients coeffs = build_coefficients(scenario);
      Assignment assignment;
      SweepResult sweep;
      bool have_sweep = false;
      if (fixed_location) {
        if (*fixed_location < 0 || *fixed_location >= scenario.num_locations())
          throw ConfigError("--location out of range");
        assignment = solve_fixed_location(*fixed_location, scenario, coeffs);
      } else {
        sweep = sweep_locations(scenario, coeffs, {}, solve_args.workers);
        assignment = sweep.assignment;
        have_sweep = true;
      }
      const Evaluation ev = evaluate_assignment(assignment, scenario, coeffs);
      const auto json = solution_to_json(assignment, ev, have_sweep ? &sweep : nullptr);
      write_output(solve_args.out_path, json.dump(2) + "\n");
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const ExperimentConfig cfg = load_config(sweep_args.config_path);
      const std::vector<double> deltas =
          sweep_deltas.empty() ? default_delta_grid() : parse_delta_list(sweep_deltas);
      if (num_seeds < 1) throw ConfigError("--seeds must be at least 1");
      std::vector<std::uint64_t> seeds;
      const std::uint64_t base = sweep_args.seed.value_or(cfg.seed);
      for (int s = 0; s < num_seeds; ++s) seeds.push_back(base + s);
      const SweepReport report = run_sweep(cfg, deltas, seeds, timing, {}, sweep_args.workers);
      std::ostringstream csv;
      write_sweep_csv(report, csv);
      write_output(sweep_args.out_path, csv.str());
      std::ostream& info = sweep_args.out_path.empty() ? std::cerr : std::cout;
      info << "mean_relative_improvement=" << format_csv_value(report.mean_relative_improvement)
           << "\n";
      return 0;
    }
    if (gap_cmd->parsed()) {
      const ExperimentConfig cfg = load_config(gap_args.config_path);
      const std::vector<double> deltas =
          gap_deltas.empty() ? default_delta_grid() : parse_delta_list(gap_deltas);
      MilpOptions milp;
      milp.node_limit = exact_budget;
      ExperimentConfig cfg_run = cfg;
      if (gap_args.seed) cfg_run.seed = *gap_args.seed;
      const std::vector<GapRow> rows = run_gap_study(cfg_run, deltas, milp, {}, gap_args.workers);
      std::ostringstream csv;
      write_gap_csv(rows, csv);
      write_output(gap_args.out_path, csv.str());
      return 0;
    }
    if (alloc_cmd->parsed()) {
      const ExperimentConfig cfg = load_config(alloc_args.config_path);
      const Scenario scenario = build_scenario(cfg, alloc_args.seed);
      const LinkCoefficients coeffs = build_coefficients(scenario);
      Assignment assignment;
      if (alloc_location) {
        if (*alloc_location < 0 || *alloc_location >= scenario.num_locations())
          throw ConfigError("--location out of range");
        assignment = solve_fixed_location(*alloc_location, scenario, coeffs);
      } else {
        assignment = sweep_locations(scenario, coeffs, {}, alloc_args.workers).assignment;
      }
      const std::vector<AllocRow> rows = allocation_report(scenario, assignment);
      std::ostringstream csv;
      write_alloc_csv(rows, csv);
      write_output(alloc_args.out_path, csv.str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace cli
}  // namespace rabs
