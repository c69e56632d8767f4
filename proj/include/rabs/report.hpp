#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rabs/config.hpp"
#include "rabs/solve.hpp"

namespace rabs {

/// Floats in CSV output carry 9 significant digits.
inline std::string format_csv_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct SweepRow {
  double delta = 0.0;
  double objective_rabs = 0.0;
  double objective_fixed_baseline = 0.0;
  double gap_vs_exact = std::nan("");  ///< filled by the gap study, not the sweep
  long lp_count = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  ///< ordered by (delta, seed)
  double mean_relative_improvement = 0.0;
};

inline void write_sweep_csv(const SweepReport& report, std::ostream& out) {
  out << "delta,objective_rabs,objective_fixed_baseline,gap_vs_exact,lp_count,wall_time_s,seed\n";
  for (const SweepRow& r : report.rows) {
    out << format_csv_value(r.delta) << ',' << format_csv_value(r.objective_rabs) << ','
        << format_csv_value(r.objective_fixed_baseline) << ',' << format_csv_value(r.gap_vs_exact)
        << ',' << r.lp_count << ',' << format_csv_value(r.wall_time_s) << ',' << r.seed << '\n';
  }
}

/// The default robustness grid: 13 log-spaced points covering 1e-4 .. 1.
inline std::vector<double> default_delta_grid() {
  std::vector<double> deltas;
  deltas.reserve(13);
  for (int t = 0; t < 13; ++t) deltas.push_back(std::pow(10.0, -4.0 + t / 3.0));
  deltas.back() = 1.0;
  return deltas;
}

/// Uniformly random candidate index used as the fixed-small-cell baseline.
inline int baseline_location(std::uint64_t seed, int num_locations) {
  auto rng = detail::seeded_engine(seed, 3);
  return static_cast<int>(detail::uniform01(rng) * num_locations) % num_locations;
}

/// Runs the sweep for every (delta, seed) pair: the full RABS placement sweep
/// and the fixed random baseline on the same scenario. Ascending deltas per
/// seed are polished: each row keeps the best exact evaluation over the
/// assignments found at this and at larger deltas, so the reported objective
/// is always achieved by a concrete feasible assignment.
inline SweepReport run_sweep(const ExperimentConfig& cfg, const std::vector<double>& deltas,
                             const std::vector<std::uint64_t>& seeds, bool timing = false,
                             SimplexOptions opt = {}, int workers = 0) {
  SweepReport report;
  for (double d : deltas)
    if (d < 0.0 || d > 1.0) throw ConfigError("delta values must lie in [0, 1]");

  struct Cell {
    SweepRow row;
    Assignment rabs;
  };
  const int nd = static_cast<int>(deltas.size());
  const int ns = static_cast<int>(seeds.size());
  std::vector<Cell> cells(static_cast<size_t>(nd) * ns);
  parallel_for(nd * ns, workers, [&](int t) {
    const int di = t / ns, si = t % ns;
    const std::uint64_t seed = seeds[si];
    const Scenario scenario = build_scenario(cfg, seed, deltas[di]);
    const LinkCoefficients coeffs = build_coefficients(scenario);
    const auto started = std::chrono::steady_clock::now();
    SweepResult sweep = sweep_locations(scenario, coeffs, opt, 1);
    long baseline_lps = 0;
    const int fixed = baseline_location(seed, scenario.num_locations());
    const Assignment base =
        solve_fixed_location(fixed, scenario, coeffs, opt, &baseline_lps);
    Cell& cell = cells[t];
    cell.row.delta = deltas[di];
    cell.row.seed = seed;
    cell.row.objective_rabs = sweep.assignment.objective;
    cell.row.objective_fixed_baseline = base.objective;
    cell.row.lp_count = sweep.total_lps + baseline_lps;
    if (timing) {
      cell.row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    cell.rabs = std::move(sweep.assignment);
  });

  // Polish: an assignment found at a larger delta stays feasible at a smaller
  // one and can only score better there, so each row may inherit it.
  for (int si = 0; si < ns; ++si) {
    for (int di = 0; di < nd; ++di) {
      Cell& cell = cells[static_cast<size_t>(di) * ns + si];
      for (int dj = di + 1; dj < nd; ++dj) {
        const Cell& later = cells[static_cast<size_t>(dj) * ns + si];
        if (later.row.objective_rabs <= cell.row.objective_rabs || !later.rabs.location) continue;
        const Scenario scenario = build_scenario(cfg, seeds[si], deltas[di]);
        const LinkCoefficients coeffs = build_coefficients(scenario);
        const Evaluation ev = evaluate_assignment(later.rabs, scenario, coeffs);
        if (ev.feasible() && ev.objective > cell.row.objective_rabs) {
          cell.row.objective_rabs = ev.objective;
          cell.rabs = later.rabs;
          cell.rabs.sr_sense = ev.min_sr_sense;
          cell.rabs.sr_comm = ev.min_sr_comm;
          cell.rabs.objective = ev.objective;
        }
      }
    }
  }

  double improvement_sum = 0.0;
  long improvement_count = 0;
  report.rows.reserve(cells.size());
  for (const Cell& cell : cells) {
    report.rows.push_back(cell.row);
    if (cell.row.objective_fixed_baseline > 0.0) {
      improvement_sum += (cell.row.objective_rabs - cell.row.objective_fixed_baseline) /
                         cell.row.objective_fixed_baseline;
      ++improvement_count;
    }
  }
  report.mean_relative_improvement =
      improvement_count > 0 ? improvement_sum / improvement_count : 0.0;
  return report;
}

struct GapRow {
  double delta = 0.0;
  double heuristic_obj = 0.0;
  double exact_obj = 0.0;
  double relative_gap = 0.0;
  long lp_count = 0;
  bool certified = false;
};

inline void write_gap_csv(const std::vector<GapRow>& rows, std::ostream& out) {
  out << "delta,heuristic_obj,exact_obj,relative_gap,lp_count,certified\n";
  for (const GapRow& r : rows) {
    out << format_csv_value(r.delta) << ',' << format_csv_value(r.heuristic_obj) << ','
        << format_csv_value(r.exact_obj) << ',' << format_csv_value(r.relative_gap) << ','
        << r.lp_count << ',' << (r.certified ? 1 : 0) << '\n';
  }
}

/// Rounding heuristic versus branch-and-bound per delta. Rows where the
/// node budget ran out are flagged non-certified; `exact_obj` then carries
/// the best bound found.
inline std::vector<GapRow> run_gap_study(const ExperimentConfig& cfg,
                                         const std::vector<double>& deltas, MilpOptions milp = {},
                                         SimplexOptions opt = {}, int workers = 0) {
  std::vector<GapRow> rows(deltas.size());
  parallel_for(static_cast<int>(deltas.size()), workers, [&](int t) {
    const Scenario scenario = build_scenario(cfg, {}, deltas[t]);
    const LinkCoefficients coeffs = build_coefficients(scenario);
    SweepResult sweep = sweep_locations(scenario, coeffs, opt, 1);
    const BnbResult exact = branch_and_bound(scenario, coeffs, milp.gap_tol, milp);
    GapRow row;
    row.delta = deltas[t];
    row.heuristic_obj = sweep.assignment.objective;
    row.exact_obj = exact.certified ? exact.assignment.objective : exact.upper_bound;
    row.relative_gap =
        row.exact_obj > 0.0 ? (row.exact_obj - row.heuristic_obj) / row.exact_obj : 0.0;
    row.lp_count = sweep.total_lps;
    row.certified = exact.certified;
    rows[t] = row;
  });
  return rows;
}

struct AllocRow {
  int grid = 0;
  double sensing_demand = 0.0;
  double comm_demand = 0.0;
  int num_sense_subcarriers = 0;
  int num_comm_subcarriers = 0;
};

inline void write_alloc_csv(const std::vector<AllocRow>& rows, std::ostream& out) {
  out << "grid,sensing_demand,comm_demand,num_sense_subcarriers,num_comm_subcarriers\n";
  for (const AllocRow& r : rows) {
    out << r.grid << ',' << format_csv_value(r.sensing_demand) << ','
        << format_csv_value(r.comm_demand) << ',' << r.num_sense_subcarriers << ','
        << r.num_comm_subcarriers << '\n';
  }
}

inline std::vector<AllocRow> allocation_report(const Scenario& scenario, const Assignment& a) {
  const int I = scenario.num_grids();
  const int K = scenario.num_subcarriers();
  std::vector<AllocRow> rows(I);
  for (int i = 0; i < I; ++i) {
    AllocRow& r = rows[i];
    r.grid = i;
    r.sensing_demand = scenario.demands.sensing_bits[i];
    r.comm_demand = scenario.demands.comm_bps[i];
    for (int k = 0; k < K; ++k) {
      r.num_sense_subcarriers += a.sense[static_cast<size_t>(i) * K + k] ? 1 : 0;
      r.num_comm_subcarriers += a.comm[static_cast<size_t>(i) * K + k] ? 1 : 0;
    }
  }
  return rows;
}

/// Solution dump: chosen location, assignment lists, per-grid SRs, objective
/// and a trace summary. Key order is fixed for byte-stable output.
inline nlohmann::ordered_json solution_to_json(const Assignment& a, const Evaluation& ev,
                                               const SweepResult* sweep = nullptr) {
  nlohmann::ordered_json j;
  j["objective"] = a.objective;
  j["location"] = a.location ? nlohmann::ordered_json(*a.location) : nlohmann::ordered_json(nullptr);
  j["sr_sense"] = a.sr_sense;
  j["sr_comm"] = a.sr_comm;
  auto matrix_to_pairs = [&](const std::vector<std::uint8_t>& m) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (int i = 0; i < a.num_grids; ++i)
      for (int k = 0; k < a.num_subcarriers; ++k)
        if (m[static_cast<size_t>(i) * a.num_subcarriers + k])
          list.push_back({{"grid", i}, {"subcarrier", k}});
    return list;
  };
  j["sense_assignment"] = matrix_to_pairs(a.sense);
  j["comm_assignment"] = matrix_to_pairs(a.comm);
  j["sr_sense_per_grid"] = ev.sr_sense_per_grid;
  j["sr_comm_per_grid"] = ev.sr_comm_per_grid;
  j["violations"] = ev.violations;
  if (sweep) {
    nlohmann::ordered_json trace;
    trace["total_lps"] = sweep->total_lps;
    nlohmann::ordered_json scores = nlohmann::ordered_json::array();
    for (const LocationScore& s : sweep->per_location)
      scores.push_back({{"location", s.location},
                        {"objective", s.objective},
                        {"sr_sense", s.sr_sense},
                        {"sr_comm", s.sr_comm},
                        {"lps_sense", s.lps_sense},
                        {"lps_comm", s.lps_comm}});
    trace["per_location"] = scores;
    j["trace"] = trace;
  }
  return j;
}

}  // namespace rabs
