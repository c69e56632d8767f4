#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabs/link.hpp"
#include "rabs/lp.hpp"
#include "rabs/scenario.hpp"
#include "rabs/simplex.hpp"

namespace rabs {

enum class Task { Sensing, Communication };

inline const char* to_string(Task t) { return t == Task::Sensing ? "sensing" : "communication"; }

/// Worst-case total deviation for one grid: nonnegative weighted biases and
/// the budget of coefficients allowed to reach their worst case.
struct ProtectionInput {
  std::vector<double> weighted_biases;  ///< bias * assignment, canonical (j,k) order
  double level = 0.0;                   ///< protection budget (may be fractional)
};

/// Greedy evaluation of the protection function: the top floor(level) values
/// plus the fractional remainder of the next one. Values tied in magnitude
/// keep their canonical order (stable sort), which pins tie-breaking.
inline double protection_value_greedy(std::span<const double> values, double level) {
  if (values.empty() || level <= 0.0) return 0.0;
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] > values[b]; });
  const double capped = std::min(level, static_cast<double>(values.size()));
  const size_t whole = static_cast<size_t>(std::floor(capped));
  const double frac = capped - static_cast<double>(whole);
  double total = 0.0;
  for (size_t t = 0; t < whole; ++t) total += values[order[t]];
  if (frac > 0.0 && whole < values.size()) total += frac * values[order[whole]];
  return total;
}

inline double protection_value_greedy(const ProtectionInput& input) {
  return protection_value_greedy(input.weighted_biases, input.level);
}

/// Protection value via the dual linear program
///   min sum(beta) + level * alpha   s.t.  alpha + beta_e >= value_e,
/// solved with the simplex engine. Strong duality makes it agree with the
/// greedy form.
inline double protection_value_dual_lp(std::span<const double> values, double level,
                                       SimplexOptions opt = {}) {
  LpModel lp;
  lp.sense = Sense::Minimize;
  const int alpha = lp.add_variable("alpha", 0.0, kInfinity, std::max(level, 0.0));
  std::vector<int> beta(values.size());
  for (size_t e = 0; e < values.size(); ++e)
    beta[e] = lp.add_variable("beta_" + std::to_string(e), 0.0, kInfinity, 1.0);
  for (size_t e = 0; e < values.size(); ++e)
    lp.add_row({{alpha, 1.0}, {beta[e], 1.0}}, Relation::GreaterEq, values[e]);
  const LpSolution sol = solve_lp(lp, opt);
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error(std::string("protection dual LP did not solve to optimality: ") +
                             to_string(sol.status));
  return sol.objective;
}

inline double protection_value_dual_lp(const ProtectionInput& input, SimplexOptions opt = {}) {
  return protection_value_dual_lp(input.weighted_biases, input.level, opt);
}

/// Robust satisfaction rate of one grid for a binary assignment row:
/// (sum of averages - worst-case deviation) / demand, clamped to [0, 1].
/// `avg` and `bias` are the coefficient slices matching `assigned`.
inline double robust_sr(std::span<const double> avg, std::span<const double> bias,
                        std::span<const std::uint8_t> assigned, double demand, double level,
                        double* protection_out = nullptr) {
  if (!(demand > 0.0)) throw std::domain_error("robust_sr requires a positive demand");
  if (avg.size() != bias.size() || avg.size() != assigned.size())
    throw std::invalid_argument("robust_sr: slice sizes disagree");
  double avg_sum = 0.0;
  std::vector<double> weighted;
  weighted.reserve(avg.size());
  for (size_t e = 0; e < avg.size(); ++e) {
    if (!assigned[e]) continue;
    avg_sum += avg[e];
    weighted.push_back(bias[e]);
  }
  const double gamma = protection_value_greedy(weighted, level);
  if (protection_out) *protection_out = gamma;
  return std::clamp((avg_sum - gamma) / demand, 0.0, 1.0);
}

/// Per-grid robust satisfaction rates plus their minimum.
struct RobustSrResult {
  std::vector<double> sr_per_grid;
  std::vector<double> protection_per_grid;
  double min_sr = 0.0;
};

/// Evaluates every grid's robust SR for one task at a fixed location.
/// `assignment` is I*K row-major (grid-major).
inline RobustSrResult robust_sr_for_location(int location, Task task, const Scenario& scenario,
                                             const LinkCoefficients& coeffs,
                                             std::span<const std::uint8_t> assignment) {
  const int I = scenario.num_grids();
  const int K = scenario.num_subcarriers();
  if (assignment.size() != static_cast<size_t>(I) * K)
    throw std::invalid_argument("assignment size must be grids * subcarriers");
  const bool sensing = task == Task::Sensing;
  const std::vector<double>& avg = sensing ? coeffs.mi_avg : coeffs.rate_avg;
  const std::vector<double>& bias = sensing ? coeffs.mi_bias : coeffs.rate_bias;
  const std::vector<double>& demand = sensing ? scenario.demands.sensing_bits : scenario.demands.comm_bps;
  const std::vector<double>& level = sensing ? scenario.protection.sensing : scenario.protection.comm;

  RobustSrResult result;
  result.sr_per_grid.resize(I);
  result.protection_per_grid.resize(I);
  result.min_sr = 1.0;
  std::vector<double> avg_slice(K), bias_slice(K);
  for (int i = 0; i < I; ++i) {
    for (int k = 0; k < K; ++k) {
      avg_slice[k] = avg[coeffs.idx(i, location, k)];
      bias_slice[k] = bias[coeffs.idx(i, location, k)];
    }
    double gamma = 0.0;
    result.sr_per_grid[i] = robust_sr(avg_slice, bias_slice,
                                      assignment.subspan(static_cast<size_t>(i) * K, K),
                                      demand[i], level[i], &gamma);
    result.protection_per_grid[i] = gamma;
    result.min_sr = std::min(result.min_sr, result.sr_per_grid[i]);
  }
  return result;
}

/// Index map of the per-location subproblem LP: x variables first (grid-major),
/// then the min-SR variable, then alpha per grid, then beta (grid-major).
struct SubproblemLayout {
  int num_grids = 0, num_subcarriers = 0;
  int x_begin = 0;
  int sr_var = 0;
  int alpha_begin = 0;
  int beta_begin = 0;
  int x_var(int i, int k) const { return x_begin + i * num_subcarriers + k; }
  int alpha_var(int i) const { return alpha_begin + i; }
  int beta_var(int i, int k) const { return beta_begin + i * num_subcarriers + k; }
  int num_vars() const { return 2 * num_grids * num_subcarriers + num_grids + 1; }
};

/// LP relaxation of the single-location subproblem for one task: maximize the
/// weighted minimum SR subject to the dualized protection rows and the
/// one-grid-per-subcarrier packing rows. Binary x variables are relaxed to
/// [0,1] and carry integrality marks for branch-and-bound.
inline LpModel assemble_subproblem_lp(int location, Task task, const Scenario& scenario,
                                      const LinkCoefficients& coeffs,
                                      SubproblemLayout* layout_out = nullptr) {
  if (location < 0 || location >= scenario.num_locations())
    throw std::out_of_range("location index out of range");
  const int I = scenario.num_grids();
  const int K = scenario.num_subcarriers();
  const bool sensing = task == Task::Sensing;
  const std::vector<double>& avg = sensing ? coeffs.mi_avg : coeffs.rate_avg;
  const std::vector<double>& bias = sensing ? coeffs.mi_bias : coeffs.rate_bias;
  const std::vector<double>& demand = sensing ? scenario.demands.sensing_bits : scenario.demands.comm_bps;
  const std::vector<double>& level = sensing ? scenario.protection.sensing : scenario.protection.comm;
  const double weight = sensing ? scenario.radio.mu : 1.0 - scenario.radio.mu;

  LpModel lp;
  lp.sense = Sense::Maximize;
  SubproblemLayout lay;
  lay.num_grids = I;
  lay.num_subcarriers = K;
  lay.x_begin = 0;
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k)
      lp.add_variable("x_" + std::to_string(i) + "_" + std::to_string(k), 0.0, 1.0, 0.0, true);
  lay.sr_var = lp.add_variable("sr", 0.0, 1.0, weight);
  lay.alpha_begin = lp.num_vars();
  for (int i = 0; i < I; ++i)
    lp.add_variable("alpha_" + std::to_string(i), 0.0, kInfinity, 0.0);
  lay.beta_begin = lp.num_vars();
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k)
      lp.add_variable("beta_" + std::to_string(i) + "_" + std::to_string(k), 0.0, kInfinity, 0.0);

  // Per grid: (sum_k avg x - sum_k beta - level*alpha)/demand >= sr.
  for (int i = 0; i < I; ++i) {
    std::vector<std::pair<int, double>> row;
    row.reserve(2 * K + 2);
    const double inv_demand = 1.0 / demand[i];
    for (int k = 0; k < K; ++k)
      row.push_back({lay.x_var(i, k), avg[coeffs.idx(i, location, k)] * inv_demand});
    for (int k = 0; k < K; ++k) row.push_back({lay.beta_var(i, k), -inv_demand});
    row.push_back({lay.alpha_var(i), -level[i] * inv_demand});
    row.push_back({lay.sr_var, -1.0});
    lp.add_row(std::move(row), Relation::GreaterEq, 0.0);
  }
  // Dual feasibility of the protection subproblem: alpha + beta >= bias * x.
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k)
      lp.add_row({{lay.alpha_var(i), 1.0},
                  {lay.beta_var(i, k), 1.0},
                  {lay.x_var(i, k), -bias[coeffs.idx(i, location, k)]}},
                 Relation::GreaterEq, 0.0);
  // Each subcarrier serves at most one grid.
  for (int k = 0; k < K; ++k) {
    std::vector<std::pair<int, double>> row;
    row.reserve(I);
    for (int i = 0; i < I; ++i) row.push_back({lay.x_var(i, k), 1.0});
    lp.add_row(std::move(row), Relation::LessEq, 1.0);
  }
  if (layout_out) *layout_out = lay;
  return lp;
}

/// Structural accounting of the subproblem LP. Two constraint counts are
/// reported: rows as assembled, and rows plus the finite upper bounds
/// counted as rows (the convention under which the count reads
/// 2IK + I + K + 1).
struct SubproblemAudit {
  int variable_count = 0;
  int structural_row_count = 0;
  int row_count_with_bound_rows = 0;
};

inline SubproblemAudit audit_subproblem(const LpModel& lp) {
  SubproblemAudit a;
  a.variable_count = lp.num_vars();
  a.structural_row_count = lp.num_rows();
  int finite_uppers = 0;
  for (int j = 0; j < lp.num_vars(); ++j)
    if (std::isfinite(lp.upper()[j])) ++finite_uppers;
  a.row_count_with_bound_rows = lp.num_rows() + finite_uppers;
  return a;
}

/// Index map of the full deployment MILP.
struct FullMilpLayout {
  int num_grids = 0, num_locations = 0, num_subcarriers = 0;
  int x_begin = 0, y_begin = 0, z_begin = 0;
  int sr_sense_var = 0, sr_comm_var = 0;
  int alpha_s_begin = 0, beta_s_begin = 0, alpha_c_begin = 0, beta_c_begin = 0;
  int x_var(int i, int j, int k) const {
    return x_begin + (i * num_locations + j) * num_subcarriers + k;
  }
  int y_var(int i, int j, int k) const {
    return y_begin + (i * num_locations + j) * num_subcarriers + k;
  }
  int z_var(int j) const { return z_begin + j; }
};

/// Full robust deployment problem as a MILP: joint location choice plus
/// sensing and communication assignments, with the protection rows dualized
/// the same way as in the per-location subproblem. Integrality marks sit on
/// x, y and z.
inline LpModel assemble_full_milp(const Scenario& scenario, const LinkCoefficients& coeffs,
                                  FullMilpLayout* layout_out = nullptr) {
  const int I = scenario.num_grids();
  const int J = scenario.num_locations();
  const int K = scenario.num_subcarriers();
  const double mu = scenario.radio.mu;
  LpModel lp;
  lp.sense = Sense::Maximize;
  FullMilpLayout lay;
  lay.num_grids = I;
  lay.num_locations = J;
  lay.num_subcarriers = K;

  auto add_block = [&](const char* prefix) {
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
          lp.add_variable(std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(j) +
                              "_" + std::to_string(k),
                          0.0, 1.0, 0.0, true);
  };
  lay.x_begin = lp.num_vars();
  add_block("x");
  lay.y_begin = lp.num_vars();
  add_block("y");
  lay.z_begin = lp.num_vars();
  for (int j = 0; j < J; ++j)
    lp.add_variable("z_" + std::to_string(j), 0.0, 1.0, 0.0, true);
  lay.sr_sense_var = lp.add_variable("sr_sense", 0.0, 1.0, mu);
  lay.sr_comm_var = lp.add_variable("sr_comm", 0.0, 1.0, 1.0 - mu);

  auto add_duals = [&](const char* a_name, const char* b_name, int& alpha_begin, int& beta_begin) {
    alpha_begin = lp.num_vars();
    for (int i = 0; i < I; ++i)
      lp.add_variable(std::string(a_name) + "_" + std::to_string(i), 0.0, kInfinity, 0.0);
    beta_begin = lp.num_vars();
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
          lp.add_variable(std::string(b_name) + "_" + std::to_string(i) + "_" + std::to_string(j) +
                              "_" + std::to_string(k),
                          0.0, kInfinity, 0.0);
  };
  add_duals("alpha_s", "beta_s", lay.alpha_s_begin, lay.beta_s_begin);
  add_duals("alpha_c", "beta_c", lay.alpha_c_begin, lay.beta_c_begin);

  auto beta_s_var = [&](int i, int j, int k) {
    return lay.beta_s_begin + (i * J + j) * K + k;
  };
  auto beta_c_var = [&](int i, int j, int k) {
    return lay.beta_c_begin + (i * J + j) * K + k;
  };

  auto add_task_rows = [&](Task task) {
    const bool sensing = task == Task::Sensing;
    const std::vector<double>& avg = sensing ? coeffs.mi_avg : coeffs.rate_avg;
    const std::vector<double>& bias = sensing ? coeffs.mi_bias : coeffs.rate_bias;
    const std::vector<double>& demand =
        sensing ? scenario.demands.sensing_bits : scenario.demands.comm_bps;
    const std::vector<double>& level = sensing ? scenario.protection.sensing : scenario.protection.comm;
    const int sr_var = sensing ? lay.sr_sense_var : lay.sr_comm_var;
    const int alpha_begin = sensing ? lay.alpha_s_begin : lay.alpha_c_begin;
    for (int i = 0; i < I; ++i) {
      std::vector<std::pair<int, double>> row;
      row.reserve(2 * J * K + 2);
      const double inv_demand = 1.0 / demand[i];
      for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) {
          const int var = sensing ? lay.x_var(i, j, k) : lay.y_var(i, j, k);
          row.push_back({var, avg[coeffs.idx(i, j, k)] * inv_demand});
        }
      for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) {
          const int var = sensing ? beta_s_var(i, j, k) : beta_c_var(i, j, k);
          row.push_back({var, -inv_demand});
        }
      row.push_back({alpha_begin + i, -level[i] * inv_demand});
      row.push_back({sr_var, -1.0});
      lp.add_row(std::move(row), Relation::GreaterEq, 0.0);
    }
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) {
          const int var = sensing ? lay.x_var(i, j, k) : lay.y_var(i, j, k);
          const int bvar = sensing ? beta_s_var(i, j, k) : beta_c_var(i, j, k);
          lp.add_row({{alpha_begin + i, 1.0}, {bvar, 1.0}, {var, -bias[coeffs.idx(i, j, k)]}},
                     Relation::GreaterEq, 0.0);
        }
    // One grid per subcarrier.
    for (int k = 0; k < K; ++k) {
      std::vector<std::pair<int, double>> row;
      row.reserve(I * J);
      for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
          row.push_back({sensing ? lay.x_var(i, j, k) : lay.y_var(i, j, k), 1.0});
      lp.add_row(std::move(row), Relation::LessEq, 1.0);
    }
    // Assignments only at the deployed location.
    for (int j = 0; j < J; ++j) {
      std::vector<std::pair<int, double>> row;
      row.reserve(I * K + 1);
      for (int i = 0; i < I; ++i)
        for (int k = 0; k < K; ++k)
          row.push_back({sensing ? lay.x_var(i, j, k) : lay.y_var(i, j, k), 1.0});
      row.push_back({lay.z_var(j), -static_cast<double>(I) * K});
      lp.add_row(std::move(row), Relation::LessEq, 0.0);
    }
  };
  add_task_rows(Task::Sensing);
  add_task_rows(Task::Communication);

  // At most one RABS deployed.
  {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < J; ++j) row.push_back({lay.z_var(j), 1.0});
    lp.add_row(std::move(row), Relation::LessEq, 1.0);
  }
  if (layout_out) *layout_out = lay;
  return lp;
}

}  // namespace rabs
