#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabs/robust.hpp"
#include "rabs/simplex.hpp"

namespace rabs {

struct RoundingStep {
  double lp_objective = 0.0;  ///< objective of the probe LP (if feasible)
  int variable = -1;          ///< model index of the variable probed
  bool fixed_to_one = false;  ///< outcome of the probe
  bool feasible = true;
};

struct RoundingTrace {
  double root_objective = 0.0;
  std::vector<RoundingStep> steps;
  int lps_solved = 0;  ///< probe LPs beyond the root relaxation
};

struct LpRoundingResult {
  std::vector<std::uint8_t> values;  ///< one entry per binary variable
  double last_lp_objective = 0.0;
  RoundingTrace trace;
};

inline constexpr double kIntegralityTol = 1e-6;

/// Iterative LP rounding over an arbitrary model. `binary_vars` lists the
/// variables to drive to {0,1}; `groups` assigns each of them to a fairness
/// group (a grid). Each pass fixes every variable already at one, then probes
/// the largest fractional variable at one — preferring groups that have no
/// allocation yet — and on an infeasible probe fixes it to zero and rounds
/// the remaining fractionals down.
inline LpRoundingResult round_binary_lp(SimplexSolver& solver, std::span<const int> binary_vars,
                                        std::span<const int> groups) {
  if (groups.size() != binary_vars.size())
    throw std::invalid_argument("round_binary_lp: group list must match binary variable list");
  const int nb = static_cast<int>(binary_vars.size());
  int num_groups = 0;
  for (int g : groups) num_groups = std::max(num_groups, g + 1);

  LpRoundingResult result;
  LpSolution sol = solver.resolve();
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error(std::string("rounding: root relaxation not optimal: ") +
                             to_string(sol.status));
  result.trace.root_objective = sol.objective;
  result.last_lp_objective = sol.objective;

  std::vector<std::uint8_t> fixed_one(nb, 0);
  std::vector<int> group_alloc(num_groups, 0);

  while (true) {
    // Lock in everything the relaxation already set to one.
    for (int b = 0; b < nb; ++b) {
      if (fixed_one[b]) continue;
      if (sol.x[binary_vars[b]] >= 1.0 - kIntegralityTol) {
        solver.set_variable_bounds(binary_vars[b], 1.0, 1.0);
        fixed_one[b] = 1;
        ++group_alloc[groups[b]];
      }
    }
    // Fractional candidates.
    int pick = -1;
    bool pick_unserved = false;
    for (int b = 0; b < nb; ++b) {
      if (fixed_one[b]) continue;
      const double v = sol.x[binary_vars[b]];
      if (v <= kIntegralityTol || v >= 1.0 - kIntegralityTol) continue;
      const bool unserved = group_alloc[groups[b]] == 0;
      if (pick >= 0) {
        if (pick_unserved && !unserved) continue;
        if (unserved == pick_unserved) {
          const double pv = sol.x[binary_vars[pick]];
          if (v < pv) continue;
          if (v == pv) {
            // Ties: fewer allocated in the group, then canonical order.
            const int ga = group_alloc[groups[b]], gb = group_alloc[groups[pick]];
            if (ga > gb || (ga == gb && b > pick)) continue;
          }
        }
      }
      pick = b;
      pick_unserved = unserved;
    }
    if (pick < 0) break;  // binary, or nothing more can be allocated

    solver.set_variable_bounds(binary_vars[pick], 1.0, 1.0);
    LpSolution probe = solver.resolve();
    ++result.trace.lps_solved;
    RoundingStep step;
    step.variable = binary_vars[pick];
    if (probe.status == LpStatus::Infeasible) {
      // Reject this variable and round the rest down from the last feasible
      // relaxation.
      solver.set_variable_bounds(binary_vars[pick], 0.0, 0.0);
      step.feasible = false;
      step.fixed_to_one = false;
      step.lp_objective = result.last_lp_objective;
      result.trace.steps.push_back(step);
      break;
    }
    if (probe.status != LpStatus::Optimal)
      throw std::runtime_error(std::string("rounding: probe LP failed: ") + to_string(probe.status));
    step.feasible = true;
    step.fixed_to_one = true;
    step.lp_objective = probe.objective;
    result.trace.steps.push_back(step);
    fixed_one[pick] = 1;
    ++group_alloc[groups[pick]];
    sol = std::move(probe);
    result.last_lp_objective = sol.objective;
  }

  result.values.assign(fixed_one.begin(), fixed_one.end());
  return result;
}

struct SubproblemResult {
  std::vector<std::uint8_t> assignment;  ///< I*K, grid-major
  double sr = 0.0;                       ///< exact robust min-SR of the assignment
  RoundingTrace trace;
};

/// Solves the single-location subproblem for one task with iterative LP
/// rounding and evaluates the result exactly (greedy protection), which is
/// what gets reported — not the LP objective.
inline SubproblemResult solve_subproblem_rounding(int location, Task task,
                                                  const Scenario& scenario,
                                                  const LinkCoefficients& coeffs,
                                                  SimplexOptions opt = {}) {
  const int I = scenario.num_grids();
  const int K = scenario.num_subcarriers();
  SubproblemLayout layout;
  const LpModel lp = assemble_subproblem_lp(location, task, scenario, coeffs, &layout);
  SimplexSolver solver(lp, opt);
  std::vector<int> binary_vars;
  std::vector<int> groups;
  binary_vars.reserve(static_cast<size_t>(I) * K);
  groups.reserve(static_cast<size_t>(I) * K);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k) {
      binary_vars.push_back(layout.x_var(i, k));
      groups.push_back(i);
    }
  LpRoundingResult rounded = round_binary_lp(solver, binary_vars, groups);

  SubproblemResult result;
  result.assignment = std::move(rounded.values);
  result.trace = std::move(rounded.trace);
  result.sr = robust_sr_for_location(location, task, scenario, coeffs, result.assignment).min_sr;
  return result;
}

}  // namespace rabs
