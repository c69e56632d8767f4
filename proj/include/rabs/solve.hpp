#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabs/milp.hpp"
#include "rabs/parallel.hpp"
#include "rabs/rounding.hpp"

namespace rabs {

/// A full solution of the deployment problem: the chosen location's sensing
/// and communication assignments (I*K, grid-major) and the achieved
/// satisfaction rates. No location means an empty (all-zero) solution.
struct Assignment {
  int num_grids = 0, num_subcarriers = 0;
  std::optional<int> location;
  std::vector<std::uint8_t> sense, comm;
  double sr_sense = 0.0, sr_comm = 0.0;
  double objective = 0.0;

  static Assignment empty(int grids, int subcarriers) {
    Assignment a;
    a.num_grids = grids;
    a.num_subcarriers = subcarriers;
    a.sense.assign(static_cast<size_t>(grids) * subcarriers, 0);
    a.comm.assign(static_cast<size_t>(grids) * subcarriers, 0);
    return a;
  }
};

struct LocationScore {
  int location = 0;
  double sr_sense = 0.0, sr_comm = 0.0;
  double objective = 0.0;
  int lps_sense = 0, lps_comm = 0;  ///< probe LPs per subproblem
};

struct SweepResult {
  Assignment assignment;
  std::vector<LocationScore> per_location;
  long total_lps = 0;  ///< all LP solves including root relaxations
};

/// Solves both task subproblems at every candidate location with the
/// rounding heuristic and keeps the best weighted score; ties go to the
/// lowest location index. Locations run in parallel when workers allow.
inline SweepResult sweep_locations(const Scenario& scenario, const LinkCoefficients& coeffs,
                                   SimplexOptions opt = {}, int workers = 0) {
  const int J = scenario.num_locations();
  if (J < 1) throw std::invalid_argument("sweep_locations requires at least one location");
  const double mu = scenario.radio.mu;

  struct Cell {
    SubproblemResult sense, comm;
  };
  std::vector<Cell> cells(J);
  parallel_for(J, workers, [&](int j) {
    cells[j].sense = solve_subproblem_rounding(j, Task::Sensing, scenario, coeffs, opt);
    cells[j].comm = solve_subproblem_rounding(j, Task::Communication, scenario, coeffs, opt);
  });

  SweepResult result;
  result.per_location.reserve(J);
  int best = 0;
  for (int j = 0; j < J; ++j) {
    LocationScore s;
    s.location = j;
    s.sr_sense = cells[j].sense.sr;
    s.sr_comm = cells[j].comm.sr;
    s.objective = mu * s.sr_sense + (1.0 - mu) * s.sr_comm;
    s.lps_sense = cells[j].sense.trace.lps_solved;
    s.lps_comm = cells[j].comm.trace.lps_solved;
    result.total_lps += s.lps_sense + s.lps_comm + 2;  // + root relaxations
    result.per_location.push_back(s);
    if (s.objective > result.per_location[best].objective) best = j;
  }
  Assignment a = Assignment::empty(scenario.num_grids(), scenario.num_subcarriers());
  a.location = best;
  a.sense = cells[best].sense.assignment;
  a.comm = cells[best].comm.assignment;
  a.sr_sense = result.per_location[best].sr_sense;
  a.sr_comm = result.per_location[best].sr_comm;
  a.objective = result.per_location[best].objective;
  result.assignment = std::move(a);
  return result;
}

/// Single fixed-location solve (the fixed-small-cell baseline).
inline Assignment solve_fixed_location(int location, const Scenario& scenario,
                                       const LinkCoefficients& coeffs, SimplexOptions opt = {},
                                       long* lp_count = nullptr) {
  SubproblemResult sense = solve_subproblem_rounding(location, Task::Sensing, scenario, coeffs, opt);
  SubproblemResult comm =
      solve_subproblem_rounding(location, Task::Communication, scenario, coeffs, opt);
  Assignment a = Assignment::empty(scenario.num_grids(), scenario.num_subcarriers());
  a.location = location;
  a.sense = std::move(sense.assignment);
  a.comm = std::move(comm.assignment);
  a.sr_sense = sense.sr;
  a.sr_comm = comm.sr;
  const double mu = scenario.radio.mu;
  a.objective = mu * a.sr_sense + (1.0 - mu) * a.sr_comm;
  if (lp_count) *lp_count = sense.trace.lps_solved + comm.trace.lps_solved + 2;
  return a;
}

/// Exhaustive oracle: every map from subcarriers to {unassigned, grid} for
/// each task independently at each location, evaluated with the greedy
/// protection function. Refuses instances beyond the configured budget of
/// (I+1)^K * J enumerated assignments per task.
inline Assignment exact_enumeration(const Scenario& scenario, const LinkCoefficients& coeffs,
                                    double budget = 1e6) {
  const int I = scenario.num_grids();
  const int J = scenario.num_locations();
  const int K = scenario.num_subcarriers();
  const double combos = std::pow(static_cast<double>(I + 1), K) * J;
  if (combos > budget)
    throw std::runtime_error("exact_enumeration: (I+1)^K * J = " + std::to_string(combos) +
                             " exceeds the budget of " + std::to_string(budget));

  auto best_for = [&](int j, Task task, std::vector<std::uint8_t>& best_assign) {
    std::vector<int> choice(K, -1);  // -1 = unassigned
    std::vector<std::uint8_t> assign(static_cast<size_t>(I) * K, 0);
    double best = -1.0;
    while (true) {
      std::fill(assign.begin(), assign.end(), 0);
      for (int k = 0; k < K; ++k)
        if (choice[k] >= 0) assign[static_cast<size_t>(choice[k]) * K + k] = 1;
      const double sr = robust_sr_for_location(j, task, scenario, coeffs, assign).min_sr;
      if (sr > best) {
        best = sr;
        best_assign = assign;
      }
      int k = 0;
      while (k < K && choice[k] == I - 1) choice[k++] = -1;
      if (k == K) break;
      ++choice[k];
    }
    return best;
  };

  Assignment result = Assignment::empty(I, K);
  const double mu = scenario.radio.mu;
  double best_obj = -1.0;
  for (int j = 0; j < J; ++j) {
    std::vector<std::uint8_t> bs, bc;
    const double ss = best_for(j, Task::Sensing, bs);
    const double sc = best_for(j, Task::Communication, bc);
    const double obj = mu * ss + (1.0 - mu) * sc;
    if (obj > best_obj) {
      best_obj = obj;
      result.location = j;
      result.sense = std::move(bs);
      result.comm = std::move(bc);
      result.sr_sense = ss;
      result.sr_comm = sc;
      result.objective = obj;
    }
  }
  return result;
}

struct BnbResult {
  Assignment assignment;
  bool certified = false;
  double upper_bound = 0.0;  ///< proven bound on the optimum objective
  long nodes = 0;
};

/// Exact solve via branch-and-bound on the per-location subproblems,
/// exploiting that sensing and communication decouple once the location is
/// fixed. Locations whose LP root bound cannot beat the best certified value
/// are pruned outright.
inline BnbResult branch_and_bound(const Scenario& scenario, const LinkCoefficients& coeffs,
                                  double gap_tol = 1e-6, MilpOptions base = {}) {
  const int I = scenario.num_grids();
  const int J = scenario.num_locations();
  const int K = scenario.num_subcarriers();
  const double mu = scenario.radio.mu;
  base.gap_tol = gap_tol;

  // Root LP bounds per (location, task).
  std::vector<LpModel> models_s, models_c;
  std::vector<double> root_bound(J, 0.0);
  models_s.reserve(J);
  models_c.reserve(J);
  for (int j = 0; j < J; ++j) {
    models_s.push_back(assemble_subproblem_lp(j, Task::Sensing, scenario, coeffs));
    models_c.push_back(assemble_subproblem_lp(j, Task::Communication, scenario, coeffs));
    const LpSolution rs = solve_lp(models_s.back(), base.lp);
    const LpSolution rc = solve_lp(models_c.back(), base.lp);
    if (rs.status != LpStatus::Optimal || rc.status != LpStatus::Optimal)
      throw std::runtime_error("branch_and_bound: root relaxation failed");
    root_bound[j] = rs.objective + rc.objective;
  }
  std::vector<int> order(J);
  for (int j = 0; j < J; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return root_bound[a] != root_bound[b] ? root_bound[a] > root_bound[b] : a < b;
  });

  BnbResult result;
  result.assignment = Assignment::empty(I, K);
  result.certified = true;
  double best = -1.0;
  double location_bound = 0.0;  // max proven bound over all locations
  for (int j : order) {
    if (root_bound[j] <= best + gap_tol * std::max(1.0, std::fabs(best))) {
      location_bound = std::max(location_bound, root_bound[j]);
      continue;
    }
    const MilpResult ms = solve_milp(models_s[j], base);
    const MilpResult mc = solve_milp(models_c[j], base);
    result.nodes += ms.nodes + mc.nodes;
    if (ms.status != LpStatus::Optimal || mc.status != LpStatus::Optimal ||
        !ms.certified || !mc.certified) {
      result.certified = false;
      location_bound = std::max(location_bound, root_bound[j]);
      continue;
    }
    location_bound = std::max(location_bound, ms.best_bound + mc.best_bound);
    const double obj = ms.objective + mc.objective;
    if (obj > best || !result.assignment.location) {
      best = obj;
      Assignment a = Assignment::empty(I, K);
      a.location = j;
      SubproblemLayout lay;
      lay.num_grids = I;
      lay.num_subcarriers = K;
      lay.x_begin = 0;
      for (int i = 0; i < I; ++i)
        for (int k = 0; k < K; ++k) {
          a.sense[static_cast<size_t>(i) * K + k] =
              ms.x[lay.x_var(i, k)] > 0.5 ? 1 : 0;
          a.comm[static_cast<size_t>(i) * K + k] = mc.x[lay.x_var(i, k)] > 0.5 ? 1 : 0;
        }
      a.sr_sense = robust_sr_for_location(j, Task::Sensing, scenario, coeffs, a.sense).min_sr;
      a.sr_comm = robust_sr_for_location(j, Task::Communication, scenario, coeffs, a.comm).min_sr;
      a.objective = mu * a.sr_sense + (1.0 - mu) * a.sr_comm;
      result.assignment = std::move(a);
    }
  }
  result.upper_bound = std::max(best, location_bound);
  return result;
}

/// Full re-evaluation of an assignment from scratch: exact SRs via greedy
/// protection and structural constraint checks. Violations are reported as
/// human-readable strings naming the offending subcarrier or location.
struct Evaluation {
  double objective = 0.0;
  double min_sr_sense = 0.0, min_sr_comm = 0.0;
  std::vector<double> sr_sense_per_grid, sr_comm_per_grid;
  std::vector<std::string> violations;
  bool feasible() const { return violations.empty(); }
};

inline Evaluation evaluate_assignment(const Assignment& a, const Scenario& scenario,
                                      const LinkCoefficients& coeffs) {
  const int I = scenario.num_grids();
  const int K = scenario.num_subcarriers();
  Evaluation ev;
  if (a.num_grids != I || a.num_subcarriers != K ||
      a.sense.size() != static_cast<size_t>(I) * K || a.comm.size() != static_cast<size_t>(I) * K) {
    ev.violations.push_back("assignment dimensions do not match the scenario");
    return ev;
  }
  if (a.location && (*a.location < 0 || *a.location >= scenario.num_locations()))
    ev.violations.push_back("chosen location index " + std::to_string(*a.location) +
                            " is out of range");

  auto check_matrix = [&](const std::vector<std::uint8_t>& m, const char* what) {
    for (int k = 0; k < K; ++k) {
      int used = 0;
      for (int i = 0; i < I; ++i) used += m[static_cast<size_t>(i) * K + k] ? 1 : 0;
      if (used > 1)
        ev.violations.push_back(std::string(what) + ": subcarrier " + std::to_string(k) +
                                " assigned to " + std::to_string(used) + " grids");
    }
    if (!a.location) {
      for (size_t e = 0; e < m.size(); ++e)
        if (m[e]) {
          ev.violations.push_back(std::string(what) +
                                  ": assignment present although no location is chosen");
          break;
        }
    }
  };
  check_matrix(a.sense, "sensing");
  check_matrix(a.comm, "communication");
  if (!ev.violations.empty()) return ev;

  if (a.location) {
    const RobustSrResult rs =
        robust_sr_for_location(*a.location, Task::Sensing, scenario, coeffs, a.sense);
    const RobustSrResult rc =
        robust_sr_for_location(*a.location, Task::Communication, scenario, coeffs, a.comm);
    ev.sr_sense_per_grid = rs.sr_per_grid;
    ev.sr_comm_per_grid = rc.sr_per_grid;
    ev.min_sr_sense = rs.min_sr;
    ev.min_sr_comm = rc.min_sr;
  } else {
    ev.sr_sense_per_grid.assign(I, 0.0);
    ev.sr_comm_per_grid.assign(I, 0.0);
  }
  const double mu = scenario.radio.mu;
  ev.objective = mu * ev.min_sr_sense + (1.0 - mu) * ev.min_sr_comm;
  return ev;
}

}  // namespace rabs
