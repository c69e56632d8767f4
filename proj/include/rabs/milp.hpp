#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "rabs/lp.hpp"
#include "rabs/simplex.hpp"

namespace rabs {

struct MilpOptions {
  double gap_tol = 1e-6;   ///< relative bound gap accepted as certified
  double int_tol = 1e-6;   ///< integrality tolerance
  long node_limit = 200000;
  SimplexOptions lp;
};

struct MilpResult {
  LpStatus status = LpStatus::IterationLimit;
  bool certified = false;  ///< optimum proven within gap_tol
  double objective = 0.0;  ///< incumbent objective (model sense)
  double best_bound = 0.0; ///< remaining bound on the optimum (model sense)
  std::vector<double> x;
  long nodes = 0;
};

/// Best-first branch-and-bound over the LP relaxation, branching on the most
/// fractional integer-marked variable (ties: lowest index). One simplex
/// instance is reused across nodes; every node re-applies its bound overrides
/// and warm-starts from the previous basis.
inline MilpResult solve_milp(const LpModel& model, MilpOptions opt = {}) {
  const double mult = model.sense == Sense::Maximize ? 1.0 : -1.0;
  std::vector<int> int_vars;
  for (int j = 0; j < model.num_vars(); ++j)
    if (model.is_integer(j)) int_vars.push_back(j);

  struct Node {
    double bound;  // parent LP bound, internal max space
    long id;
    std::vector<std::pair<int, std::pair<double, double>>> overrides;
  };
  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound < b.bound;  // max-heap on bound
      return a.id > b.id;                                // FIFO among ties
    }
  };

  MilpResult result;
  SimplexSolver solver(model, opt.lp);
  std::priority_queue<Node, std::vector<Node>, NodeOrder> frontier;
  frontier.push(Node{kInfinity, 0, {}});
  long next_id = 1;
  bool have_incumbent = false;
  double incumbent = -kInfinity;  // internal max space
  std::vector<double> incumbent_x;
  const bool maximize_internal = true;
  (void)maximize_internal;

  while (!frontier.empty()) {
    if (result.nodes >= opt.node_limit) break;
    Node node = frontier.top();
    frontier.pop();
    if (have_incumbent && node.bound <= incumbent + opt.gap_tol * std::max(1.0, std::fabs(incumbent)))
      continue;  // cannot improve
    ++result.nodes;

    // Re-apply this node's box: original integer bounds plus overrides.
    for (int j : int_vars) solver.set_variable_bounds(j, model.lower()[j], model.upper()[j]);
    for (const auto& [j, bounds] : node.overrides)
      solver.set_variable_bounds(j, bounds.first, bounds.second);
    LpSolution lp = solver.resolve();

    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded) {
      result.status = LpStatus::Unbounded;
      result.certified = false;
      return result;
    }
    if (lp.status == LpStatus::IterationLimit) {
      frontier.push(std::move(node));  // keep its bound honest, then give up
      break;
    }

    const double value = mult * lp.objective;  // internal max space
    if (have_incumbent && value <= incumbent + opt.gap_tol * std::max(1.0, std::fabs(incumbent)))
      continue;

    // Most fractional integer variable.
    int branch_var = -1;
    double best_dist = opt.int_tol;
    for (int j : int_vars) {
      const double frac = lp.x[j] - std::floor(lp.x[j]);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist > best_dist) {
        best_dist = dist;
        branch_var = j;
      }
    }
    if (branch_var < 0) {
      // Integral: candidate incumbent.
      if (!have_incumbent || value > incumbent) {
        have_incumbent = true;
        incumbent = value;
        incumbent_x = lp.x;
        for (int j : int_vars) incumbent_x[j] = std::round(incumbent_x[j]);
      }
      continue;
    }
    const double floor_val = std::floor(lp.x[branch_var]);
    auto down = node.overrides;
    down.push_back({branch_var, {model.lower()[branch_var], floor_val}});
    auto up = node.overrides;
    up.push_back({branch_var, {floor_val + 1.0, model.upper()[branch_var]}});
    frontier.push(Node{value, next_id++, std::move(down)});
    frontier.push(Node{value, next_id++, std::move(up)});
  }

  double remaining_bound = incumbent;
  if (!frontier.empty()) {
    remaining_bound = std::max(remaining_bound, frontier.top().bound);
  }
  if (!have_incumbent) {
    result.status = frontier.empty() ? LpStatus::Infeasible : LpStatus::IterationLimit;
    result.certified = frontier.empty();
    return result;
  }
  result.status = LpStatus::Optimal;
  result.objective = mult * incumbent;
  result.best_bound = mult * remaining_bound;
  result.x = std::move(incumbent_x);
  result.certified =
      frontier.empty() ||
      remaining_bound - incumbent <= opt.gap_tol * std::max(1.0, std::fabs(incumbent));
  return result;
}

}  // namespace rabs
