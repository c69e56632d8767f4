#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rabs {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { Maximize, Minimize };
enum class Relation { LessEq, GreaterEq, Equal };

/// One linear constraint: sparse coefficient list, relation, right-hand side.
struct LpRow {
  std::vector<std::pair<int, double>> coeffs;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

/// Generic bounded-variable linear program. Variables carry individual
/// lower/upper bounds (possibly infinite); rows are sparse. Integrality
/// marks are carried along for branch-and-bound but ignored by the LP
/// solver itself.
class LpModel {
 public:
  Sense sense = Sense::Maximize;

  int add_variable(std::string name, double lo, double hi, double obj,
                   bool integer = false) {
    if (lo > hi) throw std::invalid_argument("variable '" + name + "': lower bound exceeds upper bound");
    names_.push_back(std::move(name));
    lower_.push_back(lo);
    upper_.push_back(hi);
    objective_.push_back(obj);
    integer_.push_back(integer);
    return static_cast<int>(names_.size()) - 1;
  }

  int add_row(std::vector<std::pair<int, double>> coeffs, Relation rel, double rhs) {
    for (const auto& [j, v] : coeffs) {
      if (j < 0 || j >= num_vars()) throw std::invalid_argument("row references unknown variable index");
      (void)v;
    }
    rows_.push_back(LpRow{std::move(coeffs), rel, rhs});
    return static_cast<int>(rows_.size()) - 1;
  }

  void set_bounds(int j, double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("set_bounds: lower bound exceeds upper bound");
    lower_.at(j) = lo;
    upper_.at(j) = hi;
  }

  int num_vars() const { return static_cast<int>(names_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  const std::vector<LpRow>& rows() const { return rows_; }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int j) const { return names_.at(j); }
  bool is_integer(int j) const { return integer_.at(j); }
  const std::vector<bool>& integer_marks() const { return integer_; }

  /// Plain-text dump (objective, rows, bounds, integrality) for debugging
  /// against external solvers. Deterministic.
  std::string dump() const {
    std::string out;
    out += sense == Sense::Maximize ? "Maximize\n obj:" : "Minimize\n obj:";
    for (int j = 0; j < num_vars(); ++j) {
      if (objective_[j] == 0.0) continue;
      out += " " + format_term(objective_[j], j);
    }
    out += "\nSubject To\n";
    for (int r = 0; r < num_rows(); ++r) {
      out += " r" + std::to_string(r) + ":";
      for (const auto& [j, v] : rows_[r].coeffs) out += " " + format_term(v, j);
      switch (rows_[r].rel) {
        case Relation::LessEq: out += " <= "; break;
        case Relation::GreaterEq: out += " >= "; break;
        case Relation::Equal: out += " = "; break;
      }
      out += format_number(rows_[r].rhs) + "\n";
    }
    out += "Bounds\n";
    for (int j = 0; j < num_vars(); ++j) {
      out += " " + format_number(lower_[j]) + " <= " + names_[j] + " <= " + format_number(upper_[j]) + "\n";
    }
    bool any_int = false;
    for (int j = 0; j < num_vars(); ++j) {
      if (integer_[j]) {
        if (!any_int) { out += "Integers\n"; any_int = true; }
        out += " " + names_[j] + "\n";
      }
    }
    out += "End\n";
    return out;
  }

 private:
  static std::string format_number(double v) {
    if (v == kInfinity) return "+inf";
    if (v == -kInfinity) return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
  }
  std::string format_term(double v, int j) const {
    return (v < 0 ? "- " : "+ ") + format_number(std::fabs(v)) + " " + names_[j];
  }

  std::vector<std::string> names_;
  std::vector<double> lower_, upper_, objective_;
  std::vector<bool> integer_;
  std::vector<LpRow> rows_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;  ///< primal values, one per model variable
  int iterations = 0;
};

}  // namespace rabs
