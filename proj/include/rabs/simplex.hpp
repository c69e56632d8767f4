#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "rabs/lp.hpp"

namespace rabs {

struct SimplexOptions {
  double feas_tol = 1e-7;   ///< primal feasibility tolerance
  double opt_tol = 1e-7;    ///< reduced-cost optimality tolerance
  double pivot_tol = 1e-9;  ///< smallest pivot magnitude accepted in the ratio test
  int max_iterations = 0;   ///< 0 = scale with problem size
  int stall_limit = 400;    ///< non-improving iterations before switching to Bland's rule
  int refactor_interval = 100;  ///< update etas on top of the factor base before refactorizing
};

/// Bounded-variable primal simplex with Dantzig pricing and a Bland's-rule
/// fallback once the objective stalls. The basis inverse is kept as a product
/// of eta transforms, rebuilt from scratch when the file grows long or a
/// residual check fails. Variable bounds are handled natively; rows become
/// equalities through one slack each.
///
/// The solver owns mutable workspace; one instance per thread. Bounds may be
/// changed between solves (`set_variable_bounds`) and the basis reused via
/// `resolve()`, which is what the rounding loop and branch-and-bound lean on.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LpModel& model, SimplexOptions opt = {})
      : opt_(opt) {
    m_ = model.num_rows();
    n_ = model.num_vars();
    total_ = n_ + m_;
    negate_objective_ = model.sense == Sense::Minimize;

    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j)
      cost_[j] = negate_objective_ ? -model.objective()[j] : model.objective()[j];

    lo_.resize(total_);
    hi_.resize(total_);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = model.lower()[j];
      hi_[j] = model.upper()[j];
    }
    rhs_.resize(m_);
    cols_.assign(total_, {});
    for (int r = 0; r < m_; ++r) {
      const LpRow& row = model.rows()[r];
      rhs_[r] = row.rhs;
      for (const auto& [j, v] : row.coeffs)
        if (v != 0.0) cols_[j].push_back({r, v});
      const int slack = n_ + r;
      cols_[slack].push_back({r, 1.0});
      switch (row.rel) {
        case Relation::LessEq:
          lo_[slack] = 0.0;
          hi_[slack] = kInfinity;
          break;
        case Relation::GreaterEq:
          lo_[slack] = -kInfinity;
          hi_[slack] = 0.0;
          break;
        case Relation::Equal:
          lo_[slack] = 0.0;
          hi_[slack] = 0.0;
          break;
      }
    }

    basic_.assign(m_, -1);
    pos_of_.assign(total_, -1);
    state_.assign(total_, VarState::AtLower);
    xb_.assign(m_, 0.0);
    work_.assign(m_, 0.0);
    y_.assign(m_, 0.0);
  }

  /// Solve from the all-slack basis.
  LpSolution solve() {
    reset_basis();
    return run();
  }

  /// Re-solve from the current basis (after bound changes). Falls back to a
  /// cold start if no valid basis exists yet.
  LpSolution resolve() {
    if (!basis_valid_) return solve();
    return run();
  }

  /// Change one variable's bounds in place; the basis is kept.
  void set_variable_bounds(int var, double lo, double hi) {
    if (var < 0 || var >= n_) std::abort();
    lo_[var] = lo;
    hi_[var] = hi;
    if (state_[var] != VarState::Basic) {
      // Nonbasic variables must sit on a bound (or at zero when free).
      if (std::isfinite(lo) && (state_[var] == VarState::AtLower || !std::isfinite(hi)))
        state_[var] = VarState::AtLower;
      else if (std::isfinite(hi))
        state_[var] = VarState::AtUpper;
      else if (std::isfinite(lo))
        state_[var] = VarState::AtLower;
      else
        state_[var] = VarState::FreeZero;
    }
  }

  double lower_bound_of(int var) const { return lo_[var]; }
  double upper_bound_of(int var) const { return hi_[var]; }

 private:
  enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

  struct Eta {
    int pivot = -1;
    double pivot_value = 1.0;
    std::vector<std::pair<int, double>> entries;  // off-pivot nonzeros
  };

  void reset_basis() {
    etas_.clear();
    base_etas_ = 0;
    std::fill(pos_of_.begin(), pos_of_.end(), -1);
    for (int j = 0; j < n_; ++j) state_[j] = default_nonbasic_state(j);
    for (int r = 0; r < m_; ++r) {
      basic_[r] = n_ + r;
      pos_of_[n_ + r] = r;
      state_[n_ + r] = VarState::Basic;
    }
    basis_valid_ = true;
  }

  VarState default_nonbasic_state(int j) const {
    if (std::isfinite(lo_[j])) return VarState::AtLower;
    if (std::isfinite(hi_[j])) return VarState::AtUpper;
    return VarState::FreeZero;
  }

  double nonbasic_value(int j) const {
    switch (state_[j]) {
      case VarState::AtLower: return lo_[j];
      case VarState::AtUpper: return hi_[j];
      default: return 0.0;
    }
  }

  // ---- eta-file linear algebra ----

  void ftran(std::vector<double>& v) const {
    for (const Eta& e : etas_) {
      const double vp = v[e.pivot];
      if (vp == 0.0) continue;
      v[e.pivot] = e.pivot_value * vp;
      for (const auto& [i, val] : e.entries) v[i] += val * vp;
    }
  }

  void btran(std::vector<double>& y) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = it->pivot_value * y[it->pivot];
      for (const auto& [i, val] : it->entries) acc += val * y[i];
      y[it->pivot] = acc;
    }
  }

  void append_eta(const std::vector<double>& w, int pivot_row) {
    Eta e;
    e.pivot = pivot_row;
    const double wp = w[pivot_row];
    e.pivot_value = 1.0 / wp;
    for (int r = 0; r < m_; ++r) {
      if (r == pivot_row) continue;
      if (w[r] != 0.0) e.entries.push_back({r, -w[r] / wp});
    }
    etas_.push_back(std::move(e));
  }

  void compute_basics() {
    std::copy(rhs_.begin(), rhs_.end(), work_.begin());
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == VarState::Basic) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (const auto& [r, a] : cols_[j]) work_[r] -= a * v;
    }
    ftran(work_);
    xb_ = work_;
  }

  /// Refactorization: a fresh sparse LU of the basic columns, emitted as an
  /// eta file (forward-elimination etas for L, then column-oriented
  /// back-substitution etas for U). The eta file's size is the LU fill, not
  /// the fill of the inverse, which keeps FTRAN/BTRAN cheap; later pivots pile
  /// product-form update etas on top until the next refactorization.
  /// Positions re-attach to pivot rows. Dependent columns are dropped and
  /// their slots repaired with unused slacks; a failed repair resets the
  /// basis. Basic values are recomputed before returning.
  bool refactor() {
    etas_.clear();
    base_etas_ = 0;
    std::vector<int> order = basic_;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const size_t na = cols_[a].size(), nb = cols_[b].size();
      return na != nb ? na < nb : a < b;
    });

    std::vector<int> pivot_row_of;         // per accepted column, in order
    std::vector<int> accepted;             // the accepted columns, in order
    std::vector<std::vector<std::pair<int, double>>> l_cols, u_cols;
    std::vector<double> u_diag;
    std::vector<int> step_of_row(m_, -1);  // row -> elimination step, -1 = unpivoted
    std::vector<double> x(m_, 0.0);
    std::vector<int> dropped;

    for (int c : order) {
      for (const auto& [r, a] : cols_[c]) x[r] = a;
      // Left-looking elimination against the columns accepted so far.
      for (size_t s = 0; s < accepted.size(); ++s) {
        const double xs = x[pivot_row_of[s]];
        if (xs == 0.0) continue;
        for (const auto& [u, l] : l_cols[s]) x[u] -= l * xs;
      }
      int pivot_row = -1;
      double best = 1e-11;
      for (int r = 0; r < m_; ++r)
        if (step_of_row[r] < 0 && std::fabs(x[r]) > best) {
          best = std::fabs(x[r]);
          pivot_row = r;
        }
      if (pivot_row < 0) {
        dropped.push_back(c);
        for (int r = 0; r < m_; ++r) x[r] = 0.0;
        continue;
      }
      const double diag = x[pivot_row];
      std::vector<std::pair<int, double>> ucol, lcol;
      for (int r = 0; r < m_; ++r) {
        if (x[r] == 0.0) continue;
        if (step_of_row[r] >= 0)
          ucol.push_back({r, x[r]});
        else if (r != pivot_row)
          lcol.push_back({r, x[r] / diag});
        x[r] = 0.0;
      }
      step_of_row[pivot_row] = static_cast<int>(accepted.size());
      accepted.push_back(c);
      pivot_row_of.push_back(pivot_row);
      u_diag.push_back(diag);
      u_cols.push_back(std::move(ucol));
      l_cols.push_back(std::move(lcol));
    }

    // Repair dropped columns with slacks of unused rows; such a slack is
    // untouched by the elimination, so its factor contribution is trivial.
    std::vector<char> in_basis(total_, 0);
    for (int c : accepted) in_basis[c] = 1;
    for (int c : dropped) {
      int free_row = -1;
      for (int r = 0; r < m_; ++r)
        if (step_of_row[r] < 0 && !in_basis[n_ + r]) {
          free_row = r;
          break;
        }
      if (free_row < 0) {
        reset_basis();
        compute_basics();
        return false;
      }
      state_[c] = default_nonbasic_state(c);
      state_[n_ + free_row] = VarState::Basic;
      in_basis[n_ + free_row] = 1;
      step_of_row[free_row] = static_cast<int>(accepted.size());
      accepted.push_back(n_ + free_row);
      pivot_row_of.push_back(free_row);
      u_diag.push_back(1.0);
      u_cols.push_back({});
      l_cols.push_back({});
    }

    const int steps = static_cast<int>(accepted.size());
    for (int t = 0; t < steps; ++t) {  // L pass, elimination order
      if (l_cols[t].empty()) continue;
      Eta e;
      e.pivot = pivot_row_of[t];
      e.pivot_value = 1.0;
      e.entries.reserve(l_cols[t].size());
      for (const auto& [r, l] : l_cols[t]) e.entries.push_back({r, -l});
      etas_.push_back(std::move(e));
    }
    for (int t = steps - 1; t >= 0; --t) {  // U pass, reverse order
      if (u_cols[t].empty() && u_diag[t] == 1.0) continue;
      Eta e;
      e.pivot = pivot_row_of[t];
      e.pivot_value = 1.0 / u_diag[t];
      e.entries.reserve(u_cols[t].size());
      for (const auto& [r, u] : u_cols[t]) e.entries.push_back({r, -u / u_diag[t]});
      etas_.push_back(std::move(e));
    }
    base_etas_ = static_cast<int>(etas_.size());

    for (int t = 0; t < steps; ++t) basic_[pivot_row_of[t]] = accepted[t];
    std::fill(pos_of_.begin(), pos_of_.end(), -1);
    for (int r = 0; r < m_; ++r) pos_of_[basic_[r]] = r;
    compute_basics();
    return true;
  }

  // ---- pricing / ratio test ----

  // Phase-1 gradient of (-total infeasibility) w.r.t. basic values.
  void fill_phase1_costs(std::vector<double>& y) const {
    for (int r = 0; r < m_; ++r) {
      const int b = basic_[r];
      if (xb_[r] < lo_[b] - opt_.feas_tol)
        y[r] = 1.0;
      else if (xb_[r] > hi_[b] + opt_.feas_tol)
        y[r] = -1.0;
      else
        y[r] = 0.0;
    }
  }

  double total_infeasibility() const {
    double v = 0.0;
    for (int r = 0; r < m_; ++r) {
      const int b = basic_[r];
      if (xb_[r] < lo_[b]) v += lo_[b] - xb_[r];
      else if (xb_[r] > hi_[b]) v += xb_[r] - hi_[b];
    }
    return v;
  }

  bool basics_feasible() const {
    for (int r = 0; r < m_; ++r) {
      const int b = basic_[r];
      if (xb_[r] < lo_[b] - opt_.feas_tol || xb_[r] > hi_[b] + opt_.feas_tol) return false;
    }
    return true;
  }

  // Chooses the entering variable. Returns -1 if none is eligible.
  int price(bool phase1, bool bland, int& sigma_out, double& d_out) const {
    int best = -1;
    double best_score = opt_.opt_tol;
    int best_sigma = 0;
    double best_d = 0.0;
    for (int j = 0; j < total_; ++j) {
      const VarState s = state_[j];
      if (s == VarState::Basic) continue;
      if (lo_[j] == hi_[j]) continue;  // fixed, cannot move
      double d = phase1 ? 0.0 : cost_[j];
      for (const auto& [r, a] : cols_[j]) d -= y_[r] * a;
      int sigma = 0;
      if (s == VarState::AtLower) {
        if (d > opt_.opt_tol) sigma = 1;
      } else if (s == VarState::AtUpper) {
        if (d < -opt_.opt_tol) sigma = -1;
      } else {  // FreeZero
        if (d > opt_.opt_tol) sigma = 1;
        else if (d < -opt_.opt_tol) sigma = -1;
      }
      if (sigma == 0) continue;
      if (bland) {
        sigma_out = sigma;
        d_out = d;
        return j;
      }
      const double score = std::fabs(d);
      if (score > best_score) {
        best_score = score;
        best = j;
        best_sigma = sigma;
        best_d = d;
      }
    }
    sigma_out = best_sigma;
    d_out = best_d;
    return best;
  }

  struct RatioResult {
    double t = kInfinity;
    int leaving_pos = -1;    // -1: bound flip (or unbounded if t infinite)
    bool leave_at_upper = false;
  };

  RatioResult ratio_test(int entering, int sigma, const std::vector<double>& w,
                         bool phase1, bool bland) const {
    RatioResult res;
    if (state_[entering] != VarState::FreeZero)
      res.t = hi_[entering] - lo_[entering];  // bound-to-bound flip
    double best_pivot = 0.0;
    for (int r = 0; r < m_; ++r) {
      const double wr = w[r];
      if (std::fabs(wr) <= opt_.pivot_tol) continue;
      const int b = basic_[r];
      const double rate = -sigma * wr;  // dx_b/dt
      double target;
      bool at_upper;
      if (phase1 && xb_[r] < lo_[b] - opt_.feas_tol) {
        if (rate <= 0.0) continue;  // moves further below; accounted in pricing
        target = lo_[b];
        at_upper = false;
      } else if (phase1 && xb_[r] > hi_[b] + opt_.feas_tol) {
        if (rate >= 0.0) continue;
        target = hi_[b];
        at_upper = true;
      } else if (rate > 0.0) {
        if (!std::isfinite(hi_[b])) continue;
        target = hi_[b];
        at_upper = true;
      } else {
        if (!std::isfinite(lo_[b])) continue;
        target = lo_[b];
        at_upper = false;
      }
      double t = (target - xb_[r]) / rate;
      if (t < 0.0) t = 0.0;  // drift past a bound within tolerance
      const bool better =
          t < res.t - 1e-12 ||
          (t < res.t + 1e-12 && res.leaving_pos >= 0 &&
           (bland ? basic_[r] < basic_[res.leaving_pos] : std::fabs(wr) > best_pivot));
      if (res.leaving_pos < 0 ? t < res.t : better) {
        res.t = t;
        res.leaving_pos = r;
        res.leave_at_upper = at_upper;
        best_pivot = std::fabs(wr);
      }
    }
    return res;
  }

  // Largest structural-row residual |Ax - rhs| over the equality system.
  double residual_norm() const {
    std::vector<double> act(m_, 0.0);
    for (int j = 0; j < total_; ++j) {
      const double v = (state_[j] == VarState::Basic) ? xb_[pos_of_[j]] : nonbasic_value(j);
      if (v == 0.0) continue;
      for (const auto& [r, a] : cols_[j]) act[r] += a * v;
    }
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) worst = std::max(worst, std::fabs(act[r] - rhs_[r]));
    return worst;
  }

  // ---- main loop ----

  LpSolution run() {
    const int max_iter = opt_.max_iterations > 0
                             ? opt_.max_iterations
                             : std::max(5000, 40 * (m_ + total_));
    compute_basics();
    LpSolution sol;
    int iter = 0;
    int stall = 0;
    bool bland = false;
    int refactor_retries = 0;
    std::vector<double> w(m_);

    bool phase1 = !basics_feasible();
    while (true) {
      if (iter >= max_iter) {
        sol.status = LpStatus::IterationLimit;
        break;
      }
      if (static_cast<int>(etas_.size()) - base_etas_ > opt_.refactor_interval) refactor();

      if (!phase1 && !basics_feasible()) phase1 = true;
      if (phase1 && basics_feasible()) phase1 = false;

      // BTRAN the phase cost vector, then price.
      if (phase1) {
        fill_phase1_costs(y_);
      } else {
        for (int r = 0; r < m_; ++r) y_[r] = cost_[basic_[r]];
      }
      btran(y_);
      int sigma = 0;
      double d = 0.0;
      const int entering = price(phase1, bland, sigma, d);
      if (entering < 0) {
        if (phase1) {
          // No improving direction: verify against a fresh factorization
          // before declaring the model infeasible.
          if (refactor_retries < 2) {
            ++refactor_retries;
            refactor();
            continue;
          }
          sol.status = LpStatus::Infeasible;
        } else {
          if (residual_norm() > 16.0 * opt_.feas_tol && refactor_retries < 2) {
            ++refactor_retries;
            refactor();
            continue;
          }
          sol.status = LpStatus::Optimal;
        }
        break;
      }

      std::fill(w.begin(), w.end(), 0.0);
      for (const auto& [r, a] : cols_[entering]) w[r] = a;
      ftran(w);

      const RatioResult rr = ratio_test(entering, sigma, w, phase1, bland);
      if (!std::isfinite(rr.t)) {
        if (phase1) {
          // Cannot happen for a consistent basis; rebuild once, then give up.
          if (refactor_retries < 2) {
            ++refactor_retries;
            refactor();
            continue;
          }
          sol.status = LpStatus::IterationLimit;
        } else {
          sol.status = LpStatus::Unbounded;
        }
        break;
      }

      ++iter;
      const double improvement = rr.t * std::fabs(d);
      if (improvement > 1e-10) {
        stall = 0;
        bland = false;
      } else if (++stall > opt_.stall_limit) {
        bland = true;
      }

      if (rr.t != 0.0) {
        for (int r = 0; r < m_; ++r)
          if (w[r] != 0.0) xb_[r] -= rr.t * sigma * w[r];
      }
      if (rr.leaving_pos < 0) {
        // Bound flip: the entering variable traverses to its other bound.
        state_[entering] =
            state_[entering] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
        continue;
      }
      const int leaving = basic_[rr.leaving_pos];
      const double enter_value = nonbasic_value(entering) + sigma * rr.t;
      state_[leaving] = rr.leave_at_upper ? VarState::AtUpper : VarState::AtLower;
      pos_of_[leaving] = -1;
      basic_[rr.leaving_pos] = entering;
      pos_of_[entering] = rr.leaving_pos;
      state_[entering] = VarState::Basic;
      append_eta(w, rr.leaving_pos);
      xb_[rr.leaving_pos] = enter_value;
    }

    sol.iterations = iter;
    sol.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      sol.x[j] = state_[j] == VarState::Basic ? xb_[pos_of_[j]] : nonbasic_value(j);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * sol.x[j];
    sol.objective = negate_objective_ ? -obj : obj;
    basis_valid_ = true;
    return sol;
  }

  SimplexOptions opt_;
  int m_ = 0, n_ = 0, total_ = 0;
  bool negate_objective_ = false;
  std::vector<double> cost_, lo_, hi_, rhs_;
  std::vector<std::vector<std::pair<int, double>>> cols_;

  std::vector<int> basic_;
  std::vector<int> pos_of_;
  std::vector<VarState> state_;
  std::vector<double> xb_, work_, y_;
  std::vector<Eta> etas_;
  int base_etas_ = 0;  ///< leading etas_ entries that form the factor base
  bool basis_valid_ = false;
};

/// Convenience one-shot solve.
inline LpSolution solve_lp(const LpModel& model, SimplexOptions opt = {}) {
  SimplexSolver solver(model, opt);
  return solver.solve();
}

}  // namespace rabs
