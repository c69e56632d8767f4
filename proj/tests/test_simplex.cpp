#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "rabs/lp.hpp"
#include "rabs/simplex.hpp"

namespace {

using rabs::kInfinity;
using rabs::LpModel;
using rabs::LpSolution;
using rabs::LpStatus;
using rabs::Relation;
using rabs::Sense;
using rabs::SimplexSolver;

// ---- independent vertex-enumeration oracle -------------------------------
//
// Enumerates every choice of n constraints (rows and finite bounds treated as
// equalities), solves the square system, and keeps the best feasible point.
// Only valid for LPs whose variables all carry finite bounds, which makes the
// feasible set a polytope: nonempty implies a vertex exists and the optimum
// sits on one.

struct Halfspace {
  std::vector<double> a;
  Relation rel;
  double b;
};

bool solve_square(std::vector<std::vector<double>> m, std::vector<double> rhs,
                  std::vector<double>& out) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    if (std::fabs(m[pivot][col]) < 1e-10) return false;
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  out.resize(n);
  for (int r = 0; r < n; ++r) out[r] = rhs[r] / m[r][r];
  return true;
}

struct OracleResult {
  bool feasible = false;
  double objective = 0.0;
};

OracleResult vertex_enumeration_oracle(const LpModel& lp) {
  const int n = lp.num_vars();
  std::vector<Halfspace> hs;
  for (const auto& row : lp.rows()) {
    Halfspace h;
    h.a.assign(n, 0.0);
    for (const auto& [j, v] : row.coeffs) h.a[j] += v;
    h.rel = row.rel;
    h.b = row.rhs;
    hs.push_back(std::move(h));
  }
  for (int j = 0; j < n; ++j) {
    REQUIRE(std::isfinite(lp.lower()[j]));
    REQUIRE(std::isfinite(lp.upper()[j]));
    Halfspace lo;
    lo.a.assign(n, 0.0);
    lo.a[j] = 1.0;
    lo.rel = Relation::GreaterEq;
    lo.b = lp.lower()[j];
    hs.push_back(lo);
    Halfspace hi = lo;
    hi.rel = Relation::LessEq;
    hi.b = lp.upper()[j];
    hs.push_back(hi);
  }

  auto feasible_point = [&](const std::vector<double>& x) {
    for (const Halfspace& h : hs) {
      double act = 0.0;
      for (int j = 0; j < n; ++j) act += h.a[j] * x[j];
      const double tol = 1e-7 * std::max(1.0, std::fabs(h.b));
      if (h.rel == Relation::LessEq && act > h.b + tol) return false;
      if (h.rel == Relation::GreaterEq && act < h.b - tol) return false;
      if (h.rel == Relation::Equal && std::fabs(act - h.b) > tol) return false;
    }
    return true;
  };

  OracleResult result;
  const int total = static_cast<int>(hs.size());
  std::vector<int> pick(n);
  for (int t = 0; t < n; ++t) pick[t] = t;
  const double sign = lp.sense == Sense::Maximize ? 1.0 : -1.0;
  while (true) {
    std::vector<std::vector<double>> m(n);
    std::vector<double> rhs(n);
    for (int t = 0; t < n; ++t) {
      m[t] = hs[pick[t]].a;
      rhs[t] = hs[pick[t]].b;
    }
    std::vector<double> x;
    if (solve_square(std::move(m), std::move(rhs), x) && feasible_point(x)) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += lp.objective()[j] * x[j];
      if (!result.feasible || sign * obj > sign * result.objective) {
        result.feasible = true;
        result.objective = obj;
      }
    }
    // next combination
    int t = n - 1;
    while (t >= 0 && pick[t] == total - n + t) --t;
    if (t < 0) break;
    ++pick[t];
    for (int u = t + 1; u < n; ++u) pick[u] = pick[u - 1] + 1;
  }
  // Equality rows must still be honored when n constraints cannot pin a
  // vertex (e.g. n=1 with only bounds); the loop above covers those cases
  // since bounds are part of the list.
  return result;
}

double max_residual(const LpModel& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& row : lp.rows()) {
    double act = 0.0;
    for (const auto& [j, v] : row.coeffs) act += v * x[j];
    switch (row.rel) {
      case Relation::LessEq: worst = std::max(worst, act - row.rhs); break;
      case Relation::GreaterEq: worst = std::max(worst, row.rhs - act); break;
      case Relation::Equal: worst = std::max(worst, std::fabs(act - row.rhs)); break;
    }
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    worst = std::max(worst, lp.lower()[j] - x[j]);
    worst = std::max(worst, x[j] - lp.upper()[j]);
  }
  return worst;
}

LpModel random_bounded_lp(std::mt19937_64& rng) {
  auto uniform = [&](double a, double b) {
    return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  auto uniform_int = [&](int a, int b) {
    return a + static_cast<int>(rng() % static_cast<std::uint64_t>(b - a + 1));
  };
  LpModel lp;
  lp.sense = rng() % 2 ? Sense::Maximize : Sense::Minimize;
  const int n = uniform_int(1, 6);
  const int m = uniform_int(0, 5);
  std::vector<double> interior(n);
  for (int j = 0; j < n; ++j) {
    const double lo = uniform(-3.0, 0.0);
    const double hi = lo + uniform(0.5, 4.0);
    lp.add_variable("v" + std::to_string(j), lo, hi, uniform(-5.0, 5.0));
    interior[j] = uniform(lo, hi);
  }
  for (int r = 0; r < m; ++r) {
    std::vector<std::pair<int, double>> coeffs;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (n > 2 && rng() % 3 == 0) continue;  // some sparsity
      const double v = uniform(-4.0, 4.0);
      coeffs.push_back({j, v});
      act += v * interior[j];
    }
    if (coeffs.empty()) coeffs.push_back({0, 1.0});
    const int kind = uniform_int(0, 9);
    if (kind < 4) {
      lp.add_row(std::move(coeffs), Relation::LessEq, act + uniform(-1.0, 3.0));
    } else if (kind < 8) {
      lp.add_row(std::move(coeffs), Relation::GreaterEq, act - uniform(-1.0, 3.0));
    } else {
      lp.add_row(std::move(coeffs), Relation::Equal, act);
    }
  }
  return lp;
}

}  // namespace

TEST_CASE("single variable at its bound") {
  LpModel lp;
  lp.add_variable("x", 0.0, 1.0, 1.0);
  const LpSolution sol = rabs::solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Catch::Approx(1.0));
  CHECK(sol.x[0] == Catch::Approx(1.0));
}

TEST_CASE("conflicting rows are infeasible") {
  LpModel lp;
  const int x = lp.add_variable("x", -10.0, 10.0, 1.0);
  lp.add_row({{x, 1.0}}, Relation::GreaterEq, 2.0);
  lp.add_row({{x, 1.0}}, Relation::LessEq, 1.0);
  CHECK(rabs::solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("two-variable optimum on a vertex") {
  LpModel lp;
  const int a = lp.add_variable("a", 0.0, 4.0, 3.0);
  const int b = lp.add_variable("b", 0.0, 4.0, 2.0);
  lp.add_row({{a, 1.0}, {b, 1.0}}, Relation::LessEq, 4.0);
  lp.add_row({{a, 1.0}}, Relation::LessEq, 2.0);
  const LpSolution sol = rabs::solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Catch::Approx(10.0));
  CHECK(sol.x[a] == Catch::Approx(2.0));
  CHECK(sol.x[b] == Catch::Approx(2.0));
}

TEST_CASE("unbounded direction is reported") {
  LpModel lp;
  const int x = lp.add_variable("x", 0.0, kInfinity, 1.0);
  lp.add_row({{x, 1.0}}, Relation::GreaterEq, 1.0);
  CHECK(rabs::solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("minimization sense") {
  LpModel lp;
  lp.sense = Sense::Minimize;
  const int x = lp.add_variable("x", -5.0, 5.0, 2.0);
  const int y = lp.add_variable("y", -5.0, 5.0, -1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Relation::GreaterEq, -3.0);
  const LpSolution sol = rabs::solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  // x -> -5 is blocked by the row once y = 5: x >= -8 is slack, so x = -5, y = 5.
  CHECK(sol.objective == Catch::Approx(-15.0));
}

TEST_CASE("equality rows") {
  LpModel lp;
  const int x = lp.add_variable("x", 0.0, 10.0, 1.0);
  const int y = lp.add_variable("y", 0.0, 10.0, 1.0);
  lp.add_row({{x, 1.0}, {y, 2.0}}, Relation::Equal, 6.0);
  const LpSolution sol = rabs::solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Catch::Approx(6.0));  // x=6, y=0
}

TEST_CASE("free variable") {
  LpModel lp;
  lp.sense = Sense::Minimize;
  const int x = lp.add_variable("x", -kInfinity, kInfinity, 1.0);
  const int y = lp.add_variable("y", 0.0, 1.0, 0.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Relation::GreaterEq, -2.0);
  const LpSolution sol = rabs::solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Catch::Approx(-3.0));  // x = -3 once y sits at 1
}

TEST_CASE("random bounded LPs agree with vertex enumeration") {
  std::mt19937_64 rng(20240817);
  int feasible_count = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const LpModel lp = random_bounded_lp(rng);
    const OracleResult oracle = vertex_enumeration_oracle(lp);
    const LpSolution sol = rabs::solve_lp(lp);
    INFO("trial " << trial << "\n" << lp.dump());
    if (!oracle.feasible) {
      CHECK(sol.status == LpStatus::Infeasible);
      continue;
    }
    ++feasible_count;
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(std::fabs(sol.objective - oracle.objective) <=
          1e-6 * std::max(1.0, std::fabs(oracle.objective)));
    CHECK(max_residual(lp, sol.x) <= 1e-7);
  }
  CHECK(feasible_count > 300);  // the generator aims for mostly feasible LPs
}

TEST_CASE("deterministic across repeated solves") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const LpModel lp = random_bounded_lp(rng);
    const LpSolution a = rabs::solve_lp(lp);
    const LpSolution b = rabs::solve_lp(lp);
    REQUIRE(a.status == b.status);
    REQUIRE(a.x.size() == b.x.size());
    CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("warm re-solve returns the same objective") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const LpModel lp = random_bounded_lp(rng);
    SimplexSolver solver(lp);
    const LpSolution first = solver.solve();
    if (first.status != LpStatus::Optimal) continue;
    const LpSolution again = solver.resolve();
    REQUIRE(again.status == LpStatus::Optimal);
    CHECK(std::fabs(again.objective - first.objective) <= 1e-9);
  }
}

TEST_CASE("bound changes are picked up by resolve") {
  LpModel lp;
  const int a = lp.add_variable("a", 0.0, 4.0, 3.0);
  const int b = lp.add_variable("b", 0.0, 4.0, 2.0);
  lp.add_row({{a, 1.0}, {b, 1.0}}, Relation::LessEq, 4.0);
  SimplexSolver solver(lp);
  REQUIRE(solver.solve().objective == Catch::Approx(12.0));  // a=4, b=0
  solver.set_variable_bounds(a, 1.0, 1.0);
  const LpSolution pinned = solver.resolve();
  REQUIRE(pinned.status == LpStatus::Optimal);
  CHECK(pinned.objective == Catch::Approx(3.0 + 2.0 * 3.0));
  CHECK(pinned.x[a] == Catch::Approx(1.0));
  solver.set_variable_bounds(a, 0.0, 4.0);
  CHECK(solver.resolve().objective == Catch::Approx(12.0));
}

TEST_CASE("forced refactorization keeps answers stable") {
  rabs::SimplexOptions opt;
  opt.refactor_interval = 3;  // exercise the refactor path constantly
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const LpModel lp = random_bounded_lp(rng);
    const OracleResult oracle = vertex_enumeration_oracle(lp);
    const LpSolution sol = rabs::solve_lp(lp, opt);
    INFO("trial " << trial << "\n" << lp.dump());
    if (!oracle.feasible) {
      CHECK(sol.status == LpStatus::Infeasible);
      continue;
    }
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(std::fabs(sol.objective - oracle.objective) <=
          1e-6 * std::max(1.0, std::fabs(oracle.objective)));
  }
}

TEST_CASE("model dump is stable text") {
  LpModel lp;
  lp.sense = Sense::Minimize;
  const int x = lp.add_variable("x", 0.0, 2.0, 1.5);
  lp.add_variable("y", -1.0, kInfinity, -2.0, true);
  lp.add_row({{x, 1.0}}, Relation::LessEq, 2.0);
  const std::string text = lp.dump();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("x <= 2") != std::string::npos);
  CHECK(text.find("Integers") != std::string::npos);
  CHECK(lp.dump() == text);
}
