#include "simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace edgealloc {

namespace {

constexpr double kEps = 1e-11;

struct Tableau {
  // rows x (cols + 1); last column is the rhs. basis[i] is the basic column
  // of row i.
  int m = 0, n = 0;
  std::vector<std::vector<double>> a;
  std::vector<int> basis;

  void pivot(int row, int col) {
    const double p = a[row][col];
    for (double& v : a[row]) v /= p;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = a[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j <= n; ++j) a[i][j] -= f * a[row][j];
    }
    basis[row] = col;
  }
};

// Minimizes cost over the tableau in place. Returns false on unboundedness.
// allowed[j] masks columns that may enter the basis.
bool run_simplex(Tableau& t, const std::vector<double>& cost,
                 const std::vector<bool>& allowed, double* objective) {
  // Reduced-cost row; z[n] carries the negated objective value so the row
  // obeys the same pivot elimination as the constraint rows.
  std::vector<double> z(t.n + 1, 0.0);
  for (int j = 0; j <= t.n; ++j) {
    double v = (j < t.n) ? cost[j] : 0.0;
    for (int i = 0; i < t.m; ++i) v -= cost[t.basis[i]] * t.a[i][j];
    z[j] = v;
  }

  for (int iter = 0; iter < 20000; ++iter) {
    int enter = -1;
    for (int j = 0; j < t.n; ++j) {  // Bland: smallest eligible index
      if (allowed[j] && z[j] < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      *objective = -z[t.n];
      return true;
    }
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < t.m; ++i) {
      if (t.a[i][enter] > kEps) {
        const double ratio = t.a[i][t.n] / t.a[i][enter];
        if (ratio < best_ratio - kEps ||
            (ratio < best_ratio + kEps &&
             (leave < 0 || t.basis[i] < t.basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;  // unbounded

    const double zf = z[enter];
    t.pivot(leave, enter);
    for (int j = 0; j <= t.n; ++j) z[j] -= zf * t.a[leave][j];
  }
  throw std::runtime_error("simplex: iteration limit reached");
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  const int nvars = static_cast<int>(problem.objective.size());
  const int m = static_cast<int>(problem.rows.size());

  // Count structural columns: one slack/surplus per inequality plus one
  // artificial per >= / = row (and per <= row with negative rhs after
  // normalization).
  int n_slack = 0;
  for (const LpRow& r : problem.rows) {
    if (r.relation != LpRelation::equal) ++n_slack;
  }

  Tableau t;
  t.m = m;
  t.n = nvars + n_slack + m;  // artificials allocated for every row; unused stay zero
  t.a.assign(m, std::vector<double>(t.n + 1, 0.0));
  t.basis.assign(m, -1);

  int slack_at = nvars;
  const int art_at = nvars + n_slack;
  std::vector<bool> is_artificial(t.n, false);

  for (int i = 0; i < m; ++i) {
    const LpRow& r = problem.rows[i];
    if (static_cast<int>(r.coeffs.size()) != nvars) {
      throw std::runtime_error("simplex: row width mismatch");
    }
    double sign = 1.0;
    LpRelation rel = r.relation;
    double rhs = r.rhs;
    if (rhs < 0) {  // normalize to rhs >= 0
      sign = -1.0;
      rhs = -rhs;
      if (rel == LpRelation::less_equal) rel = LpRelation::greater_equal;
      else if (rel == LpRelation::greater_equal) rel = LpRelation::less_equal;
    }
    for (int j = 0; j < nvars; ++j) t.a[i][j] = sign * r.coeffs[j];
    t.a[i][t.n] = rhs;

    if (rel == LpRelation::less_equal) {
      t.a[i][slack_at] = 1.0;
      t.basis[i] = slack_at++;
    } else if (rel == LpRelation::greater_equal) {
      t.a[i][slack_at++] = -1.0;
      t.a[i][art_at + i] = 1.0;
      is_artificial[art_at + i] = true;
      t.basis[i] = art_at + i;
    } else {
      t.a[i][art_at + i] = 1.0;
      is_artificial[art_at + i] = true;
      t.basis[i] = art_at + i;
    }
  }

  LpSolution sol;

  // Phase 1: minimize the sum of artificials.
  bool any_artificial = false;
  std::vector<double> phase1_cost(t.n, 0.0);
  for (int j = 0; j < t.n; ++j) {
    if (is_artificial[j]) {
      phase1_cost[j] = 1.0;
      any_artificial = true;
    }
  }
  if (any_artificial) {
    std::vector<bool> allowed(t.n, true);
    double obj1 = 0.0;
    if (!run_simplex(t, phase1_cost, allowed, &obj1)) {
      throw std::runtime_error("simplex: phase 1 unbounded");
    }
    if (obj1 > 1e-8) return sol;  // infeasible
    // Pivot remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (!is_artificial[t.basis[i]]) continue;
      int col = -1;
      for (int j = 0; j < t.n; ++j) {
        if (!is_artificial[j] && std::abs(t.a[i][j]) > kEps) {
          col = j;
          break;
        }
      }
      if (col >= 0) t.pivot(i, col);
      // A fully zero row is redundant; its artificial stays basic at zero.
    }
  }

  // Phase 2 over the real objective, artificials barred from entering.
  std::vector<double> cost(t.n, 0.0);
  for (int j = 0; j < nvars; ++j) cost[j] = problem.objective[j];
  std::vector<bool> allowed(t.n, true);
  for (int j = 0; j < t.n; ++j) {
    if (is_artificial[j]) allowed[j] = false;
  }
  double obj2 = 0.0;
  if (!run_simplex(t, cost, allowed, &obj2)) {
    throw std::runtime_error("simplex: objective unbounded below");
  }

  sol.feasible = true;
  sol.objective = obj2;
  sol.x.assign(nvars, 0.0);
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < nvars) sol.x[t.basis[i]] = t.a[i][t.n];
  }
  return sol;
}

}  // namespace edgealloc
