#pragma once

#include <vector>

namespace edgealloc {

// Small dense linear programs: min c'x subject to row constraints and x >= 0.
// Two-phase primal simplex on the full tableau with Bland's rule. Intended for
// desk-scale instances (tens of rows); used as an independent oracle against
// closed-form allocation rules.

enum class LpRelation { less_equal, greater_equal, equal };

struct LpRow {
  std::vector<double> coeffs;
  LpRelation relation = LpRelation::less_equal;
  double rhs = 0.0;
};

struct LpProblem {
  std::vector<double> objective;  // minimized
  std::vector<LpRow> rows;
};

struct LpSolution {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

LpSolution solve_lp(const LpProblem& problem);

}  // namespace edgealloc
