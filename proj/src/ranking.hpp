#pragma once

#include "model.hpp"
#include "types.hpp"

namespace edgealloc {

// One task's users ordered by per-second sample rate U = R_k / D_k
// (descending, ties broken by user_id ascending). Zero-rate users are
// excluded; V is the user's dataset size in samples.
struct RankedEntry {
  int user = -1;
  double rate_samples_per_s = 0.0;  // U
  double capacity_samples = 0.0;    // V
};

struct RankedGroup {
  int task = -1;
  std::vector<RankedEntry> entries;
};

// Fixed max-power rate alpha * B * log2(1 + P_max |h|^2 / sigma^2) in bits/s,
// or alpha * fixed_rate. Throws Error(method_ineligible) when
// e_max < t_max * p_max.
double max_power_rate(const UserLink& link, const RadioParams& radio,
                      const Budgets& budgets);

RankedGroup build_ranked_group(const Scenario& s, const ScenarioIndex& index,
                               int task);

struct TaskTimeSolution {
  bool feasible = false;  // false: demand exceeds the group's total capacity
  std::vector<double> times;  // per ranked entry, s
  double total = 0.0;
};

// Closed-form greedy optimum of the per-task time-minimization subproblem:
// each ranked entry takes min(V_i, remaining demand) / U_i seconds.
TaskTimeSolution solve_task_times(const RankedGroup& group, double demand);

// Independent LP route to the same optimum (generic two-phase simplex);
// equivalence-tested against solve_task_times. Group size is expected to stay
// desk-scale (<= 20). Throws Error(infeasible) when demand exceeds capacity.
double lp_oracle_task_times(const RankedGroup& group, double demand);

struct TimeMinResult {
  bool feasible = false;
  std::vector<double> user_times;  // per scenario user, s
  double total = 0.0;
  int binding_task = -1;  // task with the largest capacity shortfall when infeasible
};

// Minimum total transmission time that meets error level u_trial for every
// task; groups are solved independently. Throws Error(method_ineligible) on
// overlapping groups (the decomposition needs disjoint groups).
TimeMinResult min_total_time(const Scenario& s, const ScenarioIndex& index,
                             double u_trial);

struct BisectionStep {
  double u_lo = 0.0, u_hi = 0.0, u_trial = 0.0;
  bool feasible = false;
};

struct BisectionTrace {
  std::vector<BisectionStep> history;
  double final_u = 0.0;
  double epsilon = 0.0;
};

struct RankingResult {
  Allocation allocation;
  BisectionTrace trace;
};

// Bisection on the error level over [0, u_max], u_max starting at 1 and
// doubling (capped at max_m a_m * max(c_m, 1)^-b_m) until feasible. The final
// allocation transmits at peak power: E_k = P_max * t_k.
RankingResult solve_ranking(const Scenario& s, double epsilon = 1e-9);

}  // namespace edgealloc
