#include "ranking.hpp"

#include <algorithm>
#include <cmath>

#include "simplex.hpp"

namespace edgealloc {

namespace {
// Relative slack when comparing served demand against capacity or total time
// against the budget.
constexpr double kFeasSlack = 1e-12;
}  // namespace

double max_power_rate(const UserLink& link, const RadioParams& radio,
                      const Budgets& budgets) {
  if (!(budgets.e_max >= budgets.t_max * budgets.p_max)) {
    throw Error(Status::method_ineligible,
                "ranking solver requires e_max >= t_max * p_max (energy cannot "
                "sustain peak power for the whole window); use the dcp solver");
  }
  if (link.fixed_rate) return radio.alpha * (*link.fixed_rate);
  const double snr = budgets.p_max * link.channel_gain / radio.noise_power;
  return radio.alpha * radio.bandwidth * std::log2(1.0 + snr);
}

RankedGroup build_ranked_group(const Scenario& s, const ScenarioIndex& index,
                               int task) {
  RankedGroup group;
  group.task = task;
  for (int k : index.task_users[task]) {
    const double rate = max_power_rate(s.users[k], s.radio, s.budgets);
    if (rate <= 0.0) continue;  // dead channel: contributes nothing
    group.entries.push_back(
        {k, rate / s.users[k].bits_per_sample, s.users[k].dataset_size});
  }
  std::sort(group.entries.begin(), group.entries.end(),
            [&s](const RankedEntry& x, const RankedEntry& y) {
              if (x.rate_samples_per_s != y.rate_samples_per_s) {
                return x.rate_samples_per_s > y.rate_samples_per_s;
              }
              return s.users[x.user].user_id < s.users[y.user].user_id;
            });
  return group;
}

TaskTimeSolution solve_task_times(const RankedGroup& group, double demand) {
  TaskTimeSolution sol;
  sol.times.assign(group.entries.size(), 0.0);
  if (demand <= 0.0) {
    sol.feasible = true;
    return sol;
  }
  double remaining = demand;
  for (size_t i = 0; i < group.entries.size(); ++i) {
    if (remaining <= 0.0) break;
    const RankedEntry& entry = group.entries[i];
    const double served = std::min(entry.capacity_samples, remaining);
    sol.times[i] = served / entry.rate_samples_per_s;
    sol.total += sol.times[i];
    remaining -= served;
  }
  sol.feasible = remaining <= kFeasSlack * demand;
  return sol;
}

double lp_oracle_task_times(const RankedGroup& group, double demand) {
  if (demand <= 0.0) return 0.0;
  const int n = static_cast<int>(group.entries.size());
  LpProblem lp;
  lp.objective.assign(n, 1.0);
  LpRow cover;
  cover.relation = LpRelation::greater_equal;
  cover.rhs = demand;
  cover.coeffs.resize(n);
  for (int i = 0; i < n; ++i) cover.coeffs[i] = group.entries[i].rate_samples_per_s;
  lp.rows.push_back(cover);
  for (int i = 0; i < n; ++i) {
    LpRow cap;
    cap.relation = LpRelation::less_equal;
    cap.rhs = group.entries[i].capacity_samples;
    cap.coeffs.assign(n, 0.0);
    cap.coeffs[i] = group.entries[i].rate_samples_per_s;
    lp.rows.push_back(cap);
  }
  const LpSolution sol = solve_lp(lp);
  if (!sol.feasible) {
    throw Error(Status::infeasible, "demand exceeds the group's total capacity");
  }
  return sol.objective;
}

TimeMinResult min_total_time(const Scenario& s, const ScenarioIndex& index,
                             double u_trial) {
  if (u_trial <= 0.0) {
    throw Error(Status::invalid_input, "min_total_time: u_trial must be > 0");
  }
  if (index.overlapping) {
    throw Error(Status::method_ineligible,
                "ranking decomposition requires disjoint task groups");
  }
  TimeMinResult result;
  result.user_times.assign(s.users.size(), 0.0);
  result.feasible = true;
  double worst_shortfall = 0.0;
  for (int m = 0; m < static_cast<int>(s.tasks.size()); ++m) {
    const double demand = required_samples(s.tasks[m], u_trial);
    const RankedGroup group = build_ranked_group(s, index, m);
    const TaskTimeSolution task_sol = solve_task_times(group, demand);
    if (!task_sol.feasible) {
      result.feasible = false;
      double capacity = 0.0;
      for (const RankedEntry& e : group.entries) capacity += e.capacity_samples;
      const double shortfall = demand - capacity;
      if (shortfall > worst_shortfall) {
        worst_shortfall = shortfall;
        result.binding_task = m;
      }
      continue;
    }
    for (size_t i = 0; i < group.entries.size(); ++i) {
      result.user_times[group.entries[i].user] += task_sol.times[i];
    }
    result.total += task_sol.total;
  }
  return result;
}

RankingResult solve_ranking(const Scenario& s, double epsilon) {
  if (epsilon <= 0.0) {
    throw Error(Status::invalid_input, "solve_ranking: epsilon must be > 0");
  }
  const ScenarioIndex index = validate_scenario(s);
  if (!ranking_eligible(s)) {
    throw Error(Status::method_ineligible,
                "ranking solver requires e_max >= t_max * p_max; use the dcp solver");
  }

  auto feasible_at = [&](double u, TimeMinResult* out) {
    TimeMinResult r = min_total_time(s, index, u);
    const bool ok =
        r.feasible && r.total <= s.budgets.t_max * (1.0 + kFeasSlack);
    if (out) *out = std::move(r);
    return ok;
  };

  // Start at u_max = 1 and widen by doubling up to the zero-transmission
  // error ceiling (with c clamped to 1 sample so the cap stays finite).
  double u_cap = 0.0;
  for (const LearningErrorModel& task : s.tasks) {
    u_cap = std::max(u_cap, task.a * std::pow(std::max(task.c, 1.0), -task.b));
  }
  u_cap = std::max(u_cap, 1.0);

  double u_hi = 1.0;
  while (!feasible_at(u_hi, nullptr)) {
    if (u_hi >= u_cap) {
      TimeMinResult r = min_total_time(s, index, u_hi);
      std::string detail;
      if (!r.feasible && r.binding_task >= 0) {
        detail = "; task " + s.tasks[r.binding_task].task_id +
                 " needs more samples than its group's datasets hold";
      } else {
        detail = "; the time budget cannot serve the sample demand";
      }
      throw Error(Status::infeasible,
                  "no achievable error level up to " + std::to_string(u_cap) + detail);
    }
    u_hi = std::min(u_hi * 2.0, u_cap);
  }

  BisectionTrace trace;
  trace.epsilon = epsilon;
  double u_lo = 0.0;
  while (u_hi - u_lo > epsilon) {
    const double u_trial = 0.5 * (u_lo + u_hi);
    const bool ok = feasible_at(u_trial, nullptr);
    trace.history.push_back({u_lo, u_hi, u_trial, ok});
    if (ok) {
      u_hi = u_trial;
    } else {
      u_lo = u_trial;
    }
  }
  trace.final_u = u_hi;

  TimeMinResult final_times;
  if (!feasible_at(u_hi, &final_times)) {
    throw Error(Status::solver_failure, "bisection lost feasibility at the final level");
  }
  std::vector<double> energy(s.users.size());
  double e_sum = 0.0;
  for (size_t k = 0; k < s.users.size(); ++k) {
    energy[k] = s.budgets.p_max * final_times.user_times[k];
    e_sum += energy[k];
  }
  if (e_sum > s.budgets.e_max * (1.0 + 1e-9)) {
    throw Error(Status::invalid_input,
                "peak-power energy exceeds e_max; the eligibility check was bypassed");
  }

  RankingResult result;
  result.allocation = evaluate_allocation(s, final_times.user_times, energy);
  result.trace = std::move(trace);
  return result;
}

}  // namespace edgealloc
