#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgealloc {

// Error classes map 1:1 onto the CLI exit codes and the C API status values.
enum class Status : int {
  ok = 0,
  invalid_input = 2,
  method_ineligible = 3,
  infeasible = 4,
  solver_failure = 5,
};

class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

// Generalization-error curve a*v^(-b) of one training task, plus the group of
// users that feed it and the historical sample count already at the edge.
struct LearningErrorModel {
  std::string task_id;
  double a = 0.0;  // curve scale, > 0
  double b = 0.0;  // curve exponent, > 0
  double c = 0.0;  // historical samples, >= 0
  std::vector<std::string> users;
};

// Per-user radio and data parameters. channel_gain is the linear power gain
// |h|^2. fixed_rate (bits/s), when set, replaces the log-rate everywhere.
struct UserLink {
  std::string user_id;
  double channel_gain = 0.0;
  double bits_per_sample = 0.0;  // D_k
  double dataset_size = 0.0;     // samples available at the user
  std::optional<double> fixed_rate;
};

struct RadioParams {
  double bandwidth = 0.0;    // Hz
  double noise_power = 0.0;  // W, integrated over the bandwidth
  double alpha = 1.0;        // medium-access efficiency, in (0, 1]
};

struct Budgets {
  double t_max = 0.0;  // s
  double e_max = 0.0;  // J
  double p_max = 0.0;  // W
};

struct Scenario {
  std::vector<LearningErrorModel> tasks;
  std::vector<UserLink> users;
  RadioParams radio;
  Budgets budgets;
  bool allow_overlapping_groups = false;
};

// Cross-reference tables built by validate_scenario(); all solver code works
// with user/task positions, never with ids.
struct ScenarioIndex {
  std::vector<std::vector<int>> task_users;  // per task: user indices
  std::vector<int> groups_per_user;          // membership count per user
  bool overlapping = false;
};

// Throws Error(invalid_input) on any type-invariant violation.
ScenarioIndex validate_scenario(const Scenario& s);

int user_index(const Scenario& s, const std::string& user_id);
int task_index(const Scenario& s, const std::string& task_id);

// Large-energy regime assumption of the analytical solver.
inline bool ranking_eligible(const Scenario& s) {
  return s.budgets.e_max >= s.budgets.t_max * s.budgets.p_max;
}

// One solution of the allocation problem. Vectors follow the scenario's user
// and task order. bits holds delivered bits, which baselines truncate at the
// dataset cap, so bits <= theta(t, e) rather than always equal.
struct Allocation {
  std::vector<double> time;     // s
  std::vector<double> energy;   // J
  std::vector<double> bits;     // delivered bits
  std::vector<double> samples;  // per task, continuous view
  double objective = 0.0;       // worst predicted error (+inf if a task has v == 0)
};

}  // namespace edgealloc
