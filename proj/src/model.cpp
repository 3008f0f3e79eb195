#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace edgealloc {

namespace {
constexpr double kLn2 = 0.6931471805599453;

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(Status::invalid_input, msg);
}

// Absolute slack granted when checking a constraint against its bound.
double tol_for(double bound) { return 1e-9 * std::max(1.0, std::abs(bound)); }
}  // namespace

ScenarioIndex validate_scenario(const Scenario& s) {
  require(!s.users.empty(), "scenario has no users");
  require(!s.tasks.empty(), "scenario has no tasks");
  require(s.radio.bandwidth > 0, "radio.bandwidth must be > 0");
  require(s.radio.noise_power > 0, "radio.noise_power must be > 0");
  require(s.radio.alpha > 0 && s.radio.alpha <= 1.0, "radio.alpha must be in (0, 1]");
  require(s.budgets.t_max >= 0, "budgets.t_max must be >= 0");
  require(s.budgets.e_max > 0, "budgets.e_max must be > 0");
  require(s.budgets.p_max > 0, "budgets.p_max must be > 0");

  std::unordered_map<std::string, int> by_id;
  for (int k = 0; k < static_cast<int>(s.users.size()); ++k) {
    const UserLink& u = s.users[k];
    require(!u.user_id.empty(), "user with empty id");
    require(by_id.emplace(u.user_id, k).second, "duplicate user id: " + u.user_id);
    require(u.channel_gain >= 0, "user " + u.user_id + ": channel_gain must be >= 0");
    require(u.bits_per_sample > 0, "user " + u.user_id + ": bits_per_sample must be > 0");
    require(u.dataset_size > 0, "user " + u.user_id + ": dataset_size must be > 0");
    if (u.fixed_rate) {
      require(*u.fixed_rate > 0, "user " + u.user_id + ": fixed_rate must be > 0");
    }
  }

  ScenarioIndex index;
  index.task_users.resize(s.tasks.size());
  index.groups_per_user.assign(s.users.size(), 0);
  std::set<std::string> task_ids;
  for (int m = 0; m < static_cast<int>(s.tasks.size()); ++m) {
    const LearningErrorModel& task = s.tasks[m];
    require(!task.task_id.empty(), "task with empty id");
    require(task_ids.insert(task.task_id).second, "duplicate task id: " + task.task_id);
    require(task.a > 0, "task " + task.task_id + ": a must be > 0");
    require(task.b > 0, "task " + task.task_id + ": b must be > 0");
    require(task.c >= 0, "task " + task.task_id + ": c must be >= 0");
    require(!task.users.empty(), "task " + task.task_id + ": user group is empty");
    std::set<std::string> seen;
    for (const std::string& uid : task.users) {
      require(seen.insert(uid).second,
              "task " + task.task_id + ": duplicate user " + uid + " in group");
      auto it = by_id.find(uid);
      require(it != by_id.end(), "task " + task.task_id + ": unknown user " + uid);
      index.task_users[m].push_back(it->second);
      index.groups_per_user[it->second] += 1;
    }
  }
  for (int k = 0; k < static_cast<int>(s.users.size()); ++k) {
    require(index.groups_per_user[k] > 0,
            "user " + s.users[k].user_id + " belongs to no task group");
    if (index.groups_per_user[k] > 1) index.overlapping = true;
  }
  if (index.overlapping && !s.allow_overlapping_groups) {
    throw Error(Status::invalid_input,
                "task groups overlap; set allow_overlapping_groups to opt in");
  }
  return index;
}

int user_index(const Scenario& s, const std::string& user_id) {
  for (int k = 0; k < static_cast<int>(s.users.size()); ++k) {
    if (s.users[k].user_id == user_id) return k;
  }
  throw Error(Status::invalid_input, "unknown user id: " + user_id);
}

int task_index(const Scenario& s, const std::string& task_id) {
  for (int m = 0; m < static_cast<int>(s.tasks.size()); ++m) {
    if (s.tasks[m].task_id == task_id) return m;
  }
  throw Error(Status::invalid_input, "unknown task id: " + task_id);
}

double theta(double t, double e, const UserLink& link, const RadioParams& radio) {
  if (t < 0 || e < 0) {
    throw Error(Status::invalid_input, "theta: t and e must be >= 0");
  }
  if (link.fixed_rate) return radio.alpha * t * (*link.fixed_rate);
  if (t == 0.0) return 0.0;
  const double snr = e * link.channel_gain / (t * radio.noise_power);
  return radio.alpha * t * radio.bandwidth * std::log2(1.0 + snr);
}

ThetaGradient theta_gradient(double t, double e, const UserLink& link,
                             const RadioParams& radio) {
  if (t <= 0) throw Error(Status::invalid_input, "theta_gradient: t must be > 0");
  if (e < 0) throw Error(Status::invalid_input, "theta_gradient: e must be >= 0");
  if (link.fixed_rate) return {radio.alpha * (*link.fixed_rate), 0.0};
  const double g = link.channel_gain / radio.noise_power;
  const double w = e * g / t;
  const double ab = radio.alpha * radio.bandwidth;
  return {ab * (std::log2(1.0 + w) - w / ((1.0 + w) * kLn2)),
          ab * g / ((1.0 + w) * kLn2)};
}

ThetaHessian theta_hessian(double t, double e, const UserLink& link,
                           const RadioParams& radio) {
  if (t <= 0) throw Error(Status::invalid_input, "theta_hessian: t must be > 0");
  if (e < 0) throw Error(Status::invalid_input, "theta_hessian: e must be >= 0");
  if (link.fixed_rate) return {0.0, 0.0, 0.0};
  const double g = link.channel_gain / radio.noise_power;
  const double w = e * g / t;
  const double s = radio.alpha * radio.bandwidth /
                   (t * (1.0 + w) * (1.0 + w) * kLn2);
  return {-s * w * w, s * g * w, -s * g * g};
}

double samples_for_task(const Scenario& s, const ScenarioIndex& index, int task,
                        std::span<const double> bits) {
  double v = s.tasks[task].c;
  for (int k : index.task_users[task]) {
    if (bits[k] < 0) throw Error(Status::invalid_input, "negative bits");
    v += bits[k] / s.users[k].bits_per_sample;
  }
  return v;
}

double samples_for_task_floored(const Scenario& s, const ScenarioIndex& index,
                                int task, std::span<const double> bits) {
  double v = s.tasks[task].c;
  for (int k : index.task_users[task]) {
    if (bits[k] < 0) throw Error(Status::invalid_input, "negative bits");
    v += std::floor(bits[k] / s.users[k].bits_per_sample);
  }
  return v;
}

double predicted_error(const LearningErrorModel& task, double v) {
  if (v <= 0) throw Error(Status::invalid_input, "predicted_error: v must be > 0");
  return task.a * std::pow(v, -task.b);
}

double required_samples(const LearningErrorModel& task, double u) {
  if (u <= 0) throw Error(Status::invalid_input, "required_samples: u must be > 0");
  return std::max(0.0, std::pow(u / task.a, -1.0 / task.b) - task.c);
}

double worst_error(const Scenario& s, std::span<const double> samples) {
  double worst = 0.0;
  for (size_t m = 0; m < s.tasks.size(); ++m) {
    if (samples[m] <= 0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, predicted_error(s.tasks[m], samples[m]));
  }
  return worst;
}

Allocation finalize_allocation(const Scenario& s, const ScenarioIndex& index,
                               std::span<const double> time,
                               std::span<const double> energy,
                               std::span<const double> bits) {
  const size_t K = s.users.size();
  if (time.size() != K || energy.size() != K || bits.size() != K) {
    throw Error(Status::invalid_input, "allocation vectors must cover all users");
  }

  std::vector<std::string> violations;
  auto flag = [&violations](const std::string& what) { violations.push_back(what); };

  double t_sum = 0.0, e_sum = 0.0;
  for (size_t k = 0; k < K; ++k) {
    const UserLink& u = s.users[k];
    if (time[k] < 0) flag("t < 0 for user " + u.user_id);
    if (energy[k] < 0) flag("E < 0 for user " + u.user_id);
    t_sum += time[k];
    e_sum += energy[k];
    if (energy[k] > s.budgets.p_max * time[k] + tol_for(s.budgets.p_max * time[k])) {
      flag("E > P_max * t for user " + u.user_id);
    }
    const double max_bits = theta(std::max(time[k], 0.0), std::max(energy[k], 0.0), u, s.radio);
    if (bits[k] > max_bits + tol_for(max_bits)) {
      flag("bits exceed the deliverable amount for user " + u.user_id);
    }
    const double cap = u.dataset_size * u.bits_per_sample;
    if (bits[k] > cap + tol_for(cap)) {
      flag("dataset cap exceeded for user " + u.user_id);
    }
  }
  if (t_sum > s.budgets.t_max + tol_for(s.budgets.t_max)) flag("sum(t) > T_max");
  if (e_sum > s.budgets.e_max + tol_for(s.budgets.e_max)) flag("sum(E) > E_max");

  if (!violations.empty()) {
    std::ostringstream oss;
    oss << "allocation violates " << violations.size() << " constraint(s): ";
    for (size_t i = 0; i < violations.size(); ++i) {
      if (i) oss << "; ";
      oss << violations[i];
    }
    throw Error(Status::invalid_input, oss.str());
  }

  Allocation alloc;
  alloc.time.assign(time.begin(), time.end());
  alloc.energy.assign(energy.begin(), energy.end());
  alloc.bits.assign(bits.begin(), bits.end());
  alloc.samples.resize(s.tasks.size());
  for (size_t m = 0; m < s.tasks.size(); ++m) {
    alloc.samples[m] = samples_for_task(s, index, static_cast<int>(m), bits);
  }
  alloc.objective = worst_error(s, alloc.samples);
  return alloc;
}

Allocation evaluate_allocation(const Scenario& s, std::span<const double> time,
                               std::span<const double> energy) {
  const ScenarioIndex index = validate_scenario(s);
  if (time.size() != s.users.size() || energy.size() != s.users.size()) {
    throw Error(Status::invalid_input, "allocation maps must cover all users");
  }
  std::vector<double> bits(s.users.size());
  for (size_t k = 0; k < s.users.size(); ++k) {
    if (time[k] < 0 || energy[k] < 0) {
      throw Error(Status::invalid_input, "allocation has negative t or E");
    }
    bits[k] = theta(time[k], energy[k], s.users[k], s.radio);
  }
  return finalize_allocation(s, index, time, energy, bits);
}

std::vector<double> integer_samples(const Scenario& s, const Allocation& alloc) {
  const ScenarioIndex index = validate_scenario(s);
  std::vector<double> out(s.tasks.size());
  for (size_t m = 0; m < s.tasks.size(); ++m) {
    out[m] = samples_for_task_floored(s, index, static_cast<int>(m), alloc.bits);
  }
  return out;
}

}  // namespace edgealloc
