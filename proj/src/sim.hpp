#pragma once

#include <cstdint>
#include <string>

#include "dcp.hpp"
#include "ranking.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace edgealloc {

// One draw of |h|^2 from a circularly symmetric complex Gaussian channel with
// mean power gain `pathloss` (so |h|^2 is exponential with that mean).
double draw_channel(Rng& rng, double pathloss);

enum class SweepParameter { e_max, t_max, k_users };
enum class Scheme { dcp, ranking, time_fair, throughput_fair, dcp_imperfect };

const char* scheme_name(Scheme s);
const char* sweep_parameter_name(SweepParameter p);

// Scenario whose per-user channels may be left open for the harness to draw.
struct ScenarioTemplate {
  Scenario base;
  std::vector<bool> random_channel;  // per user
  double pathloss = 0.0;             // linear mean |h|^2 for random draws
};

struct SweepConfig {
  ScenarioTemplate tmpl;
  SweepParameter parameter = SweepParameter::e_max;
  std::vector<double> values;        // strictly increasing
  std::vector<double> paired_p_max;  // optional, same length as values
  int monte_carlo_runs = 1;
  uint64_t seed = 0;
  std::vector<Scheme> schemes;
  double perturb_fraction = 0.1;  // imperfect-parameter scheme
  double epsilon = 1e-9;          // ranking bisection tolerance
  double outer_tol = 1e-6;
  int max_outer = 100;
};

void validate_sweep_config(const SweepConfig& config);

// Concrete scenario for one (sweep value, run) cell. Channels are drawn per
// (seed, run, user) so a run shares its channels across the whole sweep and
// the k_users prefix subsets share draws with the full set.
Scenario instantiate_scenario(const SweepConfig& config, int value_index, int run);

struct CellRun {
  Status status = Status::ok;
  std::string error;            // populated when status != ok
  double objective = 0.0;       // worst predicted error under the true parameters
  std::vector<double> samples;  // per task, floored view
};

struct SummaryCell {
  double value = 0.0;
  Scheme scheme = Scheme::dcp;
  bool skipped = false;
  std::string notice;  // reason for a skip
  std::vector<CellRun> runs;
  int runs_ok = 0;
  double mean_objective = 0.0;
  double std_objective = 0.0;
  std::vector<double> mean_samples;  // per task
};

struct MonteCarloSummary {
  SweepParameter parameter = SweepParameter::e_max;
  uint64_t seed = 0;
  std::vector<std::string> task_ids;
  std::vector<SummaryCell> cells;  // value-major, scheme-minor order
};

// Runs every (value, scheme, run) cell; solver failures are recorded per cell
// and the sweep continues. Deterministic for a fixed config.
MonteCarloSummary run_sweep(const SweepConfig& config);

struct VehicularReport {
  Scenario scenario;
  Allocation optimized;           // ranking solution
  std::vector<double> optimized_samples;  // floored per task
  Allocation equal_time;
  std::vector<double> equal_samples;
};

// Built-in fixed-rate two-task collection scenario; compares the ranking
// solver against equal time slots and reports floored sample counts.
VehicularReport reproduce_vehicular();

}  // namespace edgealloc
