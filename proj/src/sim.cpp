#include "sim.hpp"

#include <algorithm>
#include <cmath>

#include "baseline.hpp"
#include "fitcurve.hpp"

namespace edgealloc {

namespace {
constexpr uint64_t kChannelStream = 0x6368616e6e656cull;  // "channel"
constexpr uint64_t kPerturbStream = 0x70657274757262ull;  // "perturb"
}  // namespace

double draw_channel(Rng& rng, double pathloss) {
  if (!(pathloss > 0)) throw Error(Status::invalid_input, "pathloss must be > 0");
  const double scale = std::sqrt(pathloss / 2.0);
  const double re = scale * rng.normal();
  const double im = scale * rng.normal();
  return re * re + im * im;
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::dcp: return "dcp";
    case Scheme::ranking: return "ranking";
    case Scheme::time_fair: return "time_fair";
    case Scheme::throughput_fair: return "throughput_fair";
    case Scheme::dcp_imperfect: return "dcp_imperfect";
  }
  return "?";
}

const char* sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::e_max: return "e_max";
    case SweepParameter::t_max: return "t_max";
    case SweepParameter::k_users: return "k_users";
  }
  return "?";
}

void validate_sweep_config(const SweepConfig& config) {
  if (config.monte_carlo_runs < 1) {
    throw Error(Status::invalid_input, "monte_carlo_runs must be >= 1");
  }
  if (config.values.empty()) {
    throw Error(Status::invalid_input, "sweep needs at least one value");
  }
  for (size_t i = 1; i < config.values.size(); ++i) {
    if (!(config.values[i] > config.values[i - 1])) {
      throw Error(Status::invalid_input, "sweep values must be strictly increasing");
    }
  }
  if (!config.paired_p_max.empty() &&
      config.paired_p_max.size() != config.values.size()) {
    throw Error(Status::invalid_input,
                "paired p_max list must match the sweep values in length");
  }
  if (config.schemes.empty()) {
    throw Error(Status::invalid_input, "sweep needs at least one scheme");
  }
  if (config.tmpl.random_channel.size() != config.tmpl.base.users.size()) {
    throw Error(Status::invalid_input, "random_channel mask must cover all users");
  }
  bool any_random = false;
  for (bool r : config.tmpl.random_channel) any_random |= r;
  if (any_random && !(config.tmpl.pathloss > 0)) {
    throw Error(Status::invalid_input,
                "random channels need a positive pathloss in the template");
  }
  if (config.parameter == SweepParameter::k_users) {
    for (double v : config.values) {
      if (v != std::floor(v) || v < 1 ||
          v > static_cast<double>(config.tmpl.base.users.size())) {
        throw Error(Status::invalid_input,
                    "k_users sweep values must be integers in [1, user count]");
      }
    }
  }
}

Scenario instantiate_scenario(const SweepConfig& config, int value_index, int run) {
  Scenario sc = config.tmpl.base;
  const double value = config.values[value_index];
  switch (config.parameter) {
    case SweepParameter::e_max:
      sc.budgets.e_max = value;
      break;
    case SweepParameter::t_max:
      sc.budgets.t_max = value;
      break;
    case SweepParameter::k_users: {
      const size_t k = static_cast<size_t>(value);
      sc.users.resize(k);
      for (LearningErrorModel& task : sc.tasks) {
        std::vector<std::string> kept;
        for (const std::string& uid : task.users) {
          for (size_t j = 0; j < k; ++j) {
            if (sc.users[j].user_id == uid) {
              kept.push_back(uid);
              break;
            }
          }
        }
        if (kept.empty()) {
          throw Error(Status::invalid_input,
                      "task " + task.task_id + " has no users at k = " +
                          std::to_string(k));
        }
        task.users = std::move(kept);
      }
      break;
    }
  }
  if (!config.paired_p_max.empty()) {
    sc.budgets.p_max = config.paired_p_max[value_index];
  }

  // Channels are keyed by (seed, run, template user index): shared along the
  // sweep axis within a run, and shared between k_users prefixes.
  for (size_t j = 0; j < sc.users.size(); ++j) {
    if (config.tmpl.random_channel[j]) {
      Rng rng(Rng::derive({config.seed, kChannelStream,
                           static_cast<uint64_t>(run), static_cast<uint64_t>(j)}));
      sc.users[j].channel_gain = draw_channel(rng, config.tmpl.pathloss);
    }
  }
  return sc;
}

namespace {

CellRun run_cell(const SweepConfig& config, Scheme scheme, int value_index, int run) {
  CellRun out;
  try {
    const Scenario sc = instantiate_scenario(config, value_index, run);
    Allocation alloc;
    switch (scheme) {
      case Scheme::dcp:
        alloc = solve_dcp(sc, config.outer_tol, config.max_outer).allocation;
        break;
      case Scheme::ranking:
        alloc = solve_ranking(sc, config.epsilon).allocation;
        break;
      case Scheme::time_fair:
        alloc = time_fairness(sc);
        break;
      case Scheme::throughput_fair:
        alloc = throughput_fairness(sc);
        break;
      case Scheme::dcp_imperfect: {
        // Allocate under independently mis-estimated curve parameters, then
        // score the resulting allocation under the true ones (the constraint
        // set does not involve the curve parameters).
        Scenario wrong = sc;
        for (size_t m = 0; m < wrong.tasks.size(); ++m) {
          Rng rng(Rng::derive({config.seed, kPerturbStream,
                               static_cast<uint64_t>(value_index),
                               static_cast<uint64_t>(run), static_cast<uint64_t>(m)}));
          wrong.tasks[m] = perturb_parameters(wrong.tasks[m], config.perturb_fraction, rng);
        }
        const Allocation misallocated =
            solve_dcp(wrong, config.outer_tol, config.max_outer).allocation;
        alloc = evaluate_allocation(sc, misallocated.time, misallocated.energy);
        break;
      }
    }
    out.objective = alloc.objective;
    out.samples = integer_samples(sc, alloc);
    return out;
  } catch (const Error& e) {
    out.status = e.status();
    out.error = e.what();
    return out;
  } catch (const std::exception& e) {
    out.status = Status::solver_failure;
    out.error = e.what();
    return out;
  }
}

}  // namespace

MonteCarloSummary run_sweep(const SweepConfig& config) {
  validate_sweep_config(config);

  MonteCarloSummary summary;
  summary.parameter = config.parameter;
  summary.seed = config.seed;
  for (const LearningErrorModel& t : config.tmpl.base.tasks) {
    summary.task_ids.push_back(t.task_id);
  }
  const size_t M = summary.task_ids.size();

  for (size_t vi = 0; vi < config.values.size(); ++vi) {
    // Eligibility depends only on the budgets, which are run-independent.
    Budgets budgets = config.tmpl.base.budgets;
    switch (config.parameter) {
      case SweepParameter::e_max: budgets.e_max = config.values[vi]; break;
      case SweepParameter::t_max: budgets.t_max = config.values[vi]; break;
      case SweepParameter::k_users: break;
    }
    if (!config.paired_p_max.empty()) budgets.p_max = config.paired_p_max[vi];
    const bool eligible = budgets.e_max >= budgets.t_max * budgets.p_max;

    for (Scheme scheme : config.schemes) {
      SummaryCell cell;
      cell.value = config.values[vi];
      cell.scheme = scheme;
      if (scheme == Scheme::ranking && !eligible) {
        cell.skipped = true;
        cell.notice = "ranking skipped: e_max < t_max * p_max at this point";
        summary.cells.push_back(std::move(cell));
        continue;
      }
      double sum = 0.0, sumsq = 0.0;
      std::vector<double> sample_sum(M, 0.0);
      for (int run = 0; run < config.monte_carlo_runs; ++run) {
        CellRun r = run_cell(config, scheme, static_cast<int>(vi), run);
        if (r.status == Status::ok) {
          ++cell.runs_ok;
          sum += r.objective;
          sumsq += r.objective * r.objective;
          for (size_t m = 0; m < M && m < r.samples.size(); ++m) {
            sample_sum[m] += r.samples[m];
          }
        }
        cell.runs.push_back(std::move(r));
      }
      if (cell.runs_ok > 0) {
        cell.mean_objective = sum / cell.runs_ok;
        const double var =
            std::max(0.0, sumsq / cell.runs_ok - cell.mean_objective * cell.mean_objective);
        cell.std_objective = std::sqrt(var);
        cell.mean_samples.resize(M);
        for (size_t m = 0; m < M; ++m) cell.mean_samples[m] = sample_sum[m] / cell.runs_ok;
      }
      summary.cells.push_back(std::move(cell));
    }
  }
  return summary;
}

VehicularReport reproduce_vehicular() {
  VehicularReport report;
  Scenario& s = report.scenario;
  s.radio.bandwidth = 180000.0;
  s.radio.noise_power = std::pow(10.0, (-130.0 - 30.0) / 10.0) * s.radio.bandwidth;
  s.radio.alpha = 1.0;
  s.budgets = {16.0, 1.6, 0.1};

  const double bits_per_sample = 500000.0;  // one point-cloud sample
  for (int i = 0; i < 2; ++i) {
    UserLink u;
    u.user_id = "vehicle" + std::to_string(i + 1);
    u.channel_gain = 0.0;
    u.bits_per_sample = bits_per_sample;
    u.dataset_size = 200.0;
    u.fixed_rate = 10.0 * bits_per_sample;  // 10 samples/s
    s.users.push_back(u);
  }
  s.tasks.push_back({"sparse_traffic", 3.95, 0.5, 0.0, {"vehicle1"}});
  s.tasks.push_back({"dense_traffic", 3.11, 0.71, 0.0, {"vehicle2"}});

  report.optimized = solve_ranking(s, 1e-9).allocation;
  report.optimized_samples = integer_samples(s, report.optimized);
  report.equal_time = time_fairness(s);
  report.equal_samples = integer_samples(s, report.equal_time);
  return report;
}

}  // namespace edgealloc
