#include "edgealloc/edgealloc.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "baseline.hpp"
#include "dcp.hpp"
#include "fitcurve.hpp"
#include "model.hpp"
#include "ranking.hpp"
#include "scenario_io.hpp"
#include "sim.hpp"
#include "types.hpp"

using namespace edgealloc;
using nlohmann::json;

namespace {

thread_local std::string g_last_error;

ea_status fail(Status status, const std::string& message) {
  g_last_error = message;
  return static_cast<ea_status>(status);
}

template <typename Fn>
ea_status guarded(Fn&& fn) {
  try {
    fn();
    return EA_OK;
  } catch (const Error& e) {
    return fail(e.status(), e.what());
  } catch (const std::exception& e) {
    return fail(Status::solver_failure, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct ea_scenario {
  Scenario scenario;
};

struct ea_result {
  Scenario scenario;
  std::string method;
  Allocation allocation;
  json trace;
};

struct ea_summary {
  MonteCarloSummary summary;
};

extern "C" {

const char* ea_version(void) { return "0.1.0"; }

const char* ea_last_error(void) { return g_last_error.c_str(); }

void ea_string_free(char* s) { delete[] s; }

ea_status ea_scenario_parse(const char* json_text, ea_scenario** out) {
  if (!json_text || !out) return fail(Status::invalid_input, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto holder = new ea_scenario{parse_scenario(json_text)};
    *out = holder;
  });
}

void ea_scenario_free(ea_scenario* s) { delete s; }

int ea_scenario_user_count(const ea_scenario* s) {
  return s ? static_cast<int>(s->scenario.users.size()) : -1;
}

int ea_scenario_task_count(const ea_scenario* s) {
  return s ? static_cast<int>(s->scenario.tasks.size()) : -1;
}

int ea_scenario_ranking_eligible(const ea_scenario* s) {
  return s ? (ranking_eligible(s->scenario) ? 1 : 0) : -1;
}

ea_status ea_solve(const ea_scenario* s, const ea_solve_options* options,
                   ea_result** out) {
  if (!s || !options || !options->method || !out) {
    return fail(Status::invalid_input, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    const std::string method = options->method;
    const double epsilon = options->epsilon > 0 ? options->epsilon : 1e-9;
    const double outer_tol = options->outer_tol > 0 ? options->outer_tol : 1e-6;
    const int max_outer = options->max_outer > 0 ? options->max_outer : 100;

    auto result = std::make_unique<ea_result>();
    result->scenario = s->scenario;
    result->method = method;
    if (method == "ranking") {
      RankingResult r = solve_ranking(s->scenario, epsilon);
      result->allocation = std::move(r.allocation);
      json history = json::array();
      for (const BisectionStep& step : r.trace.history) {
        history.push_back({{"u_lo", step.u_lo},
                           {"u_hi", step.u_hi},
                           {"u_trial", step.u_trial},
                           {"feasible", step.feasible}});
      }
      result->trace = {{"final_u", r.trace.final_u},
                       {"epsilon", r.trace.epsilon},
                       {"bisection_steps", r.trace.history.size()},
                       {"history", std::move(history)}};
    } else if (method == "dcp") {
      DcpResult r = solve_dcp(s->scenario, outer_tol, max_outer);
      result->allocation = std::move(r.allocation);
      const char* term = r.trace.termination == DcpTermination::converged
                             ? "converged"
                             : (r.trace.termination == DcpTermination::max_iterations
                                    ? "max_iterations"
                                    : "infeasible_start");
      result->trace = {{"objectives", r.trace.objectives},
                       {"termination", term},
                       {"kkt_residual", r.trace.kkt_residual}};
    } else if (method == "time-fair") {
      result->allocation = time_fairness(s->scenario);
      result->trace = json::object();
    } else if (method == "throughput-fair") {
      result->allocation = throughput_fairness(s->scenario);
      result->trace = json::object();
    } else {
      throw Error(Status::invalid_input,
                  "unknown method '" + method +
                      "'; expected ranking, dcp, time-fair or throughput-fair");
    }
    *out = result.release();
  });
}

void ea_result_free(ea_result* r) { delete r; }

double ea_result_objective(const ea_result* r) {
  return r ? r->allocation.objective : -1.0;
}

int ea_result_user_count(const ea_result* r) {
  return r ? static_cast<int>(r->allocation.time.size()) : -1;
}

ea_status ea_result_report_json(const ea_result* r, char** out) {
  if (!r || !out) return fail(Status::invalid_input, "null argument");
  return guarded([&] {
    json j = allocation_to_json(r->scenario, r->allocation);
    j["method"] = r->method;
    j["trace"] = r->trace;
    *out = dup_string(j.dump(2));
  });
}

ea_status ea_result_users_csv(const ea_result* r, char** out) {
  if (!r || !out) return fail(Status::invalid_input, "null argument");
  return guarded([&] { *out = dup_string(allocation_users_csv(r->scenario, r->allocation)); });
}

ea_status ea_fit_power_law(const double* v, const double* err, int n,
                           double gradient_tol, int max_iterations, int multistart,
                           ea_fit_result* out) {
  if (!v || !err || !out || n < 0) return fail(Status::invalid_input, "null argument");
  std::vector<ErrorCurvePoint> points(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) points[i] = {v[i], err[i]};
  FitConfig config;
  if (gradient_tol > 0) config.gradient_tol = gradient_tol;
  if (max_iterations > 0) config.max_iterations = max_iterations;
  config.multistart = multistart != 0;
  try {
    const FitResult r = fit_power_law(points, config);
    *out = {r.a, r.b, r.residual_sse, r.iterations};
    return EA_OK;
  } catch (const FitConvergenceError& e) {
    *out = {e.best().a, e.best().b, e.best().residual_sse, e.best().iterations};
    return fail(e.status(), e.what());
  } catch (const Error& e) {
    return fail(e.status(), e.what());
  } catch (const std::exception& e) {
    return fail(Status::solver_failure, e.what());
  }
}

ea_status ea_builtin_config(const char* name, char** out_json) {
  if (!name || !out_json) return fail(Status::invalid_input, "null argument");
  return guarded([&] { *out_json = dup_string(builtin_config(name)); });
}

ea_status ea_sweep_run(const char* config_json, int64_t seed_override,
                       ea_summary** out) {
  if (!config_json || !out) return fail(Status::invalid_input, "null argument");
  *out = nullptr;
  return guarded([&] {
    SweepConfig config = parse_sweep_config(config_json);
    if (seed_override >= 0) config.seed = static_cast<uint64_t>(seed_override);
    auto holder = std::make_unique<ea_summary>();
    holder->summary = run_sweep(config);
    *out = holder.release();
  });
}

void ea_summary_free(ea_summary* s) { delete s; }

ea_status ea_summary_csv(const ea_summary* s, char** out) {
  if (!s || !out) return fail(Status::invalid_input, "null argument");
  return guarded([&] { *out = dup_string(summary_to_csv(s->summary)); });
}

ea_status ea_summary_json(const ea_summary* s, char** out) {
  if (!s || !out) return fail(Status::invalid_input, "null argument");
  return guarded([&] { *out = dup_string(summary_to_json(s->summary).dump(2)); });
}

ea_status ea_reproduce_vehicular(char** out_json) {
  if (!out_json) return fail(Status::invalid_input, "null argument");
  return guarded([&] {
    const VehicularReport report = reproduce_vehicular();
    *out_json = dup_string(vehicular_report_to_json(report).dump(2));
  });
}

}  // extern "C"
