#include "scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace edgealloc {

using nlohmann::json;

namespace {

double require_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw Error(Status::invalid_input, where + ": missing numeric field '" + key + "'");
  }
  return j[key].get<double>();
}

std::string require_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw Error(Status::invalid_input, where + ": missing string field '" + key + "'");
  }
  return j[key].get<std::string>();
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

json parse_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(Status::invalid_input, what + ": not valid JSON");
  }
  return j;
}

}  // namespace

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

ScenarioTemplate parse_scenario_template(const json& j) {
  if (!j.is_object()) {
    throw Error(Status::invalid_input, "scenario: expected a JSON object");
  }
  ScenarioTemplate tmpl;
  Scenario& s = tmpl.base;

  if (!j.contains("radio") || !j.contains("budgets") || !j.contains("users") ||
      !j.contains("tasks")) {
    throw Error(Status::invalid_input,
                "scenario: needs radio, budgets, users and tasks sections");
  }

  const json& radio = j["radio"];
  s.radio.bandwidth = require_number(radio, "bandwidth_hz", "radio");
  // PSD in dBm/Hz integrated over the bandwidth into watts.
  const double psd_dbm = require_number(radio, "noise_psd_dbm_hz", "radio");
  s.radio.noise_power = std::pow(10.0, (psd_dbm - 30.0) / 10.0) * s.radio.bandwidth;
  s.radio.alpha = radio.value("alpha", 1.0);
  if (radio.contains("pathloss_db")) {
    tmpl.pathloss = db_to_linear(radio["pathloss_db"].get<double>());
  }

  const json& budgets = j["budgets"];
  s.budgets.t_max = require_number(budgets, "t_max_s", "budgets");
  s.budgets.e_max = require_number(budgets, "e_max_j", "budgets");
  s.budgets.p_max = require_number(budgets, "p_max_w", "budgets");

  for (const json& ju : j["users"]) {
    UserLink u;
    u.user_id = require_string(ju, "id", "user");
    u.bits_per_sample = require_number(ju, "bits_per_sample", "user " + u.user_id);
    u.dataset_size = require_number(ju, "dataset_size", "user " + u.user_id);
    bool random = false;
    if (ju.contains("channel") && ju["channel"].is_string() &&
        ju["channel"].get<std::string>() == "random") {
      random = true;
    } else if (ju.contains("channel_gain_db")) {
      u.channel_gain = db_to_linear(ju["channel_gain_db"].get<double>());
    } else if (!ju.contains("fixed_rate_samples_per_s")) {
      throw Error(Status::invalid_input,
                  "user " + u.user_id +
                      ": needs channel_gain_db, channel:\"random\" or a fixed rate");
    }
    if (ju.contains("fixed_rate_samples_per_s")) {
      u.fixed_rate = ju["fixed_rate_samples_per_s"].get<double>() * u.bits_per_sample;
    }
    s.users.push_back(u);
    tmpl.random_channel.push_back(random);
  }

  for (const json& jt : j["tasks"]) {
    LearningErrorModel t;
    t.task_id = require_string(jt, "id", "task");
    t.a = require_number(jt, "a", "task " + t.task_id);
    t.b = require_number(jt, "b", "task " + t.task_id);
    t.c = require_number(jt, "c", "task " + t.task_id);
    if (!jt.contains("users") || !jt["users"].is_array()) {
      throw Error(Status::invalid_input, "task " + t.task_id + ": missing users array");
    }
    for (const json& uid : jt["users"]) t.users.push_back(uid.get<std::string>());
    s.tasks.push_back(std::move(t));
  }

  s.allow_overlapping_groups = j.value("allow_overlapping_groups", false);
  validate_scenario(s);
  return tmpl;
}

Scenario parse_scenario(const std::string& text) {
  const json j = parse_text(text, "scenario");
  ScenarioTemplate tmpl;
  try {
    tmpl = parse_scenario_template(j);
  } catch (const json::exception& e) {
    throw Error(Status::invalid_input, std::string("scenario: ") + e.what());
  }
  for (size_t k = 0; k < tmpl.random_channel.size(); ++k) {
    if (tmpl.random_channel[k]) {
      throw Error(Status::invalid_input,
                  "user " + tmpl.base.users[k].user_id +
                      ": random channels are only available under the sweep "
                      "harness, which owns the seeding");
    }
  }
  return tmpl.base;
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "dcp") return Scheme::dcp;
  if (name == "ranking") return Scheme::ranking;
  if (name == "time_fair") return Scheme::time_fair;
  if (name == "throughput_fair") return Scheme::throughput_fair;
  if (name == "dcp_imperfect") return Scheme::dcp_imperfect;
  throw Error(Status::invalid_input, "unknown scheme: " + name);
}

static SweepConfig parse_sweep_config_checked(const json& j);

SweepConfig parse_sweep_config(const std::string& text) {
  const json j = parse_text(text, "sweep config");
  if (!j.contains("scenario") || !j.contains("sweep")) {
    throw Error(Status::invalid_input, "sweep config: needs scenario and sweep sections");
  }
  try {
    return parse_sweep_config_checked(j);
  } catch (const json::exception& e) {
    throw Error(Status::invalid_input, std::string("sweep config: ") + e.what());
  }
}

static SweepConfig parse_sweep_config_checked(const json& j) {
  SweepConfig config;
  config.tmpl = parse_scenario_template(j["scenario"]);

  const json& sweep = j["sweep"];
  const std::string param = require_string(sweep, "parameter", "sweep");
  if (param == "e_max") {
    config.parameter = SweepParameter::e_max;
  } else if (param == "t_max") {
    config.parameter = SweepParameter::t_max;
  } else if (param == "k_users") {
    config.parameter = SweepParameter::k_users;
  } else {
    throw Error(Status::invalid_input, "sweep: unknown parameter '" + param + "'");
  }
  if (!sweep.contains("values") || !sweep["values"].is_array()) {
    throw Error(Status::invalid_input, "sweep: missing values array");
  }
  for (const json& v : sweep["values"]) config.values.push_back(v.get<double>());
  if (sweep.contains("paired_p_max_w")) {
    for (const json& v : sweep["paired_p_max_w"]) {
      config.paired_p_max.push_back(v.get<double>());
    }
  }

  config.monte_carlo_runs = j.value("monte_carlo_runs", 1);
  config.seed = j.value("seed", uint64_t{0});
  if (j.contains("schemes")) {
    for (const json& name : j["schemes"]) {
      config.schemes.push_back(scheme_from_name(name.get<std::string>()));
    }
  }
  config.perturb_fraction = j.value("perturb_fraction", 0.1);
  config.epsilon = j.value("epsilon", 1e-9);
  config.outer_tol = j.value("outer_tol", 1e-6);
  config.max_outer = j.value("max_outer", 100);
  validate_sweep_config(config);
  return config;
}

namespace {

// The simulated collection setup behind fig2a/fig2b/k4_vs_k6: one image task
// fed by large-sample users and one digit task fed by three light users.
constexpr const char* kFig2a = R"json({
  "scenario": {
    "radio": {"bandwidth_hz": 180000, "noise_psd_dbm_hz": -130, "alpha": 1.0, "pathloss_db": -90},
    "budgets": {"t_max_s": 50, "e_max_j": 1.0, "p_max_w": 0.06},
    "users": [
      {"id": "u1", "channel": "random", "bits_per_sample": 6276, "dataset_size": 6000},
      {"id": "u2", "channel": "random", "bits_per_sample": 324, "dataset_size": 3000},
      {"id": "u3", "channel": "random", "bits_per_sample": 324, "dataset_size": 3000},
      {"id": "u4", "channel": "random", "bits_per_sample": 324, "dataset_size": 3000}
    ],
    "tasks": [
      {"id": "cnn", "a": 7.3, "b": 0.69, "c": 300, "users": ["u1"]},
      {"id": "svm", "a": 6.24, "b": 0.72, "c": 200, "users": ["u2", "u3", "u4"]}
    ]
  },
  "sweep": {"parameter": "e_max", "values": [0.5, 1.0, 1.5, 2.0],
            "paired_p_max_w": [0.03, 0.06, 0.09, 0.12]},
  "monte_carlo_runs": 10,
  "seed": 12345,
  "schemes": ["dcp", "dcp_imperfect", "time_fair", "throughput_fair"],
  "perturb_fraction": 0.1
})json";

constexpr const char* kFig2b = R"json({
  "scenario": {
    "radio": {"bandwidth_hz": 180000, "noise_psd_dbm_hz": -130, "alpha": 1.0, "pathloss_db": -90},
    "budgets": {"t_max_s": 50, "e_max_j": 10.0, "p_max_w": 0.03},
    "users": [
      {"id": "u1", "channel": "random", "bits_per_sample": 6276, "dataset_size": 6000},
      {"id": "u2", "channel": "random", "bits_per_sample": 324, "dataset_size": 3000},
      {"id": "u3", "channel": "random", "bits_per_sample": 324, "dataset_size": 3000},
      {"id": "u4", "channel": "random", "bits_per_sample": 324, "dataset_size": 3000}
    ],
    "tasks": [
      {"id": "cnn", "a": 7.3, "b": 0.69, "c": 300, "users": ["u1"]},
      {"id": "svm", "a": 6.24, "b": 0.72, "c": 200, "users": ["u2", "u3", "u4"]}
    ]
  },
  "sweep": {"parameter": "t_max", "values": [25, 50, 75, 100]},
  "monte_carlo_runs": 10,
  "seed": 12345,
  "schemes": ["ranking", "time_fair", "throughput_fair"]
})json";

constexpr const char* kK4VsK6 = R"json({
  "scenario": {
    "radio": {"bandwidth_hz": 180000, "noise_psd_dbm_hz": -130, "alpha": 1.0, "pathloss_db": -90},
    "budgets": {"t_max_s": 50, "e_max_j": 10.0, "p_max_w": 0.03},
    "users": [
      {"id": "u1", "channel": "random", "bits_per_sample": 6276, "dataset_size": 6000},
      {"id": "u2", "channel": "random", "bits_per_sample": 324, "dataset_size": 3000},
      {"id": "u3", "channel": "random", "bits_per_sample": 324, "dataset_size": 3000},
      {"id": "u4", "channel": "random", "bits_per_sample": 324, "dataset_size": 3000},
      {"id": "u5", "channel": "random", "bits_per_sample": 6276, "dataset_size": 6000},
      {"id": "u6", "channel": "random", "bits_per_sample": 6276, "dataset_size": 6000}
    ],
    "tasks": [
      {"id": "cnn", "a": 7.3, "b": 0.69, "c": 300, "users": ["u1", "u5", "u6"]},
      {"id": "svm", "a": 6.24, "b": 0.72, "c": 200, "users": ["u2", "u3", "u4"]}
    ]
  },
  "sweep": {"parameter": "k_users", "values": [4, 6]},
  "monte_carlo_runs": 10,
  "seed": 12345,
  "schemes": ["ranking", "time_fair"]
})json";

// Fixed-rate point-cloud collection: two vehicles at 10 samples/s, 16 s total.
constexpr const char* kVehicularScenario = R"json({
  "radio": {"bandwidth_hz": 180000, "noise_psd_dbm_hz": -130, "alpha": 1.0},
  "budgets": {"t_max_s": 16, "e_max_j": 1.6, "p_max_w": 0.1},
  "users": [
    {"id": "vehicle1", "fixed_rate_samples_per_s": 10, "bits_per_sample": 500000, "dataset_size": 200},
    {"id": "vehicle2", "fixed_rate_samples_per_s": 10, "bits_per_sample": 500000, "dataset_size": 200}
  ],
  "tasks": [
    {"id": "sparse_traffic", "a": 3.95, "b": 0.5, "c": 0, "users": ["vehicle1"]},
    {"id": "dense_traffic", "a": 3.11, "b": 0.71, "c": 0, "users": ["vehicle2"]}
  ]
})json";

}  // namespace

std::vector<std::string> builtin_config_names() {
  return {"fig2a", "fig2b", "vehicular", "k4_vs_k6"};
}

std::string builtin_config(const std::string& name) {
  if (name == "fig2a") return kFig2a;
  if (name == "fig2b") return kFig2b;
  if (name == "k4_vs_k6") return kK4VsK6;
  if (name == "vehicular") {
    json j;
    j["scenario"] = parse_text(kVehicularScenario, "builtin");
    j["sweep"] = {{"parameter", "t_max"}, {"values", {16.0}}};
    j["monte_carlo_runs"] = 1;
    j["seed"] = 0;
    j["schemes"] = {"ranking", "time_fair"};
    return j.dump(2);
  }
  std::string names;
  for (const std::string& n : builtin_config_names()) {
    if (!names.empty()) names += ", ";
    names += n;
  }
  throw Error(Status::invalid_input,
              "unknown built-in config '" + name + "'; valid names: " + names);
}

json allocation_to_json(const Scenario& s, const Allocation& alloc) {
  const std::vector<double> floors = integer_samples(s, alloc);
  json users = json::array();
  for (size_t k = 0; k < s.users.size(); ++k) {
    users.push_back({{"id", s.users[k].user_id},
                     {"t_s", alloc.time[k]},
                     {"e_j", alloc.energy[k]},
                     {"bits", alloc.bits[k]},
                     {"samples", alloc.bits[k] / s.users[k].bits_per_sample},
                     {"samples_floored",
                      std::floor(alloc.bits[k] / s.users[k].bits_per_sample)}});
  }
  json tasks = json::array();
  for (size_t m = 0; m < s.tasks.size(); ++m) {
    const double v = alloc.samples[m];
    tasks.push_back({{"id", s.tasks[m].task_id},
                     {"samples", v},
                     {"samples_floored", floors[m]},
                     {"predicted_error",
                      v > 0 ? predicted_error(s.tasks[m], v) : -1.0}});
  }
  return json{{"objective", alloc.objective}, {"users", users}, {"tasks", tasks}};
}

std::string allocation_users_csv(const Scenario& s, const Allocation& alloc) {
  std::ostringstream oss;
  oss << "user,t_s,E_J,bits,samples\n";
  for (size_t k = 0; k < s.users.size(); ++k) {
    oss << s.users[k].user_id << ',' << fmt_g(alloc.time[k]) << ','
        << fmt_g(alloc.energy[k]) << ',' << fmt_g(alloc.bits[k]) << ','
        << fmt_g(std::floor(alloc.bits[k] / s.users[k].bits_per_sample)) << '\n';
  }
  return oss.str();
}

json summary_to_json(const MonteCarloSummary& summary) {
  json cells = json::array();
  for (const SummaryCell& cell : summary.cells) {
    json runs = json::array();
    for (const CellRun& r : cell.runs) {
      json jr{{"status", static_cast<int>(r.status)}, {"objective", r.objective},
              {"samples", r.samples}};
      if (r.status != Status::ok) jr["error"] = r.error;
      runs.push_back(std::move(jr));
    }
    cells.push_back({{"value", cell.value},
                     {"scheme", scheme_name(cell.scheme)},
                     {"skipped", cell.skipped},
                     {"notice", cell.notice},
                     {"runs_ok", cell.runs_ok},
                     {"mean_objective", cell.mean_objective},
                     {"std_objective", cell.std_objective},
                     {"mean_samples", cell.mean_samples},
                     {"runs", std::move(runs)}});
  }
  return json{{"parameter", sweep_parameter_name(summary.parameter)},
              {"seed", summary.seed},
              {"task_ids", summary.task_ids},
              {"cells", std::move(cells)}};
}

std::string summary_to_csv(const MonteCarloSummary& summary) {
  std::ostringstream oss;
  oss << "sweep_parameter,sweep_value,scheme,status,runs_ok,mean_objective,std_objective";
  for (const std::string& id : summary.task_ids) oss << ",mean_samples_" << id;
  oss << '\n';
  for (const SummaryCell& cell : summary.cells) {
    oss << sweep_parameter_name(summary.parameter) << ',' << fmt_g(cell.value) << ','
        << scheme_name(cell.scheme) << ',';
    if (cell.skipped) {
      oss << "skipped";
    } else if (cell.runs_ok < static_cast<int>(cell.runs.size())) {
      oss << "partial";
    } else {
      oss << "ok";
    }
    oss << ',' << cell.runs_ok << ',';
    if (cell.runs_ok > 0) {
      oss << fmt_g(cell.mean_objective) << ',' << fmt_g(cell.std_objective);
      for (double v : cell.mean_samples) oss << ',' << fmt_g(v);
    } else {
      oss << ',';
      for (size_t m = 0; m < summary.task_ids.size(); ++m) oss << ',';
    }
    oss << '\n';
  }
  return oss.str();
}

json vehicular_report_to_json(const VehicularReport& report) {
  return json{
      {"optimized",
       {{"allocation", allocation_to_json(report.scenario, report.optimized)},
        {"samples_floored", report.optimized_samples}}},
      {"equal_time",
       {{"allocation", allocation_to_json(report.scenario, report.equal_time)},
        {"samples_floored", report.equal_samples}}}};
}

}  // namespace edgealloc
