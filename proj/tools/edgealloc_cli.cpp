// Command-line front end over the C API: scenario solving, learning-curve
// fitting, Monte-Carlo sweeps and the built-in reproduction scenarios.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgealloc/edgealloc.h"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitInput = 2;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string take_string(ea_status (*fn)(const ea_summary*, char**), const ea_summary* s) {
  char* raw = nullptr;
  if (fn(s, &raw) != EA_OK) return {};
  std::string out = raw;
  ea_string_free(raw);
  return out;
}

bool read_file(const std::string& path, std::string* out, std::string* error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    *error = "cannot read file: " + path;
    return false;
  }
  std::ostringstream oss;
  oss << in.rdbuf();
  *out = oss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& content, std::string* error) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    *error = "cannot write file: " + path;
    return false;
  }
  out << content;
  return out.good();
}

int fail_status(ea_status status, const std::string& context) {
  std::cerr << "edgealloc: " << context << ": " << ea_last_error() << "\n";
  return static_cast<int>(status);
}

json run_report_base(const std::string& command, const std::vector<std::string>& argv,
                     uint64_t seed) {
  json report;
  report["tool"] = "edgealloc";
  report["version"] = ea_version();
  report["command"] = command;
  report["argv"] = argv;
  report["seed"] = seed;
  return report;
}

int emit_report(const json& report, const std::string& csv, const std::string& out_base) {
  if (!out_base.empty()) {
    std::string error;
    if (!write_file(out_base + ".json", report.dump(2) + "\n", &error) ||
        (!csv.empty() && !write_file(out_base + ".csv", csv, &error))) {
      std::cerr << "edgealloc: " << error << "\n";
      return kExitInput;
    }
  }
  return 0;
}

// ---- fit ----

struct FitArgs {
  std::string csv_path;
  std::string out_base;
  double tol = 0.0;
  int max_iter = 0;
  bool multistart = false;
  uint64_t seed = 0;  // echoed in the report; fitting itself is deterministic
};

int parse_points_csv(const std::string& text, std::vector<double>* v,
                     std::vector<double>* err, std::string* error) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "v,err") {
        *error = "line " + std::to_string(line_no) + ": expected header 'v,err'";
        return kExitInput;
      }
      header_seen = true;
      continue;
    }
    double a = 0, b = 0;
    char extra = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf%c", &a, &b, &extra) != 2) {
      *error = "line " + std::to_string(line_no) + ": expected 'v,err' numbers, got '" +
               line + "'";
      return kExitInput;
    }
    v->push_back(a);
    err->push_back(b);
  }
  if (!header_seen || v->empty()) {
    *error = "no data rows found";
    return kExitInput;
  }
  return 0;
}

int cmd_fit(const FitArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = Clock::now();
  std::string text, error;
  if (!read_file(args.csv_path, &text, &error)) {
    std::cerr << "edgealloc: " << error << "\n";
    return kExitInput;
  }
  std::vector<double> v, err;
  if (int rc = parse_points_csv(text, &v, &err, &error); rc != 0) {
    std::cerr << "edgealloc: " << args.csv_path << ": " << error << "\n";
    return rc;
  }
  const double load_ms = ms_since(t0);

  const auto t1 = Clock::now();
  ea_fit_result fit{};
  const ea_status status =
      ea_fit_power_law(v.data(), err.data(), static_cast<int>(v.size()), args.tol,
                       args.max_iter, args.multistart ? 1 : 0, &fit);
  if (status != EA_OK) return fail_status(status, "fit");
  const double solve_ms = ms_since(t1);

  std::cout << "a=" << fit.a << " b=" << fit.b << " residual_sse=" << fit.residual_sse
            << " iterations=" << fit.iterations << "\n";

  json report = run_report_base("fit", argv, args.seed);
  report["config"] = {{"input", args.csv_path},
                      {"points", {{"v", v}, {"err", err}}},
                      {"multistart", args.multistart}};
  report["result"] = {{"a", fit.a},
                      {"b", fit.b},
                      {"residual_sse", fit.residual_sse},
                      {"iterations", fit.iterations}};
  report["timing_ms"] = {{"load", load_ms}, {"solve", solve_ms}};
  return emit_report(report, "", args.out_base);
}

// ---- solve ----

struct SolveArgs {
  std::string scenario_path;
  std::string method;
  std::string out_base;
  double epsilon = 0.0;
  double outer_tol = 0.0;
  int max_outer = 0;
  uint64_t seed = 0;  // echoed in the report; solving is deterministic
};

int cmd_solve(const SolveArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = Clock::now();
  std::string text, error;
  if (!read_file(args.scenario_path, &text, &error)) {
    std::cerr << "edgealloc: " << error << "\n";
    return kExitInput;
  }
  ea_scenario* scenario = nullptr;
  if (ea_status st = ea_scenario_parse(text.c_str(), &scenario); st != EA_OK) {
    return fail_status(st, args.scenario_path);
  }
  const double load_ms = ms_since(t0);

  const auto t1 = Clock::now();
  ea_solve_options options{args.method.c_str(), args.epsilon, args.outer_tol,
                           args.max_outer};
  ea_result* result = nullptr;
  const ea_status st = ea_solve(scenario, &options, &result);
  ea_scenario_free(scenario);
  if (st != EA_OK) return fail_status(st, "solve");
  const double solve_ms = ms_since(t1);

  char* raw_json = nullptr;
  char* raw_csv = nullptr;
  ea_result_report_json(result, &raw_json);
  ea_result_users_csv(result, &raw_csv);
  const json result_json = json::parse(raw_json);
  const std::string csv = raw_csv;
  ea_string_free(raw_json);
  ea_string_free(raw_csv);
  ea_result_free(result);

  json report = run_report_base("solve", argv, args.seed);
  report["config"] = json::parse(text);
  report["result"] = result_json;
  report["timing_ms"] = {{"load", load_ms}, {"solve", solve_ms}};

  if (args.out_base.empty()) {
    std::cout << report.dump(2) << "\n\n" << csv;
  } else {
    std::cout << "objective=" << result_json["objective"].dump() << "\n";
  }
  return emit_report(report, csv, args.out_base);
}

// ---- sweep / reproduce ----

struct SweepArgs {
  std::string name_or_path;
  std::string out_base;
  int64_t seed = -1;
};

int cmd_sweep(const char* command, const SweepArgs& args,
              const std::vector<std::string>& argv) {
  const auto t0 = Clock::now();
  std::string config_text;
  char* builtin = nullptr;
  if (ea_builtin_config(args.name_or_path.c_str(), &builtin) == EA_OK) {
    config_text = builtin;
    ea_string_free(builtin);
  } else {
    const std::string builtin_error = ea_last_error();
    std::string error;
    if (!read_file(args.name_or_path, &config_text, &error)) {
      std::cerr << "edgealloc: " << args.name_or_path << " is neither a built-in ("
                << builtin_error << ") nor a readable file\n";
      return kExitInput;
    }
  }
  const double load_ms = ms_since(t0);

  const auto t1 = Clock::now();
  ea_summary* summary = nullptr;
  if (ea_status st = ea_sweep_run(config_text.c_str(), args.seed, &summary); st != EA_OK) {
    return fail_status(st, command);
  }
  const double solve_ms = ms_since(t1);

  const std::string csv = take_string(&ea_summary_csv, summary);
  char* raw_json = nullptr;
  ea_summary_json(summary, &raw_json);
  const json summary_json = json::parse(raw_json);
  ea_string_free(raw_json);
  ea_summary_free(summary);

  std::cout << csv;

  json report = run_report_base(command, argv, summary_json["seed"].get<uint64_t>());
  report["config"] = json::parse(config_text);
  report["result"] = summary_json;
  if (args.name_or_path == "vehicular") {
    char* raw_vehicular = nullptr;
    if (ea_reproduce_vehicular(&raw_vehicular) == EA_OK) {
      report["reproduction"] = json::parse(raw_vehicular);
      ea_string_free(raw_vehicular);
    }
  }
  report["timing_ms"] = {{"load", load_ms}, {"solve", solve_ms}};
  return emit_report(report, csv, args.out_base);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TDMA time/energy allocation for edge learning tasks"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "fit a*v^-b to (v, err) points from CSV");
  fit->add_option("csv", fit_args.csv_path, "input CSV with header v,err")->required();
  fit->add_option("--tol", fit_args.tol, "gradient norm tolerance (default 1e-10)");
  fit->add_option("--max-iter", fit_args.max_iter, "iteration cap (default 500)");
  fit->add_flag("--multistart", fit_args.multistart, "try 8 jittered starts");
  fit->add_option("--out", fit_args.out_base, "write <out>.json report");
  fit->add_option("--seed", fit_args.seed, "echoed in the report");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "solve one scenario");
  solve->add_option("scenario", solve_args.scenario_path, "scenario JSON path")->required();
  solve->add_option("--method", solve_args.method,
                    "ranking | dcp | time-fair | throughput-fair")
      ->required();
  solve->add_option("--epsilon", solve_args.epsilon, "ranking bisection tolerance");
  solve->add_option("--outer-tol", solve_args.outer_tol, "dcp outer tolerance");
  solve->add_option("--max-outer", solve_args.max_outer, "dcp outer iteration cap");
  solve->add_option("--out", solve_args.out_base, "write <out>.json and <out>.csv");
  solve->add_option("--seed", solve_args.seed, "echoed in the report");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep");
  sweep->add_option("config", sweep_args.name_or_path,
                    "built-in name (fig2a, fig2b, vehicular, k4_vs_k6) or JSON path")
      ->required();
  sweep->add_option("--seed", sweep_args.seed, "override the config seed");
  sweep->add_option("--out", sweep_args.out_base, "write <out>.json and <out>.csv");

  SweepArgs repro_args;
  CLI::App* repro = app.add_subcommand("reproduce", "run a built-in reproduction");
  repro->add_option("name", repro_args.name_or_path,
                    "built-in name (vehicular, k4_vs_k6, fig2a, fig2b) or JSON path")
      ->required();
  repro->add_option("--seed", repro_args.seed, "override the config seed");
  repro->add_option("--out", repro_args.out_base, "write <out>.json and <out>.csv");

  std::vector<std::string> argv_echo(argv, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_args, argv_echo);
    if (solve->parsed()) return cmd_solve(solve_args, argv_echo);
    if (sweep->parsed()) return cmd_sweep("sweep", sweep_args, argv_echo);
    if (repro->parsed()) return cmd_sweep("reproduce", repro_args, argv_echo);
  } catch (const std::exception& e) {
    std::cerr << "edgealloc: " << e.what() << "\n";
    return static_cast<int>(EA_ERROR_SOLVER_FAILURE);
  }
  return kExitInput;
}
