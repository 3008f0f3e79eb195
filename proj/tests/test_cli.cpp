// End-to-end checks of the installed command-line tool: spawns the real
// binary and inspects exit codes, stdout and emitted files.
#include <cstdio>
#include <cstdlib>
#include <doctest.h>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

#ifndef EDGEALLOC_CLI
#error "EDGEALLOC_CLI must point at the built binary"
#endif
#ifndef EDGEALLOC_DATA_DIR
#error "EDGEALLOC_DATA_DIR must point at the bundled data"
#endif

namespace {

struct CliRun {
  int exit_code = -1;
  std::string output;  // stdout only
};

CliRun run_cli(const std::string& args) {
  CliRun result;
  const std::string cmd = std::string(EDGEALLOC_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.output.append(buf, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string data_path(const std::string& name) {
  return std::string(EDGEALLOC_DATA_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/edgealloc_test_" + name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  REQUIRE(out.good());
  return path;
}

}  // namespace

TEST_CASE("fit prints the fitted parameters for the bundled curves") {
  const CliRun cnn = run_cli("fit " + data_path("cnn_points.csv"));
  CHECK(cnn.exit_code == 0);
  CHECK(cnn.output.find("a=7.42779") != std::string::npos);
  CHECK(cnn.output.find("b=0.69359") != std::string::npos);

  const CliRun svm = run_cli("fit " + data_path("svm_points.csv"));
  CHECK(svm.exit_code == 0);
  CHECK(svm.output.find("a=5.23717") != std::string::npos);
  CHECK(svm.output.find("b=0.722046") != std::string::npos);
}

TEST_CASE("fit rejects malformed input with exit code 2") {
  CHECK(run_cli("fit /nonexistent/points.csv").exit_code == 2);
  const std::string empty = temp_file("empty.csv", "");
  CHECK(run_cli("fit " + empty).exit_code == 2);
  const std::string junk = temp_file("junk.csv", "v,err\n10,not_a_number\n");
  CHECK(run_cli("fit " + junk).exit_code == 2);
  const std::string bad_header = temp_file("head.csv", "x,y\n10,0.5\n");
  CHECK(run_cli("fit " + bad_header).exit_code == 2);
}

TEST_CASE("solve emits the allocation as JSON plus per-user CSV") {
  const CliRun run = run_cli("solve " + data_path("vehicular.json") +
                             " --method ranking --out /tmp/edgealloc_test_veh");
  CHECK(run.exit_code == 0);
  const std::string csv = read_file("/tmp/edgealloc_test_veh.csv");
  CHECK(csv.rfind("user,t_s,E_J,bits,samples", 0) == 0);
  CHECK(csv.find("vehicle1,13.7") != std::string::npos);
  CHECK(csv.find("vehicle2,2.2") != std::string::npos);

  const json report = json::parse(read_file("/tmp/edgealloc_test_veh.json"));
  CHECK(report["tool"] == "edgealloc");
  CHECK(report["version"].is_string());
  CHECK(report.contains("seed"));
  CHECK(report["result"]["objective"].get<double>() ==
        doctest::Approx(0.337282764648).epsilon(1e-6));
  // lossless round-trip
  CHECK(json::parse(report.dump()) == report);
}

TEST_CASE("solve without --out streams the report and CSV to stdout") {
  const CliRun run =
      run_cli("solve " + data_path("vehicular.json") + " --method time-fair");
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("\"objective\"") != std::string::npos);
  CHECK(run.output.find("user,t_s,E_J,bits,samples") != std::string::npos);
  CHECK(run.output.find("vehicle1,8,") != std::string::npos);
}

TEST_CASE("time fairness splits a 60 s window in half via the CLI") {
  json scenario = json::parse(read_file(data_path("vehicular.json")));
  scenario["budgets"]["t_max_s"] = 60;
  scenario["budgets"]["e_max_j"] = 6.0;
  scenario["users"][0]["dataset_size"] = 1e6;
  scenario["users"][1]["dataset_size"] = 1e6;
  const std::string path = temp_file("sixty.json", scenario.dump());
  const CliRun run = run_cli("solve " + path + " --method time-fair");
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("vehicle1,30,") != std::string::npos);
  CHECK(run.output.find("vehicle2,30,") != std::string::npos);
}

TEST_CASE("solve maps failures onto documented exit codes") {
  CHECK(run_cli("solve /missing.json --method ranking").exit_code == 2);

  json ineligible = json::parse(read_file(data_path("vehicular.json")));
  ineligible["budgets"]["e_max_j"] = 0.1;
  const std::string path = temp_file("inel.json", ineligible.dump());
  CHECK(run_cli("solve " + path + " --method ranking").exit_code == 3);

  json infeasible = json::parse(read_file(data_path("vehicular.json")));
  infeasible["users"][0]["dataset_size"] = 0.5;
  const std::string path2 = temp_file("infe.json", infeasible.dump());
  CHECK(run_cli("solve " + path2 + " --method ranking").exit_code == 4);

  // random channels cannot be solved directly
  json random_channels = json::parse(read_file(data_path("fig2a.json")));
  const std::string path3 =
      temp_file("rand.json", random_channels["scenario"].dump());
  CHECK(run_cli("solve " + path3 + " --method dcp").exit_code == 2);
}

TEST_CASE("sweep with a fixed seed is byte-identical across invocations") {
  const CliRun first = run_cli("sweep fig2b --seed 7");
  const CliRun second = run_cli("sweep fig2b --seed 7");
  CHECK(first.exit_code == 0);
  CHECK(first.output == second.output);
  CHECK(first.output.find("sweep_parameter,sweep_value,scheme,") == 0);

  const CliRun reseeded = run_cli("sweep fig2b --seed 8");
  CHECK(reseeded.output != first.output);
}

TEST_CASE("sweep accepts config files and rejects unknown names") {
  const CliRun unknown = run_cli("sweep not_a_config");
  CHECK(unknown.exit_code == 2);

  const CliRun from_file = run_cli("sweep " + data_path("fig2b.json"));
  const CliRun from_name = run_cli("sweep fig2b");
  CHECK(from_file.exit_code == 0);
  CHECK(from_file.output == from_name.output);
}

TEST_CASE("reproduce vehicular prints the sample-count table") {
  const CliRun run = run_cli("reproduce vehicular --out /tmp/edgealloc_test_repro");
  CHECK(run.exit_code == 0);
  CHECK(run.output.find(",137,22") != std::string::npos);
  CHECK(run.output.find(",80,80") != std::string::npos);

  const json report = json::parse(read_file("/tmp/edgealloc_test_repro.json"));
  CHECK(report["command"] == "reproduce");
  CHECK(report["reproduction"]["optimized"]["samples_floored"][0].get<double>() ==
        137.0);
  // emitted CSV equals the streamed one
  CHECK(read_file("/tmp/edgealloc_test_repro.csv") == run.output);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("solve").exit_code == 2);
  CHECK(run_cli("solve x.json").exit_code == 2);  // --method missing
}
