#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef MOLOPT_CLI_PATH
#define MOLOPT_CLI_PATH "molopt"
#endif
#ifndef MOLOPT_SOURCE_DIR
#define MOLOPT_SOURCE_DIR "."
#endif

namespace {

struct CommandResult {
  int status = -1;
  std::string output;  // stdout and stderr combined
};

CommandResult run_command(const std::string& args) {
  std::string cmd = std::string(MOLOPT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  char buffer[4096];
  while (std::size_t n = fread(buffer, 1, sizeof(buffer), pipe))
    result.output.append(buffer, n);
  int rc = pclose(pipe);
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

std::string data_path(const std::string& rel) {
  return std::string(MOLOPT_SOURCE_DIR) + "/data/" + rel;
}

void write_mock(const std::string& path) {
  std::ofstream out(path);
  out << R"({"reason": "start", "smiles": "O=C1c2c(O)cc(O)cc2OC(=C1O)c1ccc(O)c(O)c1"})" << "\n";
  out << R"({"reason": "methylate", "smiles": "O=C1c2c(OC)cc(O)cc2OC(=C1O)c1ccc(O)c(O)c1"})" << "\n";
  out << R"({"reason": "third", "smiles": "CCO"})" << "\n";
  out << "scripted summary line" << "\n";
  // extra replies so several repetitions can replay the same script
  for (int i = 0; i < 12; ++i)
    out << R"({"reason": "pad", "smiles": "CCO"})" << "\n";
}

std::string strip_wall_times_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto parsed = nlohmann::json::parse(line);
    parsed.erase("wall_time_ms");
    out << parsed.dump() << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("run: single repetition against the scripted mock") {
  write_mock("/tmp/molopt_cli_mock.txt");
  auto r = run_command("run --task " + data_path("tasks/sim_qed_quercetin.task") +
                       " --budget 3 --mock-script /tmp/molopt_cli_mock.txt"
                       " --out /tmp/molopt_cli_run1 --seed 5");
  CHECK(r.status == 0);
  CHECK(r.output.find("rep 0: 3 iterations") != std::string::npos);
  std::ifstream file("/tmp/molopt_cli_run1/sim_qed_quercetin_full_explanation_rep0.jsonl");
  CHECK(file.good());
}

TEST_CASE("run: repetitions write distinct seeds") {
  write_mock("/tmp/molopt_cli_mock.txt");
  auto r = run_command("run --task " + data_path("tasks/sim_qed_quercetin.task") +
                       " --budget 2 --reps 3 --jobs 2 --mock-script /tmp/molopt_cli_mock.txt"
                       " --out /tmp/molopt_cli_run3 --seed 100");
  CHECK(r.status == 0);
  std::set<unsigned> seeds;
  for (int rep = 0; rep < 3; ++rep) {
    std::ifstream file("/tmp/molopt_cli_run3/sim_qed_quercetin_full_explanation_rep" +
                       std::to_string(rep) + ".jsonl");
    REQUIRE(file.good());
    std::string header;
    std::getline(file, header);
    seeds.insert(nlohmann::json::parse(header)["seed"].get<unsigned>());
  }
  CHECK(seeds == std::set<unsigned>{100, 101, 102});
}

TEST_CASE("run: identical config and script give identical outputs modulo timestamps") {
  write_mock("/tmp/molopt_cli_mock.txt");
  std::string base = "run --task " + data_path("tasks/sim_qed_quercetin.task") +
                     " --budget 3 --mock-script /tmp/molopt_cli_mock.txt --seed 9 --out ";
  CHECK(run_command(base + "/tmp/molopt_cli_det_a").status == 0);
  CHECK(run_command(base + "/tmp/molopt_cli_det_b").status == 0);
  CHECK(strip_wall_times_file(
            "/tmp/molopt_cli_det_a/sim_qed_quercetin_full_explanation_rep0.jsonl") ==
        strip_wall_times_file(
            "/tmp/molopt_cli_det_b/sim_qed_quercetin_full_explanation_rep0.jsonl"));
}

TEST_CASE("run: a missing oracle resource is named and exits nonzero") {
  {
    std::ofstream task("/tmp/molopt_cli_broken.task");
    task << "task_id = broken\n";
    task << "objective = constrained_potency\n";
    task << "direction = minimize\n";
    task << "predictor_file = " << data_path("predictor_demo.txt") << "\n";
    task << "novelty_file = /nonexistent/registry.smi\n";
    task << "description = minimize the score\n";
  }
  write_mock("/tmp/molopt_cli_mock.txt");
  auto r = run_command(
      "run --task /tmp/molopt_cli_broken.task --mock-script /tmp/molopt_cli_mock.txt"
      " --out /tmp/molopt_cli_broken_out");
  CHECK(r.status != 0);
  CHECK(r.output.find("/nonexistent/registry.smi") != std::string::npos);
}

TEST_CASE("replay: synthetic perfect traces") {
  // one constant-1.0 trace
  {
    std::ofstream out("/tmp/molopt_cli_perfect.jsonl");
    out << R"({"schema": "molopt-trace-v1", "task_id": "perfect", "budget": 50})" << "\n";
    for (int i = 1; i <= 50; ++i)
      out << R"({"iteration": )" << i << R"(, "smiles": "CCO", "score": 1.0})" << "\n";
  }
  auto r = run_command("replay /tmp/molopt_cli_perfect.jsonl --budgets 50 --k 1");
  CHECK(r.status == 0);
  CHECK(r.output.find("top1_auc@50=1.0000") != std::string::npos);

  // 23 perfect tasks aggregate to a sum of 23
  std::string paths;
  for (int t = 0; t < 23; ++t) {
    std::string path = "/tmp/molopt_cli_task" + std::to_string(t) + ".jsonl";
    std::ofstream out(path);
    out << R"({"schema": "molopt-trace-v1", "task_id": "task)" << t << R"(", "budget": 50})"
        << "\n";
    for (int i = 1; i <= 50; ++i)
      out << R"({"iteration": )" << i << R"(, "smiles": "CCO", "score": 1.0})" << "\n";
    paths += " " + path;
  }
  r = run_command("replay" + paths + " --budgets 50 --k 1 --out /tmp/molopt_cli_report.tsv");
  CHECK(r.status == 0);
  CHECK(r.output.find("sum top1_auc@50 = 23.0000") != std::string::npos);
  std::ifstream table("/tmp/molopt_cli_report.tsv");
  std::string header;
  std::getline(table, header);
  CHECK(header == "scope\ttask_id\tmetric\tvalue\tlower\tupper");
}

TEST_CASE("explain: quercetin pair prints the two-section key diff") {
  auto r = run_command("explain --smiles \"O=C1c2c(OC)cc(O)cc2OC(=C1OC)c3ccc(OC)cc3\" --task " +
                       data_path("tasks/sim_qed_quercetin.task"));
  CHECK(r.status == 0);
  CHECK(r.output.find("present in TARGET but not in QUERY") != std::string::npos);
  CHECK(r.output.find("Key 53:") != std::string::npos);
  CHECK(r.output.find("Key 160: [C;H3,H4]") != std::string::npos);
  CHECK(r.output.find("Weighted log contributions") != std::string::npos);
}

TEST_CASE("explain: benzene via the qed task prints eight contribution lines") {
  auto r = run_command("explain --smiles c1ccccc1 --task " + data_path("tasks/qed.task"));
  CHECK(r.status == 0);
  int lines = 0;
  for (const char* name : {"MW: ", "ALOGP: ", "HBA: ", "HBD: ", "PSA: ", "ROTB: ",
                           "AROM: ", "ALERTS: "})
    if (r.output.find(name) != std::string::npos) ++lines;
  CHECK(lines == 8);
}

TEST_CASE("explain: invalid SMILES exits nonzero with a position") {
  auto r = run_command("explain --smiles \"C(\" --task " + data_path("tasks/qed.task"));
  CHECK(r.status != 0);
  CHECK(r.output.find("position 2") != std::string::npos);
}
