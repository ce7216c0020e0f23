#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "molopt/agent.hpp"
#include "molopt/harness.hpp"

using namespace molopt;

namespace {

struct RunFlags {
  std::string task_file;
  std::string mode;
  int budget = 0;       // 0 = keep the task's
  int repetitions = 1;
  unsigned seed = 1;
  std::string mock_script;
  int jobs = 1;
  std::string out_dir = ".";
  std::string endpoint_env = "MOLOPT_LLM_ENDPOINT";
  std::string api_key_env = "MOLOPT_LLM_API_KEY";
  std::string model;
  double temperature = -1.0;
  double top_p = -1.0;
  int max_tokens = 0;
};

std::unique_ptr<LlmClient> make_client(const RunFlags& flags) {
  if (!flags.mock_script.empty())
    return std::make_unique<ScriptedMockClient>(ScriptedMockClient::from_file(flags.mock_script));
  HttpChatClient::Config config;
  const char* endpoint = std::getenv(flags.endpoint_env.c_str());
  if (!endpoint || !*endpoint)
    throw std::runtime_error("environment variable " + flags.endpoint_env +
                             " is not set and no --mock-script was given");
  config.endpoint = endpoint;
  if (const char* key = std::getenv(flags.api_key_env.c_str()); key) config.api_key = key;
  config.model = flags.model;
  config.temperature = flags.temperature;
  config.top_p = flags.top_p;
  config.max_tokens = flags.max_tokens;
  return std::make_unique<HttpChatClient>(config);
}

int cmd_run(const RunFlags& flags) {
  TaskSpec spec = load_task(flags.task_file);
  if (!flags.mode.empty()) spec.mode = parse_info_mode(flags.mode);
  if (flags.budget > 0) spec.budget = flags.budget;

  std::filesystem::create_directories(flags.out_dir);

  std::mutex io_mutex;
  std::atomic<bool> failed{false};
  std::atomic<int> next_rep{0};

  auto worker = [&] {
    for (;;) {
      int rep = next_rep.fetch_add(1);
      if (rep >= flags.repetitions) return;
      try {
        auto oracle = make_oracle(spec);
        auto client = make_client(flags);
        AgentOptions options;
        options.log = &std::cerr;
        Trajectory traj = run(spec, *oracle, *client, options);
        traj.seed = flags.seed + static_cast<unsigned>(rep);

        std::string path = flags.out_dir + "/" + spec.task_id + "_" + to_string(spec.mode) +
                           "_rep" + std::to_string(rep) + ".jsonl";
        save_trajectory(traj, path);

        double fallback =
            spec.direction == Direction::Minimize ? kMinimizeFallbackNm : 0.0;
        auto scores = aggregates_per_call(traj, true);
        auto curve = best_so_far_curve(scores, spec.direction, fallback);
        const TrajectoryRecord* best = traj.best();

        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << "rep " << rep << ": " << traj.records.size() << " iterations";
        if (best && best->outcome)
          std::cout << ", best " << best->outcome->aggregate << " at iteration "
                    << best->iteration;
        std::cout << ", top1 AUC@" << curve.budget << " " << auc(curve) << ", wrote " << path
                  << (traj.complete ? "" : " [incomplete]") << "\n";
        if (!traj.complete) failed = true;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "rep " << rep << " failed: " << e.what() << "\n";
        failed = true;
      }
    }
  };

  int workers = std::max(1, std::min(flags.jobs, flags.repetitions));
  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return failed ? 1 : 0;
}

int cmd_replay(const std::vector<std::string>& paths, std::vector<int> budgets,
               std::vector<int> ks, unsigned seed, const std::string& out_file) {
  ReplayOptions options;
  if (!budgets.empty()) options.budgets = std::move(budgets);
  if (!ks.empty()) options.ks = std::move(ks);
  options.seed = seed;
  MetricReport report = replay_metrics(paths, options);
  std::cout << render_report(report);
  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) {
      std::cerr << "cannot write report table: " << out_file << "\n";
      return 1;
    }
    out << report_table(report);
  }
  return report.errors.empty() ? 0 : 1;
}

int cmd_explain(const std::string& smiles, const std::string& task_file) {
  TaskSpec spec = load_task(task_file);
  spec.mode = InfoMode::FullExplanation;
  auto oracle = make_oracle(spec);
  Molecule molecule;
  try {
    molecule = parse_smiles(smiles);
  } catch (const SmilesError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  OracleOutcome outcome = oracle->evaluate(molecule);
  std::cout << "Score: " << outcome.aggregate << "\n";
  for (const auto& [name, value] : outcome.subscores)
    std::cout << "  " << name << ": " << value << "\n";
  std::string block = verbalize(outcome.explanations, InfoMode::FullExplanation);
  if (!block.empty()) std::cout << "\n" << block;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"molecular optimization agent harness"};
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run an optimization loop");
  run_cmd->add_option("--task", flags.task_file, "task file")->required();
  run_cmd->add_option("--mode", flags.mode,
                      "information mode override (no_description, no_explanation, "
                      "partial_explanation, full_explanation)");
  run_cmd->add_option("--budget", flags.budget, "iteration budget override");
  run_cmd->add_option("--reps", flags.repetitions, "independent repetitions");
  run_cmd->add_option("--seed", flags.seed, "base seed recorded in trajectory headers");
  run_cmd->add_option("--mock-script", flags.mock_script, "scripted mock reply file");
  run_cmd->add_option("--jobs", flags.jobs, "parallel repetitions");
  run_cmd->add_option("--out", flags.out_dir, "output directory");
  run_cmd->add_option("--endpoint-env", flags.endpoint_env, "env var naming the LLM endpoint");
  run_cmd->add_option("--api-key-env", flags.api_key_env, "env var naming the API key");
  run_cmd->add_option("--model", flags.model, "model name sent to the endpoint");
  run_cmd->add_option("--temperature", flags.temperature, "sampling temperature");
  run_cmd->add_option("--top-p", flags.top_p, "nucleus sampling parameter");
  run_cmd->add_option("--max-tokens", flags.max_tokens, "completion token cap");

  std::vector<std::string> trace_paths;
  std::vector<int> budgets, ks;
  unsigned replay_seed = 1;
  std::string report_file;
  CLI::App* replay_cmd = app.add_subcommand("replay", "recompute metrics from trace files");
  replay_cmd->add_option("paths", trace_paths, "trajectory files")->required();
  replay_cmd->add_option("--budgets", budgets, "oracle-call budgets to evaluate");
  replay_cmd->add_option("--k", ks, "top-k parameters");
  replay_cmd->add_option("--seed", replay_seed, "bootstrap seed");
  replay_cmd->add_option("--out", report_file, "machine-readable table file");

  std::string smiles, explain_task;
  CLI::App* explain_cmd = app.add_subcommand("explain", "print the full explanation block");
  explain_cmd->add_option("--smiles", smiles, "molecule to explain")->required();
  explain_cmd->add_option("--task", explain_task, "task file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(flags);
    if (replay_cmd->parsed())
      return cmd_replay(trace_paths, budgets, ks, replay_seed, report_file);
    if (explain_cmd->parsed()) return cmd_explain(smiles, explain_task);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
