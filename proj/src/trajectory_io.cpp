#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "molopt/harness.hpp"

namespace molopt {

namespace {

constexpr const char* kSchema = "molopt-trace-v1";

std::string novelty_text(OracleOutcome::Novelty n) {
  switch (n) {
    case OracleOutcome::Novelty::Novel: return "yes";
    case OracleOutcome::Novelty::Known: return "no";
    case OracleOutcome::Novelty::NotChecked: return "not_checked";
  }
  return "not_checked";
}

OracleOutcome::Novelty novelty_from(const std::string& s) {
  if (s == "yes") return OracleOutcome::Novelty::Novel;
  if (s == "no") return OracleOutcome::Novelty::Known;
  return OracleOutcome::Novelty::NotChecked;
}

}  // namespace

void save_trajectory(const Trajectory& trajectory, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory file: " + path);

  nlohmann::json header;
  header["schema"] = kSchema;
  header["task_id"] = trajectory.task_id;
  header["mode"] = to_string(trajectory.mode);
  header["seed"] = trajectory.seed;
  header["direction"] = trajectory.direction == Direction::Maximize ? "maximize" : "minimize";
  header["budget"] = trajectory.budget;
  header["complete"] = trajectory.complete;
  header["best_iteration"] = trajectory.best_iteration;
  header["summary"] = trajectory.summary;
  out << header.dump() << "\n";

  for (const TrajectoryRecord& r : trajectory.records) {
    nlohmann::json line;
    line["iteration"] = r.iteration;
    line["smiles"] = r.smiles;
    line["reason"] = r.reason;
    line["raw"] = r.raw;
    line["parse_error"] = r.parse_error;
    line["duplicate"] = r.duplicate;
    line["duplicate_of"] = r.duplicate_of;
    line["feedback_text"] = r.feedback_text;
    line["wall_time_ms"] = r.wall_time_ms;
    if (r.outcome) {
      bool nan = std::isnan(r.outcome->aggregate);
      line["nan_flag"] = nan;
      if (nan)
        line["aggregate"] = nullptr;
      else
        line["aggregate"] = r.outcome->aggregate;
      nlohmann::json subs = nlohmann::json::array();
      for (const auto& [name, value] : r.outcome->subscores) {
        if (std::isnan(value))
          subs.push_back({{"name", name}, {"value", nullptr}});
        else
          subs.push_back({{"name", name}, {"value", value}});
      }
      line["subscores"] = subs;
      line["feasible"] = r.outcome->feasible;
      line["violated"] = r.outcome->violated;
      line["novel"] = novelty_text(r.outcome->novelty);
      line["call_index"] = r.outcome->call_index;
    }
    out << line.dump() << "\n";
  }
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
  Trajectory traj;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed trace line: " + e.what());
    }
    if (!header_seen && parsed.contains("schema")) {
      header_seen = true;
      std::string schema = parsed["schema"].get<std::string>();
      if (schema != kSchema)
        throw std::runtime_error(path + ": unsupported trace schema '" + schema + "'");
      traj.task_id = parsed.value("task_id", "");
      traj.mode = parse_info_mode(parsed.value("mode", "no_explanation"));
      traj.seed = parsed.value("seed", 0u);
      traj.direction = parsed.value("direction", "maximize") == "minimize"
                           ? Direction::Minimize
                           : Direction::Maximize;
      traj.budget = parsed.value("budget", 0);
      traj.complete = parsed.value("complete", true);
      traj.best_iteration = parsed.value("best_iteration", 0);
      traj.summary = parsed.value("summary", "");
      continue;
    }
    header_seen = true;  // headerless minimal traces are accepted

    TrajectoryRecord r;
    r.iteration = parsed.value("iteration", static_cast<int>(traj.records.size()) + 1);
    r.smiles = parsed.value("smiles", "");
    r.reason = parsed.value("reason", "");
    r.raw = parsed.value("raw", "");
    r.parse_error = parsed.value("parse_error", "");
    r.duplicate = parsed.value("duplicate", false);
    r.duplicate_of = parsed.value("duplicate_of", 0);
    r.feedback_text = parsed.value("feedback_text", "");
    r.wall_time_ms = parsed.value("wall_time_ms", 0L);

    bool has_outcome = parsed.contains("aggregate") || parsed.contains("score") ||
                       parsed.contains("nan_flag");
    if (has_outcome) {
      OracleOutcome outcome;
      nlohmann::json agg =
          parsed.contains("aggregate") ? parsed["aggregate"] : parsed.value("score", nlohmann::json());
      if (agg.is_number())
        outcome.aggregate = agg.get<double>();
      else
        outcome.aggregate = std::numeric_limits<double>::quiet_NaN();
      if (parsed.contains("subscores")) {
        for (const auto& s : parsed["subscores"]) {
          double v = s.contains("value") && s["value"].is_number()
                         ? s["value"].get<double>()
                         : std::numeric_limits<double>::quiet_NaN();
          outcome.subscores.emplace_back(s.value("name", ""), v);
        }
      }
      outcome.feasible = parsed.value("feasible", true);
      if (parsed.contains("violated"))
        outcome.violated = parsed["violated"].get<std::vector<std::string>>();
      outcome.novelty = novelty_from(parsed.value("novel", "not_checked"));
      outcome.call_index = parsed.value("call_index", r.iteration);
      r.outcome = outcome;
    }
    traj.records.push_back(std::move(r));
  }
  if (traj.budget == 0) traj.budget = static_cast<int>(traj.records.size());
  return traj;
}

}  // namespace molopt
