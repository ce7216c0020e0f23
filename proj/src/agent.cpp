#include <chrono>
#include <limits>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "molopt/agent.hpp"
#include "molopt/datapath.hpp"

namespace molopt {

namespace {

std::string fixed(double v, int places) {
  if (std::isnan(v)) return "NaN";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(places);
  os << v;
  return os.str();
}

const char* kFormatReminder =
    "Respond with a single JSON object: {\"reason\": \"<short explanation>\", "
    "\"smiles\": \"<SMILES string>\"} and nothing else.";

bool better(double candidate, double incumbent, Direction direction) {
  if (std::isnan(candidate)) return false;
  if (std::isnan(incumbent)) return true;
  return direction == Direction::Maximize ? candidate > incumbent : candidate < incumbent;
}

bool has_constraints(const TaskSpec& spec) {
  return spec.objective == TaskSpec::Objective::ConstrainedPotency;
}

bool meets_target(const TaskSpec& spec, const OracleOutcome& outcome) {
  if (!spec.target_score) return false;
  if (std::isnan(outcome.aggregate)) return false;
  if (has_constraints(spec) && !outcome.feasible) return false;
  return spec.direction == Direction::Maximize ? outcome.aggregate >= *spec.target_score
                                               : outcome.aggregate <= *spec.target_score;
}

}  // namespace

const std::string& system_prompt() {
  static const std::string text = [] {
    std::ifstream in(data_file("system_prompt.txt"));
    if (!in) throw std::runtime_error("cannot open system_prompt.txt");
    std::ostringstream os;
    os << in.rdbuf();
    std::string s = os.str();
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
  }();
  return text;
}

Proposal parse_proposal(const std::string& raw) {
  // Lenient-in: scan for the first balanced object carrying both fields, so
  // surrounding prose and code fences do not break extraction.
  for (std::size_t start = raw.find('{'); start != std::string::npos;
       start = raw.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      char c = raw[i];
      if (in_string) {
        if (escaped)
          escaped = false;
        else if (c == '\\')
          escaped = true;
        else if (c == '"')
          in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      if (c == '{') ++depth;
      if (c == '}') {
        --depth;
        if (depth == 0) {
          std::string candidate = raw.substr(start, i - start + 1);
          nlohmann::json parsed;
          try {
            parsed = nlohmann::json::parse(candidate);
          } catch (const nlohmann::json::exception&) {
            break;  // not valid JSON, try the next '{'
          }
          if (!parsed.is_object()) break;
          if (!parsed.contains("smiles"))
            throw ProposalParseError(ProposalParseError::Kind::MissingField,
                                     "the JSON object is missing the \"smiles\" field");
          if (!parsed.contains("reason"))
            throw ProposalParseError(ProposalParseError::Kind::MissingField,
                                     "the JSON object is missing the \"reason\" field");
          if (!parsed["smiles"].is_string() || !parsed["reason"].is_string())
            throw ProposalParseError(ProposalParseError::Kind::NonStringField,
                                     "\"reason\" and \"smiles\" must both be JSON strings");
          Proposal p;
          p.reason = parsed["reason"].get<std::string>();
          p.smiles = parsed["smiles"].get<std::string>();
          p.raw = raw;
          return p;
        }
      }
    }
  }
  throw ProposalParseError(ProposalParseError::Kind::NoObject,
                           "no JSON object with \"reason\" and \"smiles\" fields was found");
}

std::string build_first_message(const TaskSpec& spec) {
  std::ostringstream os;
  if (spec.mode == InfoMode::NoDescription) {
    os << "Optimize a black-box score.\n";
    os << "Objective:\n";
    os << "- " << (spec.direction == Direction::Maximize ? "maximize" : "minimize")
       << " the score; only the score is reported back.\n";
  } else {
    os << spec.description_text << "\n";
  }
  os << "- You will have " << spec.budget << " iterations to optimize the molecule.\n";
  os << "Step 1:\n";
  os << "Propose a single initial molecule as a SMILES string that you think will "
     << (spec.direction == Direction::Maximize ? "achieve a high score"
                                               : "achieve a low score")
     << " for this objective.\n";
  os << "Respond with a single JSON object: {\"reason\": \"<why this is a reasonable "
        "starting point for this objective>\", \"smiles\": \"<SMILES string>\"}";
  return os.str();
}

std::string build_feedback(const OracleOutcome& outcome, const TrajectoryRecord& record,
                           const TaskSpec& spec) {
  std::ostringstream os;
  os << "Iteration " << record.iteration << " of " << spec.budget << ".\n";
  if (spec.objective == TaskSpec::Objective::ConstrainedPotency) {
    os << "Scores: \"IC50\": " << fixed(outcome.subscore("IC50_nM"), 2)
       << ", \"QED\": " << fixed(outcome.subscore("QED"), 3) << ", \"Novelty\": "
       << (outcome.novelty == OracleOutcome::Novelty::Known
               ? "No"
               : outcome.novelty == OracleOutcome::Novelty::Novel ? "Yes" : "Unchecked")
       << "\n";
  } else {
    os << "Score: " << fixed(outcome.aggregate, 3) << "\n";
    if (spec.mode != InfoMode::NoDescription && outcome.subscores.size() > 1) {
      os << "Subscores: ";
      bool first = true;
      for (const auto& [name, value] : outcome.subscores) {
        if (!first) os << ", ";
        first = false;
        os << "\"" << name << "\": " << fixed(value, 3);
      }
      os << "\n";
    }
  }
  if (record.duplicate) {
    os << "Note: this molecule was already evaluated at iteration " << record.duplicate_of
       << "; the scores are deterministic and unchanged. Do not repeat any previous "
          "molecule exactly.\n";
  }
  std::string expl = verbalize(outcome.explanations, spec.mode);
  if (!expl.empty()) os << "\n" << expl;
  return os.str();
}

namespace {

std::string corrective_feedback(int iteration, const TaskSpec& spec, const std::string& what) {
  std::ostringstream os;
  os << "Iteration " << iteration << " of " << spec.budget << ".\n";
  os << "Your previous reply could not be evaluated: " << what << "\n";
  os << kFormatReminder;
  return os.str();
}

std::string complete_with_retries(LlmClient& client, const Conversation& conv,
                                  const AgentOptions& options, std::string* error) {
  for (int attempt = 0;; ++attempt) {
    try {
      return client.complete(conv);
    } catch (const TransportError& e) {
      if (attempt >= options.transport_retries) {
        if (error) *error = e.what();
        throw;
      }
      int delay = attempt < static_cast<int>(options.backoff_ms.size())
                      ? options.backoff_ms[static_cast<std::size_t>(attempt)]
                      : options.backoff_ms.empty() ? 0 : options.backoff_ms.back();
      if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
  }
}

}  // namespace

Trajectory run(const TaskSpec& spec, Oracle& oracle, LlmClient& client,
               const AgentOptions& options) {
  Trajectory traj;
  traj.task_id = spec.task_id;
  traj.mode = spec.mode;
  traj.direction = spec.direction;
  traj.budget = spec.budget;

  Conversation conv;
  conv.append(Message::Role::System, system_prompt());
  conv.append(Message::Role::User, build_first_message(spec));

  std::unordered_map<std::string, std::pair<int, OracleOutcome>> cache;
  double best_aggregate = std::numeric_limits<double>::quiet_NaN();
  double best_any = std::numeric_limits<double>::quiet_NaN();
  int best_any_iteration = 0;
  bool warned_tokens = false;

  for (int iteration = 1; iteration <= spec.budget; ++iteration) {
    auto started = std::chrono::steady_clock::now();
    TrajectoryRecord record;
    record.iteration = iteration;

    std::string raw;
    try {
      raw = complete_with_retries(client, conv, options, nullptr);
    } catch (const TransportError& e) {
      traj.complete = false;
      if (options.log) *options.log << "run aborted: " << e.what() << "\n";
      break;
    }
    conv.append(Message::Role::Assistant, raw);
    record.raw = raw;

    std::string feedback;
    bool stop = false;
    try {
      Proposal proposal = parse_proposal(raw);
      record.reason = proposal.reason;
      record.smiles = proposal.smiles;
      Molecule molecule = parse_smiles(proposal.smiles);

      auto cached = cache.find(proposal.smiles);
      OracleOutcome outcome;
      if (cached != cache.end()) {
        record.duplicate = true;
        record.duplicate_of = cached->second.first;
        outcome = cached->second.second;
      } else {
        outcome = oracle.evaluate(molecule);
        cache.emplace(proposal.smiles, std::make_pair(iteration, outcome));
      }
      record.outcome = outcome;
      feedback = build_feedback(outcome, record, spec);

      bool feasible_enough = !has_constraints(spec) || outcome.feasible;
      if (!std::isnan(outcome.aggregate) && feasible_enough &&
          (traj.best_iteration == 0 ||
           better(outcome.aggregate, best_aggregate, spec.direction))) {
        best_aggregate = outcome.aggregate;
        traj.best_iteration = record.duplicate ? record.duplicate_of : iteration;
      }
      if (!std::isnan(outcome.aggregate) &&
          (best_any_iteration == 0 || better(outcome.aggregate, best_any, spec.direction))) {
        best_any = outcome.aggregate;
        best_any_iteration = record.duplicate ? record.duplicate_of : iteration;
      }
      if (meets_target(spec, outcome)) stop = true;
    } catch (const ProposalParseError& e) {
      record.parse_error = e.what();
      feedback = corrective_feedback(iteration, spec, e.what());
    } catch (const SmilesError& e) {
      record.parse_error = e.what();
      feedback = corrective_feedback(
          iteration, spec, std::string("the SMILES string is invalid: ") + e.what());
    } catch (const std::exception& e) {
      // oracle-side failures (e.g. a match budget abort) keep the loop alive
      record.parse_error = e.what();
      feedback = corrective_feedback(
          iteration, spec, std::string("the molecule could not be evaluated: ") + e.what());
    }

    conv.append(Message::Role::User, feedback);
    record.feedback_text = feedback;
    record.wall_time_ms = static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started)
            .count());
    traj.records.push_back(std::move(record));

    if (!warned_tokens && conv.token_estimate > options.token_warning_threshold) {
      warned_tokens = true;
      if (options.log)
        *options.log << "warning: conversation estimate passed "
                     << options.token_warning_threshold << " tokens\n";
    }
    if (stop) break;
  }
  // constrained runs with no feasible molecule fall back to the best finite one
  if (traj.best_iteration == 0) traj.best_iteration = best_any_iteration;

  traj.summary = finalize(traj, client);
  return traj;
}

const TrajectoryRecord* Trajectory::best() const {
  if (best_iteration == 0) return nullptr;
  for (const TrajectoryRecord& r : records)
    if (r.iteration == best_iteration) return &r;
  return nullptr;
}

bool TrajectoryRecord::operator==(const TrajectoryRecord& o) const {
  auto outcome_equal = [](const std::optional<OracleOutcome>& a,
                          const std::optional<OracleOutcome>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    auto nan_eq = [](double x, double y) {
      return (std::isnan(x) && std::isnan(y)) || x == y;
    };
    if (!nan_eq(a->aggregate, b->aggregate)) return false;
    if (a->subscores.size() != b->subscores.size()) return false;
    for (std::size_t i = 0; i < a->subscores.size(); ++i) {
      if (a->subscores[i].first != b->subscores[i].first) return false;
      if (!nan_eq(a->subscores[i].second, b->subscores[i].second)) return false;
    }
    return a->feasible == b->feasible && a->violated == b->violated &&
           a->novelty == b->novelty && a->call_index == b->call_index;
  };
  return iteration == o.iteration && raw == o.raw && reason == o.reason &&
         smiles == o.smiles && parse_error == o.parse_error && duplicate == o.duplicate &&
         duplicate_of == o.duplicate_of && feedback_text == o.feedback_text &&
         outcome_equal(outcome, o.outcome);
}

std::string finalize_digest(const Trajectory& trajectory) {
  std::ostringstream os;
  os << "Optimization run digest for task " << trajectory.task_id << " (budget "
     << trajectory.budget << ", " << trajectory.records.size() << " iterations used).\n";
  const TrajectoryRecord* best = trajectory.best();
  if (best && best->outcome)
    os << "Best molecule: " << best->smiles << " with score "
       << fixed(best->outcome->aggregate, 4) << " at iteration " << best->iteration << ".\n";
  os << "Evaluated molecules (first occurrence each):\n";
  std::set<std::string> seen;
  for (const TrajectoryRecord& r : trajectory.records) {
    if (r.smiles.empty() || !r.outcome || seen.count(r.smiles)) continue;
    seen.insert(r.smiles);
    os << r.iteration << ". " << r.smiles << " -> " << fixed(r.outcome->aggregate, 4);
    os << " (reason: " << r.reason << ")\n";
  }
  os << "Summarize the optimization trajectory in natural language, highlighting which "
        "structural modifications improved or degraded performance.";
  return os.str();
}

std::string finalize(const Trajectory& trajectory, LlmClient& client) {
  if (trajectory.records.empty()) return "No iterations were executed.";
  Conversation conv;
  conv.append(Message::Role::System,
              "You are an expert medicinal chemist summarizing an optimization run.");
  conv.append(Message::Role::User, finalize_digest(trajectory));
  try {
    return client.complete(conv);
  } catch (const TransportError&) {
    const TrajectoryRecord* best = trajectory.best();
    std::ostringstream os;
    if (best && best->outcome) {
      os << "Best score " << fixed(best->outcome->aggregate, 4) << " reached at iteration "
         << best->iteration << " with " << best->smiles << ".";
    } else {
      os << "No valid molecule was found.";
    }
    os << " Run used " << trajectory.records.size() << " iterations.";
    return os.str();
  }
}

}  // namespace molopt
