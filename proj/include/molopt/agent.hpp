#ifndef MOLOPT_AGENT_HPP
#define MOLOPT_AGENT_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "molopt/oracles.hpp"

namespace molopt {

struct Message {
  enum class Role { System, User, Assistant };
  Role role = Role::User;
  std::string text;
};

std::string to_string(Message::Role role);

// Append-only message history; the first message is the system prompt, the
// second the task first-message.
struct Conversation {
  std::vector<Message> messages;
  long token_estimate = 0;

  void append(Message::Role role, std::string text);
};

struct Proposal {
  std::string reason;
  std::string smiles;
  std::string raw;
};

class ProposalParseError : public std::runtime_error {
 public:
  enum class Kind { NoObject, MissingField, NonStringField };
  ProposalParseError(Kind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // One completion over the full conversation. Throws TransportError.
  virtual std::string complete(const Conversation& conversation) = 0;
};

// Deterministic replay client: canned assistant replies consumed in order,
// one per call (the finalisation call consumes one too).
class ScriptedMockClient : public LlmClient {
 public:
  explicit ScriptedMockClient(std::vector<std::string> replies)
      : replies_(std::move(replies)) {}
  // Line-delimited reply file; "\n" escapes become newlines.
  static ScriptedMockClient from_file(const std::string& path);

  std::string complete(const Conversation& conversation) override;
  std::size_t consumed() const { return next_; }

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

// Chat-completion style HTTP client.
class HttpChatClient : public LlmClient {
 public:
  struct Config {
    std::string endpoint;  // full URL of the chat-completions route
    std::string api_key;
    std::string model;
    double temperature = -1.0;  // < 0: provider default
    double top_p = -1.0;
    int max_tokens = 0;  // 0: provider default
    double timeout_s = 120.0;
  };
  explicit HttpChatClient(Config config) : config_(std::move(config)) {}
  std::string complete(const Conversation& conversation) override;

 private:
  Config config_;
};

struct TrajectoryRecord {
  int iteration = 0;
  std::string raw;          // assistant text as received
  std::string reason;
  std::string smiles;
  std::string parse_error;  // set when the proposal or SMILES was invalid
  bool duplicate = false;
  int duplicate_of = 0;     // iteration of the first occurrence
  std::optional<OracleOutcome> outcome;
  std::string feedback_text;
  long wall_time_ms = 0;

  bool operator==(const TrajectoryRecord& o) const;
};

struct Trajectory {
  std::string task_id;
  InfoMode mode = InfoMode::NoExplanation;
  Direction direction = Direction::Maximize;
  unsigned seed = 0;
  int budget = 0;
  bool complete = true;  // false when the run aborted on transport failure
  std::vector<TrajectoryRecord> records;
  int best_iteration = 0;  // 0 = no finite outcome seen
  std::string summary;

  const TrajectoryRecord* best() const;
};

struct AgentOptions {
  int transport_retries = 3;
  std::vector<int> backoff_ms = {1000, 4000, 16000};
  long token_warning_threshold = 200000;
  std::ostream* log = nullptr;
};

// Text of the packaged system prompt.
const std::string& system_prompt();

// Lenient-in extraction of the {"reason", "smiles"} object from a reply.
Proposal parse_proposal(const std::string& raw);

std::string build_first_message(const TaskSpec& spec);

std::string build_feedback(const OracleOutcome& outcome, const TrajectoryRecord& record,
                           const TaskSpec& spec);

// The full generation -> parsing -> validation -> prediction -> feedback loop.
Trajectory run(const TaskSpec& spec, Oracle& oracle, LlmClient& client,
               const AgentOptions& options = {});

// Finalisation summary over a structured digest; degrades to a deterministic
// template when the client fails.
std::string finalize(const Trajectory& trajectory, LlmClient& client);
std::string finalize_digest(const Trajectory& trajectory);

}  // namespace molopt

#endif
