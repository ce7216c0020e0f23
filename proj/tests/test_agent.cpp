#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <sstream>
#include <thread>

#include "molopt/agent.hpp"
#include "molopt/datapath.hpp"

using namespace molopt;

namespace {

AgentOptions fast_options() {
  AgentOptions o;
  o.backoff_ms = {0, 0, 0};
  return o;
}

TaskSpec quercetin_task(int budget, std::optional<double> target) {
  TaskSpec spec = load_task(data_file("tasks/sim_qed_quercetin.task"));
  spec.budget = budget;
  spec.target_score = target;
  return spec;
}

std::string reply(const std::string& reason, const std::string& smiles) {
  return "{\"reason\": \"" + reason + "\", \"smiles\": \"" + smiles + "\"}";
}

// Counts generation calls and checks the conversation grows by exactly one
// assistant and one user message per iteration.
class GrowthCheckingClient : public LlmClient {
 public:
  explicit GrowthCheckingClient(std::vector<std::string> replies)
      : inner_(std::move(replies)) {}
  std::string complete(const Conversation& conv) override {
    if (conv.messages.size() >= 2 && conv.messages[1].text.find("digest") == std::string::npos) {
      ++generation_calls_;
      REQUIRE(conv.messages.size() == 2 + 2 * (generation_calls_ - 1));
      REQUIRE(conv.messages[0].role == Message::Role::System);
      REQUIRE(conv.messages[1].role == Message::Role::User);
    }
    return inner_.complete(conv);
  }
  std::size_t generation_calls() const { return generation_calls_; }

 private:
  ScriptedMockClient inner_;
  std::size_t generation_calls_ = 0;
};

class FailingClient : public LlmClient {
 public:
  std::string complete(const Conversation&) override {
    ++calls_;
    throw TransportError("unreachable");
  }
  int calls_ = 0;
};

}  // namespace

TEST_CASE("parse_proposal accepts the exact format") {
  Proposal p = parse_proposal(R"({"reason": "start", "smiles": "CCO"})");
  CHECK(p.reason == "start");
  CHECK(p.smiles == "CCO");
}

TEST_CASE("parse_proposal tolerates fences and prose") {
  Proposal p = parse_proposal(
      "Sure! Here is my proposal:\n```json\n{\"reason\": \"aromatic core\", "
      "\"smiles\": \"c1ccccc1\"}\n```\nGood luck!");
  CHECK(p.smiles == "c1ccccc1");
  // nested braces inside strings survive extraction
  p = parse_proposal(R"({"reason": "ring {fused} design", "smiles": "C1CC1"})");
  CHECK(p.reason == "ring {fused} design");
}

TEST_CASE("parse_proposal error kinds") {
  try {
    parse_proposal("no json here");
    FAIL("expected error");
  } catch (const ProposalParseError& e) {
    CHECK(e.kind() == ProposalParseError::Kind::NoObject);
  }
  try {
    parse_proposal(R"({"reason": "missing smiles"})");
    FAIL("expected error");
  } catch (const ProposalParseError& e) {
    CHECK(e.kind() == ProposalParseError::Kind::MissingField);
  }
  try {
    parse_proposal(R"({"reason": "x", "smiles": 42})");
    FAIL("expected error");
  } catch (const ProposalParseError& e) {
    CHECK(e.kind() == ProposalParseError::Kind::NonStringField);
  }
}

TEST_CASE("first message: no_description carries no task-identifying terms") {
  TaskSpec spec = quercetin_task(50, 0.8);
  spec.mode = InfoMode::NoDescription;
  std::string msg = build_first_message(spec);
  for (const char* banned : {"similarity", "QED", "Tanimoto", "Quercetin", "quercetin",
                             "IC50", "isomer", "protease", "O=C1c3c"})
    CHECK(msg.find(banned) == std::string::npos);
  CHECK(msg.find("50 iterations") != std::string::npos);
}

TEST_CASE("first message: described tasks keep their phrasing") {
  TaskSpec celecoxib = load_task(data_file("tasks/celecoxib_rediscovery.task"));
  std::string msg = build_first_message(celecoxib);
  CHECK(msg.find("Tanimoto similarity") != std::string::npos);
  CHECK(msg.find("celecoxib") != std::string::npos);
  CHECK(msg.find("You will have 50 iterations") != std::string::npos);
  CHECK(msg.find("Respond with a single JSON object") != std::string::npos);
}

TEST_CASE("scripted termination on target score") {
  TaskSpec spec = quercetin_task(10, 0.65);
  auto oracle = make_oracle(spec);
  ScriptedMockClient client({reply("a", "CCO"), reply("b", "C"),
                             reply("hit", "O=C1c3c(O/C(=C1/O)c2ccc(O)c(O)c2)cc(O)cc3O"),
                             "unused", "summary text"});
  Trajectory traj = run(spec, *oracle, client, fast_options());
  REQUIRE(traj.records.size() == 3);
  CHECK(traj.best_iteration == 3);
  CHECK(traj.records[2].outcome->aggregate >= 0.65);
  CHECK(traj.records[0].outcome->aggregate < 0.65);
  // finalisation consumed the next scripted line
  CHECK(traj.summary == "unused");
}

TEST_CASE("invalid SMILES consumes an iteration without an outcome") {
  TaskSpec spec = quercetin_task(2, std::nullopt);
  auto oracle = make_oracle(spec);
  ScriptedMockClient client(
      {reply("bad", "C1CC"), reply("good", "CCO"), "canned summary"});
  Trajectory traj = run(spec, *oracle, client, fast_options());
  REQUIRE(traj.records.size() == 2);
  CHECK_FALSE(traj.records[0].outcome.has_value());
  CHECK(traj.records[0].parse_error.find("ring closure") != std::string::npos);
  CHECK(traj.records[0].feedback_text.find("could not be evaluated") != std::string::npos);
  CHECK(traj.records[0].feedback_text.find("single JSON object") != std::string::npos);
  CHECK(traj.records[1].outcome.has_value());
  CHECK(traj.summary == "canned summary");
}

TEST_CASE("budget is exhausted when no target is reached") {
  TaskSpec spec = quercetin_task(50, std::nullopt);
  auto oracle = make_oracle(spec);
  std::vector<std::string> replies;
  for (int i = 0; i < 50; ++i)
    replies.push_back(reply("r" + std::to_string(i), i % 2 ? "CCO" : "CCN"));
  GrowthCheckingClient client(std::move(replies));
  Trajectory traj = run(spec, *oracle, client, fast_options());
  CHECK(traj.records.size() == 50);
  CHECK(client.generation_calls() == 50);
  // script exhausted at finalisation: degraded template still reports the run
  CHECK(traj.summary.find("50 iterations") != std::string::npos);
  CHECK(traj.summary.find("Best score") != std::string::npos);
}

TEST_CASE("duplicates are served from the cache") {
  TaskSpec spec = quercetin_task(3, std::nullopt);
  auto oracle = make_oracle(spec);
  ScriptedMockClient client(
      {reply("a", "CCO"), reply("again", "CCO"), reply("b", "CCN"), "s"});
  Trajectory traj = run(spec, *oracle, client, fast_options());
  REQUIRE(traj.records.size() == 3);
  CHECK_FALSE(traj.records[0].duplicate);
  CHECK(traj.records[1].duplicate);
  CHECK(traj.records[1].duplicate_of == 1);
  CHECK(traj.records[1].outcome->aggregate == traj.records[0].outcome->aggregate);
  CHECK(traj.records[1].outcome->call_index == traj.records[0].outcome->call_index);
  CHECK(traj.records[1].feedback_text.find("already evaluated at iteration 1") !=
        std::string::npos);
  CHECK(traj.records[2].outcome->call_index == 2);  // cache did not consume a call
}

TEST_CASE("feedback shapes per mode") {
  TaskSpec spec = quercetin_task(50, std::nullopt);
  auto oracle = make_oracle(spec);
  OracleOutcome outcome = oracle->evaluate(parse_smiles("CCO"));
  TrajectoryRecord record;
  record.iteration = 7;
  record.smiles = "CCO";

  SUBCASE("no_description shows only the scalar") {
    spec.mode = InfoMode::NoDescription;
    std::string fb = build_feedback(outcome, record, spec);
    CHECK(fb.find("Iteration 7 of 50.") != std::string::npos);
    CHECK(fb.find("Score: ") != std::string::npos);
    CHECK(fb.find("Subscores") == std::string::npos);
    CHECK(fb.find("Weighted log contributions") == std::string::npos);
    int numeric_lines = 0;
    std::istringstream in(fb);
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("Score:", 0) == 0) ++numeric_lines;
    CHECK(numeric_lines == 1);
  }

  SUBCASE("no_explanation shows subscores without explanations") {
    spec.mode = InfoMode::NoExplanation;
    std::string fb = build_feedback(outcome, record, spec);
    CHECK(fb.find("Subscores: \"sim\": ") != std::string::npos);
    CHECK(fb.find("\"qed\": ") != std::string::npos);
    CHECK(fb.find("Weighted log contributions") == std::string::npos);
  }

  SUBCASE("full mode appends similarity diff and decomposition") {
    // the oracle was built from a full_explanation task, so payloads exist
    std::string fb = build_feedback(outcome, record, spec);
    CHECK(fb.find("Subscores") != std::string::npos);
    CHECK(fb.find("Weighted log contributions") != std::string::npos);
    CHECK(fb.find("features are present in TARGET but not in QUERY") != std::string::npos);
  }
}

TEST_CASE("constrained task feedback uses the scores line") {
  TaskSpec spec = load_task(data_file("tasks/protease_potency.task"));
  auto oracle = make_oracle(spec);
  OracleOutcome outcome = oracle->evaluate(parse_smiles("Fc1ccc(S(=O)(=O)Nc2ccc(C(=O)NC3CCCCC3)cc2)cc1"));
  TrajectoryRecord record;
  record.iteration = 2;
  std::string fb = build_feedback(outcome, record, spec);
  CHECK(fb.find("Scores: \"IC50\": ") != std::string::npos);
  CHECK(fb.find("\"QED\": 0.836") != std::string::npos);
  CHECK(fb.find("\"Novelty\": No") != std::string::npos);  // seeded in the demo registry
}

TEST_CASE("transport failure aborts with a partial trajectory") {
  TaskSpec spec = quercetin_task(5, std::nullopt);
  auto oracle = make_oracle(spec);
  FailingClient client;
  AgentOptions options = fast_options();
  Trajectory traj = run(spec, *oracle, client, options);
  CHECK_FALSE(traj.complete);
  CHECK(traj.records.empty());
  // initial attempt plus three retries, then one finalisation attempt cycle
  CHECK(client.calls_ >= 4);
}

TEST_CASE("replay determinism: identical runs produce equal trajectories") {
  TaskSpec spec = quercetin_task(4, std::nullopt);
  auto run_once = [&] {
    auto oracle = make_oracle(spec);
    ScriptedMockClient client({reply("a", "CCO"), reply("b", "C1CC"), reply("c", "CCO"),
                               reply("d", "c1ccccc1O"), "the summary"});
    return run(spec, *oracle, client, fast_options());
  };
  Trajectory a = run_once();
  Trajectory b = run_once();
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i] == b.records[i]);
  CHECK(a.summary == b.summary);
  CHECK(a.best_iteration == b.best_iteration);
}

TEST_CASE("finalize digest lists every evaluated SMILES exactly once") {
  TaskSpec spec = quercetin_task(4, std::nullopt);
  auto oracle = make_oracle(spec);
  ScriptedMockClient client({reply("a", "CCO"), reply("b", "CCO"), reply("c", "CCN"),
                             reply("bad", "C1CC"), "s"});
  Trajectory traj = run(spec, *oracle, client, fast_options());
  std::string digest = finalize_digest(traj);
  std::string list = digest.substr(digest.find("Evaluated molecules"));
  auto count = [&](const std::string& needle) {
    int n = 0;
    for (auto pos = list.find(needle); pos != std::string::npos;
         pos = list.find(needle, pos + 1))
      ++n;
    return n;
  };
  CHECK(count(". CCO ->") == 1);
  CHECK(count(". CCN ->") == 1);
  CHECK(count("C1CC") == 0);  // invalid proposals carry no outcome
}

TEST_CASE("minimization direction selects the lowest feasible aggregate") {
  TaskSpec spec = load_task(data_file("tasks/protease_potency.task"));
  spec.budget = 3;
  spec.target_score = std::nullopt;
  auto oracle = make_oracle(spec);
  ScriptedMockClient client({reply("a", "Cc1ccc2nc(NC(=O)C3CCC(=O)N(C)C3)sc2c1F"),
                             reply("b", "Fc1cc(CNC)c2nc(NC(=O)C3CCCN(CC)C(=O)N3C)sc2c1Cl"),
                             reply("c", "CCO"), "s"});
  Trajectory traj = run(spec, *oracle, client, fast_options());
  REQUIRE(traj.records.size() == 3);
  double a = traj.records[0].outcome->subscore("IC50_nM");
  double b = traj.records[1].outcome->subscore("IC50_nM");
  REQUIRE(traj.best());
  // ethanol fails the QED constraint or scores worse; best is the lower of a, b
  CHECK(traj.best_iteration == (b < a ? 2 : 1));
}

TEST_CASE("token estimate warning is logged past the threshold") {
  TaskSpec spec = quercetin_task(2, std::nullopt);
  auto oracle = make_oracle(spec);
  ScriptedMockClient client({reply("a", "CCO"), reply("b", "CCN"), "s"});
  AgentOptions options = fast_options();
  std::ostringstream log;
  options.log = &log;
  options.token_warning_threshold = 10;  // tiny threshold for the test
  run(spec, *oracle, client, options);
  CHECK(log.str().find("warning: conversation estimate passed 10 tokens") !=
        std::string::npos);
}

TEST_CASE("http chat client") {
  httplib::Server server;
  server.Post("/v1/chat", [](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.contains("messages"));
    REQUIRE(body["messages"].size() >= 2);
    res.set_content(
        R"({"choices": [{"message": {"role": "assistant", "content": "{\"reason\": \"x\", \"smiles\": \"CCO\"}"}}]})",
        "application/json");
  });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  std::string base = "http://127.0.0.1:" + std::to_string(port);

  Conversation conv;
  conv.append(Message::Role::System, "sys");
  conv.append(Message::Role::User, "user");

  HttpChatClient::Config config;
  config.endpoint = base + "/v1/chat";
  config.model = "test-model";
  HttpChatClient client(config);
  std::string content = client.complete(conv);
  CHECK(parse_proposal(content).smiles == "CCO");

  config.endpoint = base + "/broken";
  HttpChatClient broken(config);
  CHECK_THROWS_AS(broken.complete(conv), TransportError);

  server.stop();
  t.join();
}

TEST_CASE("remote run in full mode embeds the passthrough block in feedback") {
  httplib::Server server;
  server.Post("/score", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(
        R"({"probability": 0.61, "residues": ["HIS-41", "CYS-145"],
            "confidence": {"confidence_score": 0.91}})",
        "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  TaskSpec spec;
  spec.task_id = "remote_full";
  spec.objective = TaskSpec::Objective::Remote;
  spec.mode = InfoMode::FullExplanation;
  spec.budget = 1;
  spec.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/score";
  spec.timeout_s = 5.0;
  spec.description_text = "Maximize the remote binding probability.";
  auto oracle = make_oracle(spec);
  ScriptedMockClient client({reply("try", "CCO"), "done"});
  Trajectory traj = run(spec, *oracle, client, fast_options());
  server.stop();
  t.join();

  REQUIRE(traj.records.size() == 1);
  CHECK(traj.records[0].feedback_text.find("Score: 0.610") != std::string::npos);
  CHECK(traj.records[0].feedback_text.find("HIS-41, CYS-145") != std::string::npos);
  CHECK(traj.records[0].feedback_text.find("confidence_score: 0.9100") != std::string::npos);
}
