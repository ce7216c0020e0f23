#ifndef MOLOPT_ORACLES_HPP
#define MOLOPT_ORACLES_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "molopt/explain.hpp"
#include "molopt/molgraph.hpp"
#include "molopt/predictor.hpp"

namespace molopt {

struct Modifier {
  enum class Kind { Identity, Clip, MinGauss, MaxGauss };
  Kind kind = Kind::Identity;
  double t = 1.0;      // clip threshold, in (0,1]
  double mu = 0.0;
  double sigma = 1.0;  // > 0
};

// clip(x,t) = 1 if x>=t else x/t
// min_gauss(x;mu,s) = 1 if x<=mu else exp(-0.5*((x-mu)/s)^2)
// max_gauss(x;mu,s) = 1 if x>=mu else exp(-0.5*((x-mu)/s)^2)
// identity clamps to [0,1]
double apply_modifier(const Modifier& mod, double x);

enum class Direction { Maximize, Minimize };

struct TaskComponent {
  std::string name;
  std::string property;  // maccs_sim | qed | tpsa | alogp | mw | psa | hba | hbd | rotb
  double weight = 1.0;
  Modifier modifier;
};

struct TaskSpec {
  enum class Objective { Rediscovery, SimilarityQed, Mpo, Isomer, ConstrainedPotency, Remote };

  std::string task_id;
  Objective objective = Objective::SimilarityQed;
  Direction direction = Direction::Maximize;
  std::vector<TaskComponent> components;
  std::string reference_smiles;
  std::map<std::string, int> reference_formula;
  std::optional<double> target_score;
  int budget = 50;
  InfoMode mode = InfoMode::NoExplanation;
  std::string description_text;

  // constrained-potency resources
  std::string predictor_file;
  std::string novelty_file;
  double qed_min = 0.6;

  // remote oracle
  std::string endpoint;
  double timeout_s = 300.0;
};

// Load a task from the flat key-value task file format.
TaskSpec load_task(const std::string& path);

struct OracleOutcome {
  double aggregate = 0.0;  // NaN for remote failures
  std::vector<std::pair<std::string, double>> subscores;
  bool feasible = true;
  std::vector<std::string> violated;
  enum class Novelty { NotChecked, Novel, Known } novelty = Novelty::NotChecked;
  std::vector<std::pair<std::string, ExplanationPayload>> explanations;
  int call_index = 0;

  double subscore(const std::string& name) const;
};

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual OracleOutcome evaluate(const Molecule& m) = 0;
  const TaskSpec& spec() const { return spec_; }

 protected:
  explicit Oracle(TaskSpec spec) : spec_(std::move(spec)) {}
  TaskSpec spec_;
  int calls_ = 0;
};

// Builds the oracle for a task; throws std::runtime_error naming any missing
// resource file.
std::unique_ptr<Oracle> make_oracle(const TaskSpec& spec);

// Scoring primitives (also used directly by the oracle implementations).
double rediscovery_score(const Molecule& m, const Molecule& ref);
struct SimQed {
  double aggregate = 0.0;
  double sim = 0.0;
  double qed = 0.0;
};
SimQed sim_qed_score(const Molecule& m, const Molecule& ref);
struct MpoResult {
  double aggregate = 0.0;
  std::vector<std::pair<std::string, double>> terms;
};
MpoResult mpo_score(const Molecule& m, const TaskSpec& spec);
double isomer_score(const Molecule& m, const std::map<std::string, int>& target);
double raw_property(const std::string& name, const Molecule& m, const Molecule* ref);

// Pluggable local novelty lookup (line-delimited SMILES file). Membership is
// a two-factor match: identical fingerprint and identical formula.
class NoveltySet {
 public:
  NoveltySet() = default;
  static NoveltySet load(const std::string& path);
  void insert(const Molecule& m);
  bool contains(const Molecule& m) const;
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    Fingerprint fp;
    std::map<std::string, int> formula;
  };
  std::vector<Entry> entries_;
};

// POST {"smiles","task_id"} to the endpoint; returns the binding probability
// as aggregate. Timeouts, transport errors and malformed bodies yield a NaN
// outcome, never an exception.
OracleOutcome remote_evaluate(const Molecule& m, const std::string& endpoint,
                              double timeout_s = 300.0,
                              const std::string& task_id = "remote");

}  // namespace molopt

#endif
