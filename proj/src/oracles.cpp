#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "molopt/oracles.hpp"

namespace molopt {

double apply_modifier(const Modifier& mod, double x) {
  switch (mod.kind) {
    case Modifier::Kind::Identity:
      return std::clamp(x, 0.0, 1.0);
    case Modifier::Kind::Clip:
      return x >= mod.t ? 1.0 : x / mod.t;
    case Modifier::Kind::MinGauss:
      return x <= mod.mu ? 1.0 : std::exp(-0.5 * ((x - mod.mu) / mod.sigma) *
                                          ((x - mod.mu) / mod.sigma));
    case Modifier::Kind::MaxGauss:
      return x >= mod.mu ? 1.0 : std::exp(-0.5 * ((x - mod.mu) / mod.sigma) *
                                          ((x - mod.mu) / mod.sigma));
  }
  return x;
}

double OracleOutcome::subscore(const std::string& name) const {
  for (const auto& [n, v] : subscores)
    if (n == name) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

double rediscovery_score(const Molecule& m, const Molecule& ref) {
  return tanimoto(maccs_fingerprint(m), maccs_fingerprint(ref));
}

SimQed sim_qed_score(const Molecule& m, const Molecule& ref) {
  SimQed r;
  r.sim = rediscovery_score(m, ref);
  r.qed = qed(descriptors(m)).score;
  r.aggregate = 0.5 * (r.sim + r.qed);
  return r;
}

double raw_property(const std::string& name, const Molecule& m, const Molecule* ref) {
  if (name == "maccs_sim") {
    if (!ref) throw std::runtime_error("maccs_sim needs a reference molecule");
    return rediscovery_score(m, *ref);
  }
  if (name == "qed") return qed(descriptors(m)).score;
  if (name == "tpsa" || name == "psa") return tpsa(m);
  if (name == "alogp") return crippen_logp(m);
  if (name == "mw") return molecular_weight(m);
  if (name == "hba") return hbond_acceptors(m);
  if (name == "hbd") return hbond_donors(m);
  if (name == "rotb") return rotatable_bonds(m);
  if (name == "arom") return m.aromatic_ring_count();
  throw std::runtime_error("unknown raw property: " + name);
}

MpoResult mpo_score(const Molecule& m, const TaskSpec& spec) {
  MpoResult r;
  const Molecule* refp = nullptr;
  Molecule ref;
  if (!spec.reference_smiles.empty()) {
    ref = parse_smiles(spec.reference_smiles);
    refp = &ref;
  }
  double log_acc = 0.0;
  bool zero = false;
  for (const TaskComponent& c : spec.components) {
    double term = apply_modifier(c.modifier, raw_property(c.property, m, refp));
    r.terms.emplace_back(c.name, term);
    if (term <= 0.0)
      zero = true;
    else
      log_acc += std::log(term);
  }
  if (r.terms.empty()) throw std::runtime_error("mpo task has no components");
  r.aggregate = zero ? 0.0 : std::exp(log_acc / static_cast<double>(r.terms.size()));
  return r;
}

double isomer_score(const Molecule& m, const std::map<std::string, int>& target) {
  if (target.empty()) throw std::runtime_error("isomer task has an empty target formula");
  auto actual = molecular_formula(m);
  double sq = 0.0;
  for (const auto& [el, n] : target) {
    auto it = actual.find(el);
    int have = it == actual.end() ? 0 : it->second;
    sq += static_cast<double>(n - have) * (n - have);
  }
  for (const auto& [el, n] : actual)
    if (!target.count(el)) sq += static_cast<double>(n) * n;
  return std::exp(-0.5 * sq);
}

AdditivePredictor AdditivePredictor::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictor file: " + path);
  AdditivePredictor p;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# additive-predictor ", 0) != 0)
    throw std::runtime_error("predictor file missing version header: " + path);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "intercept") {
      ls >> p.intercept;
    } else {
      int bit = std::stoi(first);
      if (bit < 1 || bit > 166) throw std::runtime_error("predictor bit out of range: " + line);
      double w = 0.0, base = 0.0;
      ls >> w;
      if (!(ls >> base)) base = 0.0;
      p.weights[static_cast<std::size_t>(bit)] = w;
      p.baseline[static_cast<std::size_t>(bit)] = base;
    }
    if (in.fail() && !in.eof()) throw std::runtime_error("malformed predictor row: " + line);
  }
  return p;
}

NoveltySet NoveltySet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open novelty file: " + path);
  NoveltySet set;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos || line[b] == '#') continue;
    set.insert(parse_smiles(line));
  }
  return set;
}

void NoveltySet::insert(const Molecule& m) {
  entries_.push_back({maccs_fingerprint(m), molecular_formula(m)});
}

bool NoveltySet::contains(const Molecule& m) const {
  Fingerprint fp = maccs_fingerprint(m);
  auto formula = molecular_formula(m);
  for (const Entry& e : entries_)
    if (e.fp == fp && e.formula == formula) return true;
  return false;
}

namespace {

class RediscoveryOracle : public Oracle {
 public:
  explicit RediscoveryOracle(TaskSpec spec)
      : Oracle(std::move(spec)), ref_(parse_smiles(spec_.reference_smiles)) {}
  OracleOutcome evaluate(const Molecule& m) override {
    OracleOutcome out;
    out.call_index = ++calls_;
    out.aggregate = rediscovery_score(m, ref_);
    out.subscores.emplace_back("similarity", out.aggregate);
    if (spec_.mode == InfoMode::FullExplanation || spec_.mode == InfoMode::PartialExplanation)
      out.explanations.emplace_back(
          "similarity", explain_similarity(maccs_fingerprint(ref_), maccs_fingerprint(m)));
    return out;
  }

 private:
  Molecule ref_;
};

class SimQedOracle : public Oracle {
 public:
  explicit SimQedOracle(TaskSpec spec)
      : Oracle(std::move(spec)), ref_(parse_smiles(spec_.reference_smiles)) {}
  OracleOutcome evaluate(const Molecule& m) override {
    OracleOutcome out;
    out.call_index = ++calls_;
    SimQed s = sim_qed_score(m, ref_);
    out.aggregate = s.aggregate;
    out.subscores.emplace_back("sim", s.sim);
    out.subscores.emplace_back("qed", s.qed);
    if (spec_.mode == InfoMode::FullExplanation || spec_.mode == InfoMode::PartialExplanation) {
      out.explanations.emplace_back(
          "sim", explain_similarity(maccs_fingerprint(ref_), maccs_fingerprint(m)));
      out.explanations.emplace_back("qed", explain_qed(qed(descriptors(m))));
    }
    return out;
  }

 private:
  Molecule ref_;
};

class MpoOracle : public Oracle {
 public:
  explicit MpoOracle(TaskSpec spec) : Oracle(std::move(spec)) {
    if (!spec_.reference_smiles.empty()) ref_ = parse_smiles(spec_.reference_smiles);
  }
  OracleOutcome evaluate(const Molecule& m) override {
    OracleOutcome out;
    out.call_index = ++calls_;
    MpoResult r = mpo_score(m, spec_);
    out.aggregate = r.aggregate;
    out.subscores = r.terms;
    if (spec_.mode == InfoMode::FullExplanation || spec_.mode == InfoMode::PartialExplanation) {
      // the explainable term families: fingerprint similarity and QED
      bool sim_done = false;
      for (const TaskComponent& c : spec_.components) {
        if (c.property == "maccs_sim" && !sim_done && !spec_.reference_smiles.empty()) {
          out.explanations.emplace_back(
              c.name, explain_similarity(maccs_fingerprint(ref_), maccs_fingerprint(m)));
          sim_done = true;
        } else if (c.property == "qed") {
          out.explanations.emplace_back(c.name, explain_qed(qed(descriptors(m))));
        }
      }
    }
    return out;
  }

 private:
  Molecule ref_;
};

class IsomerOracle : public Oracle {
 public:
  explicit IsomerOracle(TaskSpec spec) : Oracle(std::move(spec)) {}
  OracleOutcome evaluate(const Molecule& m) override {
    OracleOutcome out;
    out.call_index = ++calls_;
    out.aggregate = isomer_score(m, spec_.reference_formula);
    out.subscores.emplace_back("isomer", out.aggregate);
    return out;
  }
};

class ConstrainedPotencyOracle : public Oracle {
 public:
  ConstrainedPotencyOracle(TaskSpec spec, AdditivePredictor pred, NoveltySet novelty)
      : Oracle(std::move(spec)), pred_(std::move(pred)), novelty_(std::move(novelty)) {}

  OracleOutcome evaluate(const Molecule& m) override {
    OracleOutcome out;
    out.call_index = ++calls_;
    Fingerprint fp = maccs_fingerprint(m);
    double pic50 = pred_.predict(fp);
    double ic50_nm = std::pow(10.0, 9.0 - pic50);
    QedResult q = qed(descriptors(m));
    out.aggregate = ic50_nm;
    out.subscores.emplace_back("IC50_nM", ic50_nm);
    out.subscores.emplace_back("QED", q.score);
    bool novel = !novelty_.contains(m);
    out.novelty = novel ? OracleOutcome::Novelty::Novel : OracleOutcome::Novelty::Known;
    out.feasible = true;
    if (q.score < spec_.qed_min) {
      out.feasible = false;
      out.violated.push_back("QED");
    }
    if (!novel) {
      out.feasible = false;
      out.violated.push_back("novelty");
    }
    if (spec_.mode == InfoMode::FullExplanation || spec_.mode == InfoMode::PartialExplanation) {
      out.explanations.emplace_back("IC50", attribution_table(pred_, fp));
      out.explanations.emplace_back("QED", explain_qed(q));
    }
    return out;
  }

 private:
  AdditivePredictor pred_;
  NoveltySet novelty_;
};

class RemoteOracle : public Oracle {
 public:
  explicit RemoteOracle(TaskSpec spec) : Oracle(std::move(spec)) {}
  OracleOutcome evaluate(const Molecule& m) override {
    OracleOutcome out = remote_evaluate(m, spec_.endpoint, spec_.timeout_s, spec_.task_id);
    out.call_index = ++calls_;
    if (spec_.mode != InfoMode::FullExplanation) out.explanations.clear();
    return out;
  }
};

}  // namespace

std::unique_ptr<Oracle> make_oracle(const TaskSpec& spec) {
  switch (spec.objective) {
    case TaskSpec::Objective::Rediscovery:
      if (spec.reference_smiles.empty())
        throw std::runtime_error("rediscovery task needs a reference SMILES");
      return std::make_unique<RediscoveryOracle>(spec);
    case TaskSpec::Objective::SimilarityQed:
      if (spec.reference_smiles.empty())
        throw std::runtime_error("similarity_qed task needs a reference SMILES");
      return std::make_unique<SimQedOracle>(spec);
    case TaskSpec::Objective::Mpo:
      return std::make_unique<MpoOracle>(spec);
    case TaskSpec::Objective::Isomer:
      if (spec.reference_formula.empty())
        throw std::runtime_error("isomer task needs a target formula");
      return std::make_unique<IsomerOracle>(spec);
    case TaskSpec::Objective::ConstrainedPotency: {
      if (spec.predictor_file.empty())
        throw std::runtime_error("constrained_potency task needs predictor_file");
      if (spec.novelty_file.empty())
        throw std::runtime_error("constrained_potency task needs novelty_file");
      AdditivePredictor pred = AdditivePredictor::load(spec.predictor_file);
      NoveltySet novelty = NoveltySet::load(spec.novelty_file);
      return std::make_unique<ConstrainedPotencyOracle>(spec, std::move(pred),
                                                        std::move(novelty));
    }
    case TaskSpec::Objective::Remote:
      if (spec.endpoint.empty()) throw std::runtime_error("remote task needs an endpoint");
      return std::make_unique<RemoteOracle>(spec);
  }
  throw std::runtime_error("unhandled objective kind");
}

}  // namespace molopt
