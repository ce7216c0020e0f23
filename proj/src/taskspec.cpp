#include <fstream>
#include <sstream>

#include "molopt/oracles.hpp"

namespace molopt {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string dirname_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

TaskSpec::Objective parse_objective(const std::string& name) {
  if (name == "rediscovery") return TaskSpec::Objective::Rediscovery;
  if (name == "similarity_qed") return TaskSpec::Objective::SimilarityQed;
  if (name == "mpo") return TaskSpec::Objective::Mpo;
  if (name == "isomer") return TaskSpec::Objective::Isomer;
  if (name == "constrained_potency") return TaskSpec::Objective::ConstrainedPotency;
  if (name == "remote") return TaskSpec::Objective::Remote;
  throw std::runtime_error("unknown objective kind: " + name);
}

// "maccs_sim clip t=0.8" / "tpsa max_gauss mu=100 sigma=10" / "qed" / "alogp w=2"
TaskComponent parse_component(const std::string& name, const std::string& text) {
  TaskComponent c;
  c.name = name;
  std::istringstream ls(text);
  if (!(ls >> c.property)) throw std::runtime_error("component missing property: " + name);
  std::string tok;
  while (ls >> tok) {
    if (tok == "clip") c.modifier.kind = Modifier::Kind::Clip;
    else if (tok == "min_gauss") c.modifier.kind = Modifier::Kind::MinGauss;
    else if (tok == "max_gauss") c.modifier.kind = Modifier::Kind::MaxGauss;
    else if (tok == "identity") c.modifier.kind = Modifier::Kind::Identity;
    else {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("malformed component token '" + tok + "' in " + name);
      std::string key = tok.substr(0, eq);
      double value = std::stod(tok.substr(eq + 1));
      if (key == "t") c.modifier.t = value;
      else if (key == "mu") c.modifier.mu = value;
      else if (key == "sigma") c.modifier.sigma = value;
      else if (key == "w") c.weight = value;
      else throw std::runtime_error("unknown component parameter '" + key + "' in " + name);
    }
  }
  if (c.weight <= 0) throw std::runtime_error("component weight must be positive: " + name);
  if ((c.modifier.kind == Modifier::Kind::MinGauss ||
       c.modifier.kind == Modifier::Kind::MaxGauss) &&
      c.modifier.sigma <= 0)
    throw std::runtime_error("gaussian modifier needs sigma > 0 in component: " + name);
  if (c.modifier.kind == Modifier::Kind::Clip && (c.modifier.t <= 0 || c.modifier.t > 1))
    throw std::runtime_error("clip threshold must lie in (0,1] in component: " + name);
  return c;
}

}  // namespace

TaskSpec load_task(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task file: " + path);
  TaskSpec spec;
  std::string line;
  std::string description_file;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed task line: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "task_id") spec.task_id = value;
    else if (key == "objective") spec.objective = parse_objective(value);
    else if (key == "direction") {
      if (value == "maximize") spec.direction = Direction::Maximize;
      else if (value == "minimize") spec.direction = Direction::Minimize;
      else throw std::runtime_error("unknown direction: " + value);
    } else if (key == "budget") spec.budget = std::stoi(value);
    else if (key == "mode") spec.mode = parse_info_mode(value);
    else if (key == "target_score") spec.target_score = std::stod(value);
    else if (key == "reference") spec.reference_smiles = value;
    else if (key == "formula") spec.reference_formula = parse_formula(value);
    else if (key == "description") spec.description_text = value;
    else if (key == "description_file") description_file = value;
    else if (key == "predictor_file") spec.predictor_file = value;
    else if (key == "novelty_file") spec.novelty_file = value;
    else if (key == "qed_min") spec.qed_min = std::stod(value);
    else if (key == "endpoint") spec.endpoint = value;
    else if (key == "timeout_s") spec.timeout_s = std::stod(value);
    else if (key.rfind("component.", 0) == 0)
      spec.components.push_back(parse_component(key.substr(10), value));
    else throw std::runtime_error("unknown task key: " + key);
  }
  if (spec.budget < 1) throw std::runtime_error("budget must be >= 1");
  for (std::size_t i = 0; i < spec.components.size(); ++i)
    for (std::size_t j = i + 1; j < spec.components.size(); ++j)
      if (spec.components[i].name == spec.components[j].name)
        throw std::runtime_error("duplicate component name: " + spec.components[i].name);

  // resource paths resolve relative to the task file
  auto resolve = [&](std::string& p) {
    if (!p.empty() && p[0] != '/') p = dirname_of(path) + "/" + p;
  };
  resolve(spec.predictor_file);
  resolve(spec.novelty_file);
  if (!description_file.empty()) {
    std::string full = description_file;
    resolve(full);
    std::ifstream df(full);
    if (!df) throw std::runtime_error("cannot open description file: " + full);
    std::ostringstream body;
    body << df.rdbuf();
    spec.description_text = body.str();
    while (!spec.description_text.empty() && spec.description_text.back() == '\n')
      spec.description_text.pop_back();
  }
  return spec;
}

}  // namespace molopt
