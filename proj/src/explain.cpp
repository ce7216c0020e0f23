#include <algorithm>
#include <cmath>
#include <sstream>

#include "molopt/explain.hpp"

namespace molopt {

InfoMode parse_info_mode(const std::string& name) {
  if (name == "no_description") return InfoMode::NoDescription;
  if (name == "no_explanation") return InfoMode::NoExplanation;
  if (name == "partial_explanation") return InfoMode::PartialExplanation;
  if (name == "full_explanation") return InfoMode::FullExplanation;
  throw std::runtime_error("unknown information mode: " + name);
}

std::string to_string(InfoMode mode) {
  switch (mode) {
    case InfoMode::NoDescription: return "no_description";
    case InfoMode::NoExplanation: return "no_explanation";
    case InfoMode::PartialExplanation: return "partial_explanation";
    case InfoMode::FullExplanation: return "full_explanation";
  }
  return "no_explanation";
}

namespace {

std::string fixed(double v, int places) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(places);
  os << v;
  return os.str();
}

// value formatting per property: counts print as integers
std::string qed_value_text(int property, double v) {
  switch (property) {
    case 0: case 1: case 4:
      return fixed(v, 2);
    default:
      return std::to_string(static_cast<long>(std::llround(v)));
  }
}

}  // namespace

ExplanationPayload explain_qed(const QedResult& q) {
  ExplanationPayload p;
  p.kind = ExplanationPayload::Kind::QedDecomposition;
  p.qed = q;
  std::ostringstream os;
  os << "Weighted log contributions (closer to 0 = better, negative values hurt score):\n\n";
  for (int i = 0; i < 8; ++i) {
    os << DescriptorSet::names()[static_cast<std::size_t>(i)] << ": "
       << fixed(q.contributions[static_cast<std::size_t>(i)], 3) << " (value="
       << qed_value_text(i, q.values[static_cast<std::size_t>(i)]) << ", optimal="
       << q.optimal_ranges[static_cast<std::size_t>(i)];
    if (i == 0) os << " Da";
    os << ")\n";
  }
  p.rendered = os.str();
  return p;
}

ExplanationPayload explain_similarity(const Fingerprint& target, const Fingerprint& query) {
  if (target.key_table_version != query.key_table_version)
    throw std::runtime_error("fingerprint key-table version mismatch in similarity diff");
  ExplanationPayload p;
  p.kind = ExplanationPayload::Kind::SimilarityDiff;
  for (int k = 1; k <= 166; ++k) {
    bool t = target.bits.test(static_cast<std::size_t>(k));
    bool q = query.bits.test(static_cast<std::size_t>(k));
    if (t && !q) p.sim.target_only.push_back(k);
    if (q && !t) p.sim.query_only.push_back(k);
  }
  const MaccsTable& table = MaccsTable::instance();
  auto section = [&](std::ostringstream& os, const std::vector<int>& keys, const char* in,
                     const char* not_in) {
    os << "The following " << keys.size() << " features are present in " << in
       << " but not in " << not_in << " (reducing similarity):\n";
    for (int k : keys) {
      const MaccsKey* key = table.find(k);
      os << "\nKey " << k << ": " << (key ? key->display() : "?");
    }
    os << "\n";
  };
  std::ostringstream os;
  section(os, p.sim.target_only, "TARGET", "QUERY");
  os << "\n\n";
  section(os, p.sim.query_only, "QUERY", "TARGET");
  p.rendered = os.str();
  return p;
}

ExplanationPayload attribution_table(const AdditivePredictor& pred, const Fingerprint& fp) {
  ExplanationPayload p;
  p.kind = ExplanationPayload::Kind::AttributionTable;
  auto& a = p.attribution;
  a.prediction = pred.predict(fp);
  a.expected_value = pred.expected_value();
  for (int b = 1; b <= 166; ++b) {
    double x = fp.bits.test(static_cast<std::size_t>(b)) ? 1.0 : 0.0;
    double attr = pred.weights[static_cast<std::size_t>(b)] *
                  (x - pred.baseline[static_cast<std::size_t>(b)]);
    if (pred.weights[static_cast<std::size_t>(b)] == 0.0) continue;
    a.rows.push_back({attr, x > 0.5, b});
    a.total += attr;
  }
  std::stable_sort(a.rows.begin(), a.rows.end(),
                   [](const auto& x, const auto& y) { return x.attribution > y.attribution; });

  const MaccsTable& table = MaccsTable::instance();
  auto row_text = [&](const ExplanationPayload::Attribution::Row& r) {
    const MaccsKey* key = table.find(r.key);
    std::ostringstream os;
    os << "| " << fixed(r.attribution, 6) << " | " << (r.present ? 1 : 0) << " | " << r.key
       << " | " << (key ? key->display() : "?") << " |\n";
    return os.str();
  };
  const char* header =
      "| Attribution | MACCS fingerprint value | MACCS key | SMARTS substructure |\n"
      "|-------------|-------------------------|-----------|---------------------|\n";

  std::ostringstream os;
  os << "The following attribution values are calculated using SHAP. These are dependent on "
        "the individual input:\n\n";
  os << "error of SHAP = prediction - (expected value + total SHAP attribution)\n";
  os << "prediction (pIC50) = " << fixed(a.prediction, 6) << "\n";
  os << "expected value = " << fixed(a.expected_value, 6) << "\n";
  os << "total SHAP attribution = " << fixed(a.total, 6) << "\n";
  os << "error = 0\n\n\n";
  os << "Top 10: highest attribution values (pushing towards higher pIC50 values therefore "
        "lower IC50 values):\n\n";
  os << header;
  int shown = 0;
  for (const auto& r : a.rows) {
    if (shown >= 10 || r.attribution == 0.0) break;
    os << row_text(r);
    ++shown;
  }
  os << "\n\nBottom 10: lowest attribution values (pushing towards lower pIC50 values "
        "therefore higher IC50 values):\n\n";
  os << header;
  std::vector<ExplanationPayload::Attribution::Row> bottom(a.rows);
  std::reverse(bottom.begin(), bottom.end());
  shown = 0;
  for (const auto& r : bottom) {
    if (shown >= 10 || r.attribution == 0.0) break;
    os << row_text(r);
    ++shown;
  }
  p.rendered = os.str();
  return p;
}

ExplanationPayload remote_passthrough(std::vector<std::string> residues,
                                      std::vector<std::pair<std::string, double>> confidences) {
  ExplanationPayload p;
  p.kind = ExplanationPayload::Kind::RemotePassthrough;
  p.remote.residues = std::move(residues);
  p.remote.confidences = std::move(confidences);
  std::ostringstream os;
  os << "Close Residues (within 5.0 Å):\n\n";
  for (std::size_t i = 0; i < p.remote.residues.size(); ++i) {
    if (i) os << ", ";
    os << p.remote.residues[i];
  }
  os << "\n\n\nConfidence Scores:\n\n";
  for (const auto& [name, value] : p.remote.confidences)
    os << name << ": " << fixed(value, 4) << "\n";
  p.rendered = os.str();
  return p;
}

std::string verbalize(const std::vector<std::pair<std::string, ExplanationPayload>>& payloads,
                      InfoMode mode) {
  if (mode == InfoMode::NoDescription || mode == InfoMode::NoExplanation) return "";
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, payload] : payloads) {
    if (mode == InfoMode::PartialExplanation &&
        payload.kind != ExplanationPayload::Kind::QedDecomposition)
      continue;
    if (!first) os << "\n\n";
    first = false;
    os << payload.rendered;
  }
  return os.str();
}

}  // namespace molopt
