#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "molopt/explain.hpp"

using namespace molopt;

namespace {

// Brute-force Shapley values over all feature subsets for the additive model.
// Value of a coalition S: features in S take their observed value, the rest
// their baseline expectation.
std::vector<double> shapley_brute_force(const AdditivePredictor& pred,
                                        const Fingerprint& fp,
                                        const std::vector<int>& features) {
  std::size_t n = features.size();
  auto coalition_value = [&](unsigned mask) {
    double v = pred.intercept;
    for (std::size_t i = 0; i < n; ++i) {
      int b = features[i];
      double x = fp.bits.test(static_cast<std::size_t>(b)) ? 1.0 : 0.0;
      double e = pred.baseline[static_cast<std::size_t>(b)];
      v += pred.weights[static_cast<std::size_t>(b)] * ((mask >> i) & 1u ? x : e);
    }
    return v;
  };
  std::vector<double> fact(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if ((mask >> i) & 1u) continue;
      unsigned s = static_cast<unsigned>(std::popcount(mask));
      double weight = fact[s] * fact[n - s - 1] / fact[n];
      phi[i] += weight * (coalition_value(mask | (1u << i)) - coalition_value(mask));
    }
  }
  return phi;
}

// Pull the 8 printed contribution values back out of a rendered QED block.
std::vector<double> reparse_contributions(const std::string& rendered) {
  std::istringstream in(rendered);
  std::string line;
  std::vector<double> out;
  while (std::getline(in, line)) {
    auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    auto paren = line.find(" (value=");
    if (paren == std::string::npos) continue;
    out.push_back(std::stod(line.substr(colon + 2, paren - colon - 2)));
  }
  return out;
}

}  // namespace

TEST_CASE("qed explanation header and format") {
  QedResult q = qed(descriptors(parse_smiles("Fc1ccc(S(=O)(=O)Nc2nc3ccccc3s2)cc1C(=O)NC1CCCCC1")));
  ExplanationPayload p = explain_qed(q);
  CHECK(p.rendered.rfind(
            "Weighted log contributions (closer to 0 = better, negative values hurt score):",
            0) == 0);
  // one line per property in canonical order
  for (const auto& name : DescriptorSet::names())
    CHECK(p.rendered.find("\n" + name + ": ") != std::string::npos);
  CHECK(p.rendered.find(" Da)") != std::string::npos);  // MW range carries units
  CHECK(p.rendered.find("MW: ") < p.rendered.find("ALOGP: "));
  CHECK(p.rendered.find("AROM: ") < p.rendered.find("ALERTS: "));
}

TEST_CASE("contribution at the mode prints as -0.000") {
  DescriptorSet d;
  d.MW = 306.0;  // a hair off the exact mode: tiny negative contribution
  d.ALOGP = 2.81;
  d.HBA = 3;
  d.HBD = 1;
  d.PSA = 53.0;
  d.ROTB = 3;
  d.AROM = 2;
  d.ALERTS = 0;
  ExplanationPayload p = explain_qed(qed(d));
  CHECK(p.rendered.find("MW: -0.000 ") != std::string::npos);
}

TEST_CASE("rendered block reparses to the contribution vector") {
  QedResult q = qed(descriptors(parse_smiles("Cc1ccc2nc(NC(=O)CN3CCOCC3)sc2c1F")));
  auto parsed = reparse_contributions(explain_qed(q).rendered);
  REQUIRE(parsed.size() == 8);
  for (int i = 0; i < 8; ++i)
    CHECK(parsed[static_cast<std::size_t>(i)] ==
          doctest::Approx(q.contributions[static_cast<std::size_t>(i)]).epsilon(0.0006));
}

TEST_CASE("similarity diff: identical fingerprints") {
  Fingerprint fp = maccs_fingerprint(parse_smiles("c1ccsc1"));
  ExplanationPayload p = explain_similarity(fp, fp);
  CHECK(p.sim.target_only.empty());
  CHECK(p.sim.query_only.empty());
  CHECK(p.rendered.find("The following 0 features are present in TARGET but not in QUERY") !=
        std::string::npos);
  CHECK(p.rendered.find("The following 0 features are present in QUERY but not in TARGET") !=
        std::string::npos);
}

TEST_CASE("similarity diff: quercetin pair reproduces the reference sections") {
  Fingerprint target =
      maccs_fingerprint(parse_smiles("O=C1c3c(O/C(=C1/O)c2ccc(O)c(O)c2)cc(O)cc3O"));
  Fingerprint query =
      maccs_fingerprint(parse_smiles("O=C1c2c(OC)cc(O)cc2OC(=C1OC)c3ccc(OC)cc3"));
  ExplanationPayload p = explain_similarity(target, query);
  CHECK(p.sim.target_only == std::vector<int>{53, 54, 131});
  CHECK(p.sim.query_only == std::vector<int>{93, 126, 141, 149, 160});
  CHECK(p.rendered.find("The following 3 features are present in TARGET but not in QUERY "
                        "(reducing similarity):") != std::string::npos);
  CHECK(p.rendered.find("Key 53: [!#6;!#1;!H0]~*~*~*~[!#6;!#1;!H0]") != std::string::npos);
  CHECK(p.rendered.find("Key 131: [!#6;!#1;!H0] (count > 1)") != std::string::npos);
  CHECK(p.rendered.find("The following 5 features are present in QUERY but not in TARGET "
                        "(reducing similarity):") != std::string::npos);
  CHECK(p.rendered.find("Key 141: [CH3] (count > 2)") != std::string::npos);
  CHECK(p.rendered.find("Key 149: [C;H3,H4] (count > 1)") != std::string::npos);
  CHECK(p.rendered.find("Key 160: [C;H3,H4]") != std::string::npos);
}

TEST_CASE("similarity diff: single differing bit") {
  Fingerprint a, b;
  a.key_table_version = b.key_table_version = MaccsTable::instance().version();
  a.bits.set(88);
  ExplanationPayload p = explain_similarity(a, b);
  CHECK(p.sim.target_only == std::vector<int>{88});
  CHECK(p.rendered.find("Key 88: [#16]") != std::string::npos);
}

TEST_CASE("similarity diff sections partition differing bits") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Fingerprint a, b;
    a.key_table_version = b.key_table_version = "x";
    for (int k = 1; k <= 166; ++k) {
      if (rng() % 2) a.bits.set(static_cast<std::size_t>(k));
      if (rng() % 2) b.bits.set(static_cast<std::size_t>(k));
    }
    ExplanationPayload p = explain_similarity(a, b);
    for (int k = 1; k <= 166; ++k) {
      bool in_t = std::find(p.sim.target_only.begin(), p.sim.target_only.end(), k) !=
                  p.sim.target_only.end();
      bool in_q = std::find(p.sim.query_only.begin(), p.sim.query_only.end(), k) !=
                  p.sim.query_only.end();
      bool differs = a.bits.test(static_cast<std::size_t>(k)) !=
                     b.bits.test(static_cast<std::size_t>(k));
      CHECK((in_t || in_q) == differs);
      CHECK(!(in_t && in_q));
    }
  }
}

TEST_CASE("attribution: zero-weight predictor") {
  AdditivePredictor pred;
  pred.intercept = 5.0;
  Fingerprint fp = maccs_fingerprint(parse_smiles("c1ccsc1"));
  ExplanationPayload p = attribution_table(pred, fp);
  CHECK(p.attribution.rows.empty());
  CHECK(p.attribution.prediction == doctest::Approx(5.0));
  CHECK(p.attribution.total == 0.0);
}

TEST_CASE("attribution: single feature arithmetic") {
  AdditivePredictor pred;
  pred.intercept = 5.0;
  pred.weights[88] = 1.0;
  pred.baseline[88] = 0.5;
  Fingerprint fp;
  fp.key_table_version = MaccsTable::instance().version();
  fp.bits.set(88);
  ExplanationPayload p = attribution_table(pred, fp);
  REQUIRE(p.attribution.rows.size() == 1);
  CHECK(p.attribution.rows[0].attribution == doctest::Approx(0.5));
  CHECK(p.attribution.prediction - p.attribution.expected_value == doctest::Approx(0.5));
  CHECK(p.rendered.find("| 88 | [#16] |") != std::string::npos);
  CHECK(p.rendered.find("error = 0") != std::string::npos);
}

TEST_CASE("attribution completeness and brute-force Shapley agreement") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> wdist(-1.0, 1.0), edist(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    AdditivePredictor pred;
    pred.intercept = wdist(rng) * 10;
    std::vector<int> features;
    int nf = 3 + static_cast<int>(rng() % 10);  // up to 12 features
    while (static_cast<int>(features.size()) < nf) {
      int b = 1 + static_cast<int>(rng() % 166);
      if (pred.weights[static_cast<std::size_t>(b)] == 0.0) {
        pred.weights[static_cast<std::size_t>(b)] = wdist(rng);
        pred.baseline[static_cast<std::size_t>(b)] = edist(rng);
        features.push_back(b);
      }
    }
    Fingerprint fp;
    fp.key_table_version = "x";
    for (int k = 1; k <= 166; ++k)
      if (rng() % 2) fp.bits.set(static_cast<std::size_t>(k));

    ExplanationPayload p = attribution_table(pred, fp);
    CHECK(std::abs(p.attribution.prediction - p.attribution.expected_value -
                   p.attribution.total) <= 1e-9);

    auto phi = shapley_brute_force(pred, fp, features);
    for (std::size_t i = 0; i < features.size(); ++i) {
      double linear = 0.0;
      for (const auto& row : p.attribution.rows)
        if (row.key == features[i]) linear = row.attribution;
      CHECK(std::abs(linear - phi[i]) <= 1e-9);
    }
  }
}

TEST_CASE("rendering determinism") {
  QedResult q = qed(descriptors(parse_smiles("CCO")));
  CHECK(explain_qed(q).rendered == explain_qed(q).rendered);
  Fingerprint a = maccs_fingerprint(parse_smiles("CCO"));
  Fingerprint b = maccs_fingerprint(parse_smiles("CCN"));
  CHECK(explain_similarity(a, b).rendered == explain_similarity(a, b).rendered);
}

TEST_CASE("verbalize modes") {
  QedResult q = qed(descriptors(parse_smiles("CCO")));
  AdditivePredictor pred;
  pred.intercept = 5.0;
  pred.weights[88] = 0.4;
  std::vector<std::pair<std::string, ExplanationPayload>> payloads;
  payloads.emplace_back("IC50",
                        attribution_table(pred, maccs_fingerprint(parse_smiles("CCO"))));
  payloads.emplace_back("qed", explain_qed(q));

  CHECK(verbalize(payloads, InfoMode::NoExplanation).empty());
  CHECK(verbalize(payloads, InfoMode::NoDescription).empty());

  std::string partial = verbalize(payloads, InfoMode::PartialExplanation);
  CHECK(partial.find("Weighted log contributions") != std::string::npos);
  CHECK(partial.find("SHAP") == std::string::npos);

  std::string full = verbalize(payloads, InfoMode::FullExplanation);
  CHECK(full.find("Weighted log contributions") != std::string::npos);
  CHECK(full.find("SHAP") != std::string::npos);
  // component order preserved
  CHECK(full.find("SHAP") < full.find("Weighted log contributions"));
}

TEST_CASE("remote passthrough rendering") {
  ExplanationPayload p = remote_passthrough(
      {"THR-26", "HIS-42"}, {{"confidence_score", 0.9855}, {"ptm", 0.9857}});
  CHECK(p.rendered.find("Close Residues (within 5.0 Å):") != std::string::npos);
  CHECK(p.rendered.find("THR-26, HIS-42") != std::string::npos);
  CHECK(p.rendered.find("confidence_score: 0.9855") != std::string::npos);
  CHECK(p.rendered.find("ptm: 0.9857") != std::string::npos);
}
