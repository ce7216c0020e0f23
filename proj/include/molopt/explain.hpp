#ifndef MOLOPT_EXPLAIN_HPP
#define MOLOPT_EXPLAIN_HPP

#include <string>
#include <utility>
#include <vector>

#include "molopt/predictor.hpp"
#include "molopt/properties.hpp"
#include "molopt/substructure.hpp"

namespace molopt {

// Information level a run exposes to the agent.
enum class InfoMode { NoDescription, NoExplanation, PartialExplanation, FullExplanation };

InfoMode parse_info_mode(const std::string& name);
std::string to_string(InfoMode mode);

struct ExplanationPayload {
  enum class Kind { QedDecomposition, SimilarityDiff, AttributionTable, RemotePassthrough };
  Kind kind = Kind::QedDecomposition;

  // QedDecomposition
  QedResult qed;

  // SimilarityDiff
  struct SimilarityDiff {
    std::vector<int> target_only;
    std::vector<int> query_only;
  } sim;

  // AttributionTable
  struct Attribution {
    struct Row {
      double attribution = 0.0;
      bool present = false;
      int key = 0;
    };
    double prediction = 0.0;
    double expected_value = 0.0;
    double total = 0.0;
    std::vector<Row> rows;  // sorted by attribution, descending
  } attribution;

  // RemotePassthrough
  struct Remote {
    std::vector<std::string> residues;
    std::vector<std::pair<std::string, double>> confidences;
  } remote;

  std::string rendered;  // pure function of the structured body
};

ExplanationPayload explain_qed(const QedResult& q);
ExplanationPayload explain_similarity(const Fingerprint& target, const Fingerprint& query);
ExplanationPayload attribution_table(const AdditivePredictor& pred, const Fingerprint& fp);
ExplanationPayload remote_passthrough(std::vector<std::string> residues,
                                      std::vector<std::pair<std::string, double>> confidences);

// Mode-dependent concatenation of rendered payloads, in the given order.
// Partial mode keeps only the drug-likeness decomposition.
std::string verbalize(const std::vector<std::pair<std::string, ExplanationPayload>>& payloads,
                      InfoMode mode);

}  // namespace molopt

#endif
