#include <cmath>
#include <limits>

#include <httplib.h>
#include <json.hpp>

#include "molopt/oracles.hpp"

namespace molopt {

namespace {

struct EndpointParts {
  std::string base;  // scheme://host:port
  std::string path;
};

EndpointParts split_endpoint(const std::string& endpoint) {
  EndpointParts parts;
  auto scheme = endpoint.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = endpoint.find('/', host_start);
  if (slash == std::string::npos) {
    parts.base = endpoint;
    parts.path = "/";
  } else {
    parts.base = endpoint.substr(0, slash);
    parts.path = endpoint.substr(slash);
  }
  return parts;
}

OracleOutcome nan_outcome() {
  OracleOutcome out;
  out.aggregate = std::numeric_limits<double>::quiet_NaN();
  out.subscores.emplace_back("binding_probability", out.aggregate);
  return out;
}

}  // namespace

OracleOutcome remote_evaluate(const Molecule& m, const std::string& endpoint, double timeout_s,
                              const std::string& task_id) {
  EndpointParts parts = split_endpoint(endpoint);
  httplib::Client client(parts.base);
  auto seconds = static_cast<time_t>(timeout_s);
  auto micros = static_cast<time_t>((timeout_s - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  nlohmann::json request{{"smiles", write_smiles(m)}, {"task_id", task_id}};
  auto res = client.Post(parts.path, request.dump(), "application/json");
  if (!res || res->status != 200) return nan_outcome();

  nlohmann::ordered_json body;
  try {
    body = nlohmann::ordered_json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    return nan_outcome();
  }

  double probability = std::numeric_limits<double>::quiet_NaN();
  if (body.contains("probability") && body["probability"].is_number())
    probability = body["probability"].get<double>();
  else if (body.contains("affinity_probability_binary") &&
           body["affinity_probability_binary"].is_number())
    probability = body["affinity_probability_binary"].get<double>();
  if (!std::isfinite(probability)) return nan_outcome();

  OracleOutcome out;
  out.aggregate = probability;
  out.subscores.emplace_back("binding_probability", probability);

  std::vector<std::string> residues;
  std::vector<std::pair<std::string, double>> confidences;
  if (body.contains("residues") && body["residues"].is_array())
    for (const auto& r : body["residues"])
      if (r.is_string()) residues.push_back(r.get<std::string>());
  if (body.contains("confidence") && body["confidence"].is_object())
    for (const auto& [key, value] : body["confidence"].items())
      if (value.is_number()) confidences.emplace_back(key, value.get<double>());
  if (!residues.empty() || !confidences.empty())
    out.explanations.emplace_back("binding",
                                  remote_passthrough(std::move(residues), std::move(confidences)));
  return out;
}

}  // namespace molopt
