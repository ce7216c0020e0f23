#ifndef MOLOPT_PROPERTIES_HPP
#define MOLOPT_PROPERTIES_HPP

#include <array>
#include <string>
#include <vector>

#include "molopt/molgraph.hpp"
#include "molopt/substructure.hpp"

namespace molopt {

// The eight QED descriptors, in the canonical explanation order.
struct DescriptorSet {
  double MW = 0.0;
  double ALOGP = 0.0;
  int HBA = 0;
  int HBD = 0;
  double PSA = 0.0;
  int ROTB = 0;
  int AROM = 0;
  int ALERTS = 0;

  double value(int i) const;
  static const std::array<std::string, 8>& names();
};

DescriptorSet descriptors(const Molecule& m);

// Individual descriptor routines (exposed for the MPO oracle terms).
double molecular_weight(const Molecule& m);
double crippen_logp(const Molecule& m);
double tpsa(const Molecule& m);
int hbond_acceptors(const Molecule& m);
int hbond_donors(const Molecule& m);
int rotatable_bonds(const Molecule& m);
int structural_alerts(const Molecule& m);
// Names of alert patterns the molecule matched.
std::vector<std::string> alert_hits(const Molecule& m);
// Alert-table entries that could not be compiled (unimplemented manifest).
const std::vector<std::string>& alert_unimplemented();

struct QedResult {
  double score = 0.0;
  std::array<double, 8> desirabilities{};
  // w_i * ln d_i, the weighted log contribution shown in explanations
  std::array<double, 8> contributions{};
  std::array<std::string, 8> optimal_ranges{};
  std::array<double, 8> values{};
};

// Weighted-geometric-mean QED over the published desirability functions.
QedResult qed(const DescriptorSet& d);

struct QedParameter {
  double a, b, c, d, e, f, dmax, weight;
};
const std::array<QedParameter, 8>& qed_parameters();
double qed_desirability(int property, double x);

}  // namespace molopt

#endif
