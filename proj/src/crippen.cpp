#include <fstream>
#include <sstream>

#include "molopt/datapath.hpp"
#include "molopt/properties.hpp"

namespace molopt {

namespace {

struct CrippenRow {
  std::string type;
  std::string smarts;
  double logp = 0.0;
  Pattern pattern;    // heavy rows: anchored at the typed atom
  bool hydrogen_row = false;
  bool trivial_h = false;  // [#1] with no environment: the fallback row
};

const std::vector<CrippenRow>& crippen_rows() {
  static const std::vector<CrippenRow> rows = [] {
    std::vector<CrippenRow> out;
    std::ifstream in(data_file("crippen.txt"));
    if (!in) throw std::runtime_error("cannot open crippen.txt");
    std::string line;
    if (!std::getline(in, line) || line.rfind("# crippen-logp ", 0) != 0)
      throw std::runtime_error("crippen.txt missing version header");
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      CrippenRow row;
      ls >> row.type >> row.smarts >> row.logp;
      if (!ls) throw std::runtime_error("malformed crippen row: " + line);
      if (row.smarts.rfind("[#1]", 0) == 0) {
        row.hydrogen_row = true;
        std::string rest = row.smarts.substr(4);
        if (rest.empty()) {
          row.trivial_h = true;
        } else {
          row.pattern = compile_pattern(rest);
        }
      } else {
        row.pattern = compile_pattern(row.smarts);
      }
      out.push_back(std::move(row));
    }
    return out;
  }();
  return rows;
}

}  // namespace

double crippen_logp(const Molecule& m) {
  const auto& rows = crippen_rows();
  double total = 0.0;
  for (const Atom& a : m.atoms()) {
    // heavy-atom type: first matching non-hydrogen row
    for (const CrippenRow& row : rows) {
      if (row.hydrogen_row) continue;
      if (matches_at(row.pattern, m, a.index)) {
        total += row.logp;
        break;
      }
    }
    int h = m.hydrogen_count(a.index);
    if (h == 0) continue;
    // hydrogen type: the pattern tail is matched anchored at the parent atom
    double h_contrib = 0.0;
    for (const CrippenRow& row : rows) {
      if (!row.hydrogen_row) continue;
      if (row.trivial_h || matches_at(row.pattern, m, a.index)) {
        h_contrib = row.logp;
        break;
      }
    }
    total += h * h_contrib;
  }
  return total;
}

}  // namespace molopt
