#include <algorithm>
#include <fstream>
#include <sstream>

#include "molopt/datapath.hpp"
#include "molopt/properties.hpp"

namespace molopt {

namespace {

struct TpsaRow {
  int element = 0;
  bool aromatic = false;
  int charge = 0;
  int hcount = 0;
  int singles = 0, doubles = 0, triples = 0, aromatics = 0;
  bool in3ring = false;
  double contribution = 0.0;
};

const std::vector<TpsaRow>& tpsa_rows() {
  static const std::vector<TpsaRow> rows = [] {
    std::vector<TpsaRow> out;
    std::ifstream in(data_file("tpsa.txt"));
    if (!in) throw std::runtime_error("cannot open tpsa.txt");
    std::string line;
    if (!std::getline(in, line) || line.rfind("# tpsa ", 0) != 0)
      throw std::runtime_error("tpsa.txt missing version header");
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string sym;
      TpsaRow r;
      int arom, ring3;
      ls >> sym >> arom >> r.charge >> r.hcount >> r.singles >> r.doubles >>
          r.triples >> r.aromatics >> ring3 >> r.contribution;
      if (!ls) throw std::runtime_error("malformed tpsa row: " + line);
      r.element = element_number(sym);
      r.aromatic = arom != 0;
      r.in3ring = ring3 != 0;
      out.push_back(r);
    }
    return out;
  }();
  return rows;
}

}  // namespace

double tpsa(const Molecule& m) {
  double total = 0.0;
  for (const Atom& a : m.atoms()) {
    if (a.atomic_number != 7 && a.atomic_number != 8) continue;
    int singles = 0, doubles = 0, triples = 0, aromatics = 0;
    for (int bi : m.neighbor_bonds(a.index)) {
      switch (m.bond(bi).order) {
        case BondOrder::Single: ++singles; break;
        case BondOrder::Double: ++doubles; break;
        case BondOrder::Triple: ++triples; break;
        case BondOrder::Aromatic: ++aromatics; break;
      }
    }
    bool in3 = false;
    for (const auto& ring : m.rings())
      if (ring.size() == 3 && std::find(ring.begin(), ring.end(), a.index) != ring.end())
        in3 = true;
    int h = m.hydrogen_count(a.index);

    double contrib = -1.0;
    for (const TpsaRow& r : tpsa_rows()) {
      if (r.element == a.atomic_number && r.aromatic == a.aromatic &&
          r.charge == a.charge && r.hcount == h && r.singles == singles &&
          r.doubles == doubles && r.triples == triples && r.aromatics == aromatics &&
          r.in3ring == in3) {
        contrib = r.contribution;
        break;
      }
    }
    if (contrib < 0.0) {
      // generic fallback for environments outside the published table
      int x = m.degree(a.index) + h;
      contrib = a.atomic_number == 7 ? 30.5 - x * 8.2 + h * 1.5
                                     : 28.5 - x * 8.6 + h * 1.5;
      contrib = std::max(0.0, contrib);
    }
    total += contrib;
  }
  return total;
}

}  // namespace molopt
