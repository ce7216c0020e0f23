#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "molopt/datapath.hpp"
#include "molopt/properties.hpp"

namespace molopt {

const std::array<std::string, 8>& DescriptorSet::names() {
  static const std::array<std::string, 8> n = {"MW",  "ALOGP", "HBA",  "HBD",
                                               "PSA", "ROTB",  "AROM", "ALERTS"};
  return n;
}

double DescriptorSet::value(int i) const {
  switch (i) {
    case 0: return MW;
    case 1: return ALOGP;
    case 2: return HBA;
    case 3: return HBD;
    case 4: return PSA;
    case 5: return ROTB;
    case 6: return AROM;
    case 7: return ALERTS;
    default: return 0.0;
  }
}

double molecular_weight(const Molecule& m) {
  double w = 0.0;
  for (const Atom& a : m.atoms())
    w += atomic_weight(a.atomic_number) + m.hydrogen_count(a.index) * 1.008;
  return w;
}

namespace {

// Amide-convention nitrogens (N single-bonded to C or S bearing =O) do not
// count as acceptors.
bool is_amide_nitrogen(const Molecule& m, int ni) {
  for (int ci : m.neighbors(ni)) {
    int z = m.atom(ci).atomic_number;
    if (z != 6 && z != 16) continue;
    int nb = m.bond_between(ni, ci);
    if (m.bond(nb).order != BondOrder::Single) continue;
    for (int k = 0; k < static_cast<int>(m.neighbors(ci).size()); ++k) {
      int oi = m.neighbors(ci)[static_cast<std::size_t>(k)];
      int ob = m.neighbor_bonds(ci)[static_cast<std::size_t>(k)];
      if (m.atom(oi).atomic_number == 8 && m.bond(ob).order == BondOrder::Double)
        return true;
    }
  }
  return false;
}

bool is_pyrrole_type_nitrogen(const Molecule& m, int ni) {
  const Atom& a = m.atom(ni);
  if (!a.aromatic) return false;
  return m.hydrogen_count(ni) > 0 || m.degree(ni) == 3;
}

struct AlertEntry {
  std::string name;
  std::string smarts;
  bool implemented = false;
  Pattern pattern;
};

struct AlertTable {
  std::vector<AlertEntry> entries;
  std::vector<std::string> unimplemented;
};

const AlertTable& alert_table() {
  static const AlertTable table = [] {
    AlertTable t;
    std::ifstream in(data_file("alerts.txt"));
    if (!in) throw std::runtime_error("cannot open alerts.txt");
    std::string line;
    if (!std::getline(in, line) || line.rfind("# structural-alerts ", 0) != 0)
      throw std::runtime_error("alerts.txt missing version header");
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      AlertEntry e;
      ls >> e.name >> e.smarts;
      if (!ls) throw std::runtime_error("malformed alert row: " + line);
      try {
        e.pattern = compile_pattern(e.smarts);
        e.implemented = true;
      } catch (const PatternError&) {
        t.unimplemented.push_back(e.name);
      }
      t.entries.push_back(std::move(e));
    }
    return t;
  }();
  return table;
}

}  // namespace

int hbond_acceptors(const Molecule& m) {
  int n = 0;
  for (const Atom& a : m.atoms()) {
    if (a.atomic_number == 8) {
      ++n;
    } else if (a.atomic_number == 7) {
      if (is_pyrrole_type_nitrogen(m, a.index)) continue;
      if (is_amide_nitrogen(m, a.index)) continue;
      ++n;
    }
  }
  return n;
}

int hbond_donors(const Molecule& m) {
  int n = 0;
  for (const Atom& a : m.atoms())
    if ((a.atomic_number == 7 || a.atomic_number == 8) && m.hydrogen_count(a.index) > 0)
      ++n;
  return n;
}

int rotatable_bonds(const Molecule& m) {
  int n = 0;
  for (const Bond& b : m.bonds()) {
    if (b.order != BondOrder::Single || b.in_ring) continue;
    if (m.degree(b.a) < 2 || m.degree(b.b) < 2) continue;
    // amide C-N bonds do not rotate freely
    auto amide = [&](int ci, int ni) {
      if (m.atom(ci).atomic_number != 6 || m.atom(ni).atomic_number != 7) return false;
      for (int k = 0; k < static_cast<int>(m.neighbors(ci).size()); ++k) {
        int oi = m.neighbors(ci)[static_cast<std::size_t>(k)];
        int ob = m.neighbor_bonds(ci)[static_cast<std::size_t>(k)];
        if (m.atom(oi).atomic_number == 8 && m.bond(ob).order == BondOrder::Double)
          return true;
      }
      return false;
    };
    if (amide(b.a, b.b) || amide(b.b, b.a)) continue;
    ++n;
  }
  return n;
}

int structural_alerts(const Molecule& m) {
  int n = 0;
  for (const AlertEntry& e : alert_table().entries)
    if (e.implemented && has_count_at_least(e.pattern, m, 1)) ++n;
  return n;
}

std::vector<std::string> alert_hits(const Molecule& m) {
  std::vector<std::string> hits;
  for (const AlertEntry& e : alert_table().entries)
    if (e.implemented && has_count_at_least(e.pattern, m, 1)) hits.push_back(e.name);
  return hits;
}

const std::vector<std::string>& alert_unimplemented() {
  return alert_table().unimplemented;
}

DescriptorSet descriptors(const Molecule& m) {
  DescriptorSet d;
  d.MW = molecular_weight(m);
  d.ALOGP = crippen_logp(m);
  d.HBA = hbond_acceptors(m);
  d.HBD = hbond_donors(m);
  d.PSA = tpsa(m);
  d.ROTB = rotatable_bonds(m);
  d.AROM = m.aromatic_ring_count();
  d.ALERTS = structural_alerts(m);
  return d;
}

namespace {

struct QedTable {
  std::array<QedParameter, 8> params;
  std::array<std::string, 8> ranges;
};

double ads(const QedParameter& p, double x) {
  double v = p.a + p.b / (1.0 + std::exp(-(x - p.c + p.d / 2.0) / p.e)) *
                       (1.0 - 1.0 / (1.0 + std::exp(-(x - p.c - p.d / 2.0) / p.f)));
  return std::min(1.0, std::max(1e-12, v / p.dmax));
}

std::string format_range(int property, double lo, double hi) {
  std::ostringstream os;
  bool integral = property != 0 && property != 1 && property != 4;
  if (property == 1) {  // ALOGP keeps two decimals
    os.setf(std::ios::fixed);
    os.precision(2);
    if (hi - lo < 0.005)
      os << lo;
    else
      os << lo << "-" << hi;
    return os.str();
  }
  long l = integral ? static_cast<long>(lo) : static_cast<long>(std::ceil(lo - 1e-9));
  long h = integral ? static_cast<long>(hi) : static_cast<long>(std::floor(hi + 1e-9));
  if (l >= h)
    os << l;
  else
    os << l << "-" << h;
  return os.str();
}

const QedTable& qed_table() {
  static const QedTable table = [] {
    QedTable t;
    std::ifstream in(data_file("qed_params.txt"));
    if (!in) throw std::runtime_error("cannot open qed_params.txt");
    std::string line;
    if (!std::getline(in, line) || line.rfind("# qed-params ", 0) != 0)
      throw std::runtime_error("qed_params.txt missing version header");
    int idx = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string name;
      QedParameter p{};
      ls >> name >> p.a >> p.b >> p.c >> p.d >> p.e >> p.f >> p.dmax >> p.weight;
      if (!ls) throw std::runtime_error("malformed qed parameter row: " + line);
      if (idx >= 8 || name != DescriptorSet::names()[static_cast<std::size_t>(idx)])
        throw std::runtime_error("qed parameter rows out of order at: " + line);
      t.params[static_cast<std::size_t>(idx)] = p;
      ++idx;
    }
    if (idx != 8) throw std::runtime_error("qed_params.txt holds fewer than 8 rows");

    // Display ranges: where the desirability reaches 0.8 of its maximum.
    for (int i = 0; i < 8; ++i) {
      const QedParameter& p = t.params[static_cast<std::size_t>(i)];
      bool integral = i != 0 && i != 1 && i != 4;
      double lo = 0.0, hi = 0.0, step = 0.0;
      switch (i) {
        case 0: lo = 0, hi = 1000, step = 0.01; break;    // MW
        case 1: lo = -10, hi = 12, step = 0.001; break;   // ALOGP
        case 4: lo = 0, hi = 300, step = 0.01; break;     // PSA
        default: lo = 0, hi = 30, step = 1; break;
      }
      double dmax_seen = 0.0;
      for (double x = lo; x <= hi + step / 2; x += step)
        dmax_seen = std::max(dmax_seen, ads(p, x));
      double thr = 0.8 * dmax_seen;
      double first = lo, last = lo;
      bool found = false;
      for (double x = lo; x <= hi + step / 2; x += step) {
        if (ads(p, x) >= thr) {
          if (!found) first = x;
          last = x;
          found = true;
        }
      }
      (void)integral;
      t.ranges[static_cast<std::size_t>(i)] = format_range(i, first, last);
    }
    return t;
  }();
  return table;
}

}  // namespace

const std::array<QedParameter, 8>& qed_parameters() { return qed_table().params; }

double qed_desirability(int property, double x) {
  return ads(qed_table().params[static_cast<std::size_t>(property)], x);
}

QedResult qed(const DescriptorSet& d) {
  const QedTable& t = qed_table();
  QedResult r;
  double wsum = 0.0, acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    const QedParameter& p = t.params[static_cast<std::size_t>(i)];
    double x = d.value(i);
    double di = ads(p, x);
    r.values[static_cast<std::size_t>(i)] = x;
    r.desirabilities[static_cast<std::size_t>(i)] = di;
    r.contributions[static_cast<std::size_t>(i)] = p.weight * std::log(di);
    r.optimal_ranges[static_cast<std::size_t>(i)] = t.ranges[static_cast<std::size_t>(i)];
    wsum += p.weight;
    acc += p.weight * std::log(di);
  }
  r.score = std::exp(acc / wsum);
  return r;
}

}  // namespace molopt
