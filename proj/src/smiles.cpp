#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <numeric>
#include <sstream>
#include <tuple>

#include "molopt/molgraph.hpp"

namespace molopt {

namespace {

// Allowed valence sets per element for implicit-H derivation and validation.
std::vector<int> allowed_valences(int z, int charge) {
  switch (z) {
    case 5:  return charge == -1 ? std::vector<int>{4} : std::vector<int>{3};
    case 6:  return charge != 0 ? std::vector<int>{3} : std::vector<int>{4};
    case 7:
      if (charge > 0) return {4};
      if (charge < 0) return {2};
      return {3};
    case 8:
      if (charge > 0) return {3};
      if (charge < 0) return {1};
      return {2};
    case 15:
      if (charge > 0) return {4};
      return {3, 5};
    case 16:
      if (charge > 0) return {3, 5};
      if (charge < 0) return {1};
      return {2, 4, 6};
    case 9: case 17: case 35: case 53:
      return charge == 0 ? std::vector<int>{1} : std::vector<int>{};
    default:
      return {};  // no validation for exotic elements
  }
}

int order_x2(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 2;
    case BondOrder::Double: return 4;
    case BondOrder::Triple: return 6;
    case BondOrder::Aromatic: return 3;
  }
  return 2;
}

struct PendingBond {
  bool set = false;
  BondOrder order = BondOrder::Single;
  int stereo = 0;
  bool explicit_symbol = false;
};

struct RingClosure {
  int atom = -1;
  PendingBond bond;
  std::size_t position = 0;
};

[[noreturn]] void fail(const std::string& what, std::size_t pos0) {
  std::ostringstream os;
  os << "syntax error at position " << (pos0 + 1) << " (" << what << ")";
  throw SmilesError(os.str(), pos0 + 1);
}

[[noreturn]] void fail_valence(const std::string& what, std::size_t pos0) {
  std::ostringstream os;
  os << "valence error at position " << (pos0 + 1) << " (" << what << ")";
  throw SmilesError(os.str(), pos0 + 1);
}

int aromatic_default_h(int atomic_number, int base_order_sum, int degree) {
  switch (atomic_number) {
    case 6: return std::max(0, 3 - base_order_sum);
    case 5: return std::max(0, 2 - base_order_sum);
    case 7:
    case 15:
      return std::max(0, 3 - base_order_sum - (degree == 2 ? 1 : 0));
    default:
      return 0;  // o, s, se, te carry no implicit H in aromatic rings
  }
}

Atom parse_bracket_atom(std::string_view s, std::size_t& i, std::size_t open_pos) {
  Atom a;
  a.bracket = true;
  std::size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > start) a.isotope = std::stoi(std::string(s.substr(start, i - start)));
  if (i >= s.size()) fail("unclosed bracket", open_pos);

  if (s[i] == '*') {
    ++i;
    a.atomic_number = 0;
  } else if (std::isupper(static_cast<unsigned char>(s[i]))) {
    int z = -1;
    if (i + 1 < s.size() && std::islower(static_cast<unsigned char>(s[i + 1]))) {
      z = element_number(s.substr(i, 2));
      if (z > 0) i += 2;
    }
    if (z <= 0) {
      z = element_number(s.substr(i, 1));
      if (z <= 0) fail("unknown atom symbol", i);
      ++i;
    }
    a.atomic_number = z;
  } else if (std::islower(static_cast<unsigned char>(s[i]))) {
    static const struct { const char* sym; int z; } kAromatic2[] = {
        {"se", 34}, {"as", 33}, {"te", 52}};
    int z = -1;
    for (const auto& e2 : kAromatic2) {
      if (s.substr(i, 2) == e2.sym) {
        z = e2.z;
        i += 2;
        break;
      }
    }
    if (z < 0) {
      switch (s[i]) {
        case 'b': z = 5; break;
        case 'c': z = 6; break;
        case 'n': z = 7; break;
        case 'o': z = 8; break;
        case 'p': z = 15; break;
        case 's': z = 16; break;
        default: fail("unknown atom symbol", i);
      }
      ++i;
    }
    a.atomic_number = z;
    a.aromatic = true;
  } else {
    fail("unknown atom symbol", i);
  }

  // chirality marks are accepted and discarded (stereo is not modeled)
  if (i < s.size() && s[i] == '@') {
    ++i;
    if (i < s.size() && s[i] == '@') ++i;
  }
  a.explicit_h = 0;
  if (i < s.size() && s[i] == 'H') {
    ++i;
    a.explicit_h = 1;
    start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) a.explicit_h = std::stoi(std::string(s.substr(start, i - start)));
  }
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    char sign = s[i];
    int mag = 1;
    ++i;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      start = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      mag = std::stoi(std::string(s.substr(start, i - start)));
    } else {
      while (i < s.size() && s[i] == sign) {
        ++mag;
        ++i;
      }
    }
    a.charge = sign == '+' ? mag : -mag;
  }
  if (i < s.size() && s[i] == ':') {
    ++i;
    start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) fail("missing atom class number", i);
  }
  if (i >= s.size() || s[i] != ']') fail("unclosed bracket", open_pos);
  ++i;
  return a;
}

}  // namespace

int Molecule::add_atom(Atom a) {
  a.index = static_cast<int>(atoms_.size());
  atoms_.push_back(a);
  adj_.emplace_back();
  adj_bonds_.emplace_back();
  return a.index;
}

int Molecule::add_bond(int a, int b, BondOrder order, int stereo) {
  Bond bd;
  bd.a = a;
  bd.b = b;
  bd.order = order;
  bd.stereo = stereo;
  int idx = static_cast<int>(bonds_.size());
  bonds_.push_back(bd);
  adj_[static_cast<std::size_t>(a)].push_back(b);
  adj_[static_cast<std::size_t>(b)].push_back(a);
  adj_bonds_[static_cast<std::size_t>(a)].push_back(idx);
  adj_bonds_[static_cast<std::size_t>(b)].push_back(idx);
  return idx;
}

int Molecule::bond_between(int a, int b) const {
  const auto& nb = adj_[static_cast<std::size_t>(a)];
  for (std::size_t k = 0; k < nb.size(); ++k)
    if (nb[k] == b) return adj_bonds_[static_cast<std::size_t>(a)][k];
  return -1;
}

int Molecule::aromatic_ring_count() const {
  int n = 0;
  for (const auto& ring : rings_) {
    bool arom = true;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      int bi = bond_between(ring[i], ring[(i + 1) % ring.size()]);
      if (bi < 0 || bonds_[static_cast<std::size_t>(bi)].order != BondOrder::Aromatic) {
        arom = false;
        break;
      }
    }
    if (arom) ++n;
  }
  return n;
}

void Molecule::mark_ring_membership() {
  int n = atom_count();
  std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  int timer = 0;
  components_ = 0;
  std::vector<std::tuple<int, int, std::size_t>> stack;  // node, parent bond, cursor
  for (int root = 0; root < n; ++root) {
    if (disc[static_cast<std::size_t>(root)] != -1) continue;
    ++components_;
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    stack.emplace_back(root, -1, 0);
    while (!stack.empty()) {
      auto& [u, pbond, cursor] = stack.back();
      if (cursor < adj_[static_cast<std::size_t>(u)].size()) {
        std::size_t k = cursor++;
        int v = adj_[static_cast<std::size_t>(u)][k];
        int bi = adj_bonds_[static_cast<std::size_t>(u)][k];
        if (bi == pbond) continue;
        if (disc[static_cast<std::size_t>(v)] == -1) {
          disc[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = timer++;
          stack.emplace_back(v, bi, 0);
        } else {
          low[static_cast<std::size_t>(u)] =
              std::min(low[static_cast<std::size_t>(u)], disc[static_cast<std::size_t>(v)]);
          bonds_[static_cast<std::size_t>(bi)].in_ring = true;
        }
      } else {
        int u_done = u;
        int pb = pbond;
        stack.pop_back();
        if (!stack.empty()) {
          int pu = std::get<0>(stack.back());
          low[static_cast<std::size_t>(pu)] =
              std::min(low[static_cast<std::size_t>(pu)], low[static_cast<std::size_t>(u_done)]);
          if (low[static_cast<std::size_t>(u_done)] <= disc[static_cast<std::size_t>(pu)] && pb >= 0)
            bonds_[static_cast<std::size_t>(pb)].in_ring = true;
        }
      }
    }
  }
  for (const Bond& bd : bonds_) {
    if (bd.in_ring) {
      atoms_[static_cast<std::size_t>(bd.a)].in_ring = true;
      atoms_[static_cast<std::size_t>(bd.b)].in_ring = true;
    }
  }
}

void Molecule::build_ring_basis() {
  rings_.clear();
  int target = bond_count() - atom_count() + components_;
  if (target <= 0) return;

  // Candidate cycles: the shortest cycle through every ring bond.
  std::vector<std::vector<int>> candidates;  // atom cycles
  std::vector<std::vector<int>> cand_bonds;
  for (int bi = 0; bi < bond_count(); ++bi) {
    const Bond& bd = bonds_[static_cast<std::size_t>(bi)];
    if (!bd.in_ring) continue;
    // BFS from bd.a to bd.b avoiding bond bi.
    std::vector<int> prev_atom(atoms_.size(), -1), prev_bond(atoms_.size(), -1);
    std::deque<int> queue{bd.a};
    prev_atom[static_cast<std::size_t>(bd.a)] = bd.a;
    bool found = false;
    while (!queue.empty() && !found) {
      int u = queue.front();
      queue.pop_front();
      for (std::size_t k = 0; k < adj_[static_cast<std::size_t>(u)].size(); ++k) {
        int v = adj_[static_cast<std::size_t>(u)][k];
        int eb = adj_bonds_[static_cast<std::size_t>(u)][k];
        if (eb == bi || prev_atom[static_cast<std::size_t>(v)] != -1) continue;
        prev_atom[static_cast<std::size_t>(v)] = u;
        prev_bond[static_cast<std::size_t>(v)] = eb;
        if (v == bd.b) {
          found = true;
          break;
        }
        queue.push_back(v);
      }
    }
    if (!found) continue;
    std::vector<int> cycle_atoms;
    std::vector<int> cycle_bonds{bi};
    for (int v = bd.b; v != bd.a; v = prev_atom[static_cast<std::size_t>(v)]) {
      cycle_atoms.push_back(v);
      cycle_bonds.push_back(prev_bond[static_cast<std::size_t>(v)]);
    }
    cycle_atoms.push_back(bd.a);
    candidates.push_back(std::move(cycle_atoms));
    cand_bonds.push_back(std::move(cycle_bonds));
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return candidates[x].size() < candidates[y].size();
  });

  // Greedy GF(2) independence over bond incidence vectors.
  std::size_t words = static_cast<std::size_t>((bond_count() + 63) / 64);
  std::vector<std::vector<std::uint64_t>> basis;  // reduced rows
  auto reduce = [&](std::vector<std::uint64_t> v) {
    for (const auto& row : basis) {
      std::size_t pivot = 0;
      for (std::size_t w = 0; w < words; ++w)
        if (row[w]) { pivot = w; break; }
      // xor if v shares the row's leading bit
      std::uint64_t lead = row[pivot] & ~(row[pivot] - 1);
      if (v[pivot] & lead)
        for (std::size_t w = 0; w < words; ++w) v[w] ^= row[w];
    }
    return v;
  };

  for (std::size_t oi : order) {
    if (static_cast<int>(rings_.size()) >= target) break;
    std::vector<std::uint64_t> mask(words, 0);
    for (int bi : cand_bonds[oi])
      mask[static_cast<std::size_t>(bi) / 64] |= std::uint64_t{1} << (bi % 64);
    auto red = reduce(mask);
    bool zero = std::all_of(red.begin(), red.end(), [](std::uint64_t w) { return w == 0; });
    if (zero) continue;
    basis.push_back(red);
    rings_.push_back(candidates[oi]);
  }
}

void Molecule::derive_hydrogens(const std::vector<std::size_t>& atom_positions) {
  for (Atom& a : atoms_) {
    int sum2 = 0;
    int base = 0;  // aromatic bonds counted as 1
    for (int bi : adj_bonds_[static_cast<std::size_t>(a.index)]) {
      const Bond& bd = bonds_[static_cast<std::size_t>(bi)];
      sum2 += order_x2(bd.order);
      base += bd.order == BondOrder::Aromatic ? 1 : static_cast<int>(bd.order);
    }
    int used = (sum2 + 1) / 2;
    std::size_t pos = atom_positions[static_cast<std::size_t>(a.index)];

    if (a.bracket) {
      a.implicit_h = std::max(0, a.explicit_h);
      if (!a.aromatic) {
        auto allowed = allowed_valences(a.atomic_number, a.charge);
        if (!allowed.empty() &&
            used + a.implicit_h > *std::max_element(allowed.begin(), allowed.end()))
          fail_valence("atom exceeds allowed valence", pos);
      }
      continue;
    }
    if (a.aromatic) {
      if (base > 4) fail_valence("aromatic atom exceeds allowed valence", pos);
      a.implicit_h = aromatic_default_h(a.atomic_number, base, degree(a.index));
      continue;
    }
    auto allowed = allowed_valences(a.atomic_number, a.charge);
    if (allowed.empty()) {
      a.implicit_h = 0;
      continue;
    }
    int chosen = -1;
    for (int v : allowed) {
      if (v >= used) {
        chosen = v;
        break;
      }
    }
    if (chosen < 0) fail_valence("atom exceeds allowed valence", pos);
    a.implicit_h = chosen - used;
  }
}

void Molecule::perceive_aromaticity() {
  bool changed = true;
  std::vector<bool> done(rings_.size(), false);
  while (changed) {
    changed = false;
    for (std::size_t r = 0; r < rings_.size(); ++r) {
      if (done[r]) continue;
      const auto& ring = rings_[r];
      if (ring.size() < 5 || ring.size() > 6) continue;

      std::vector<int> ring_bonds;
      for (std::size_t i = 0; i < ring.size(); ++i) {
        int bi = bond_between(ring[i], ring[(i + 1) % ring.size()]);
        if (bi < 0) { ring_bonds.clear(); break; }
        ring_bonds.push_back(bi);
      }
      if (ring_bonds.size() != ring.size()) continue;

      bool already = std::all_of(ring_bonds.begin(), ring_bonds.end(), [&](int bi) {
        return bonds_[static_cast<std::size_t>(bi)].order == BondOrder::Aromatic;
      });
      if (already) {
        done[r] = true;
        continue;
      }

      int pi = 0;
      bool eligible = true;
      for (int ai : ring) {
        const Atom& a = atoms_[static_cast<std::size_t>(ai)];
        bool in_ring_pi = false, exo_pi = false;
        for (int bi : adj_bonds_[static_cast<std::size_t>(ai)]) {
          const Bond& bd = bonds_[static_cast<std::size_t>(bi)];
          if (bd.order != BondOrder::Double && bd.order != BondOrder::Aromatic) continue;
          if (std::find(ring_bonds.begin(), ring_bonds.end(), bi) != ring_bonds.end())
            in_ring_pi = true;
          else
            exo_pi = true;
        }
        if (in_ring_pi) {
          pi += 1;
        } else if (exo_pi) {
          // sp2 with its pi electrons elsewhere
        } else if (a.atomic_number == 7 || a.atomic_number == 15 || a.atomic_number == 8 ||
                   a.atomic_number == 16 || a.atomic_number == 34 || a.atomic_number == 52) {
          pi += 2;
        } else if (a.atomic_number == 6 && a.charge == -1) {
          pi += 2;
        } else {
          eligible = false;
          break;
        }
      }
      if (!eligible || pi % 4 != 2) continue;

      for (int bi : ring_bonds) bonds_[static_cast<std::size_t>(bi)].order = BondOrder::Aromatic;
      for (int ai : ring) atoms_[static_cast<std::size_t>(ai)].aromatic = true;
      done[r] = true;
      changed = true;
    }
  }
}

void Molecule::finalize(const std::vector<std::size_t>& atom_positions) {
  mark_ring_membership();

  // Implicit aromatic bonds outside rings (biphenyl-style links) demote to
  // single; declared aromatic atoms must sit in a ring.
  for (Bond& bd : bonds_) {
    if (bd.order == BondOrder::Aromatic && !bd.in_ring) bd.order = BondOrder::Single;
  }
  for (const Atom& a : atoms_) {
    if (a.aromatic && !a.in_ring)
      fail_valence("aromatic atom outside of a ring",
                   atom_positions[static_cast<std::size_t>(a.index)]);
  }

  derive_hydrogens(atom_positions);
  build_ring_basis();
  perceive_aromaticity();
}

Molecule parse_smiles(std::string_view text) {
  std::size_t bpos = text.find_first_not_of(" \t\r\n");
  std::size_t epos = text.find_last_not_of(" \t\r\n");
  if (bpos == std::string_view::npos) throw SmilesError("empty SMILES input", 1);
  std::string_view s = text.substr(bpos, epos - bpos + 1);

  Molecule m;
  std::vector<std::size_t> atom_pos;
  int prev = -1;
  PendingBond pending;
  std::vector<std::pair<int, std::size_t>> branch_stack;
  std::map<int, RingClosure> closures;

  auto attach = [&](Atom a, std::size_t pos) {
    int idx = m.add_atom(a);
    if (prev >= 0) {
      BondOrder order = pending.set ? pending.order : BondOrder::Single;
      if (!pending.explicit_symbol && m.atom(prev).aromatic && m.atom(idx).aromatic)
        order = BondOrder::Aromatic;
      m.add_bond(prev, idx, order, pending.stereo);
    }
    pending = PendingBond{};
    prev = idx;
    atom_pos.push_back(pos);
  };

  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '[') {
      std::size_t open = i;
      ++i;
      attach(parse_bracket_atom(s, i, open), open);
    } else if (c == 'C' && i + 1 < s.size() && s[i + 1] == 'l') {
      Atom a;
      a.atomic_number = 17;
      attach(a, i);
      i += 2;
    } else if (c == 'B' && i + 1 < s.size() && s[i + 1] == 'r') {
      Atom a;
      a.atomic_number = 35;
      attach(a, i);
      i += 2;
    } else if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'P' ||
               c == 'S' || c == 'F' || c == 'I') {
      Atom a;
      switch (c) {
        case 'B': a.atomic_number = 5; break;
        case 'C': a.atomic_number = 6; break;
        case 'N': a.atomic_number = 7; break;
        case 'O': a.atomic_number = 8; break;
        case 'P': a.atomic_number = 15; break;
        case 'S': a.atomic_number = 16; break;
        case 'F': a.atomic_number = 9; break;
        case 'I': a.atomic_number = 53; break;
      }
      attach(a, i);
      ++i;
    } else if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's') {
      Atom a;
      switch (c) {
        case 'b': a.atomic_number = 5; break;
        case 'c': a.atomic_number = 6; break;
        case 'n': a.atomic_number = 7; break;
        case 'o': a.atomic_number = 8; break;
        case 'p': a.atomic_number = 15; break;
        case 's': a.atomic_number = 16; break;
      }
      a.aromatic = true;
      attach(a, i);
      ++i;
    } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
      if (pending.set) fail("duplicate bond symbol", i);
      pending.set = true;
      pending.explicit_symbol = true;
      switch (c) {
        case '-': pending.order = BondOrder::Single; break;
        case '=': pending.order = BondOrder::Double; break;
        case '#': pending.order = BondOrder::Triple; break;
        case ':': pending.order = BondOrder::Aromatic; break;
        case '/': pending.order = BondOrder::Single; pending.stereo = 1; break;
        case '\\': pending.order = BondOrder::Single; pending.stereo = -1; break;
      }
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      if (prev < 0) fail("ring closure with no preceding atom", i);
      int num;
      std::size_t pos = i;
      if (c == '%') {
        if (i + 2 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1])) ||
            !std::isdigit(static_cast<unsigned char>(s[i + 2])))
          fail("malformed %nn ring closure", i);
        num = (s[i + 1] - '0') * 10 + (s[i + 2] - '0');
        i += 3;
      } else {
        num = c - '0';
        ++i;
      }
      auto it = closures.find(num);
      if (it == closures.end()) {
        closures.emplace(num, RingClosure{prev, pending, pos});
        pending = PendingBond{};
      } else {
        RingClosure rc = it->second;
        closures.erase(it);
        if (rc.atom == prev) fail("ring closure to the same atom", pos);
        if (m.bond_between(rc.atom, prev) >= 0) fail("duplicate ring-closure bond", pos);
        BondOrder order = BondOrder::Single;
        int stereo = 0;
        if (rc.bond.explicit_symbol && pending.explicit_symbol &&
            rc.bond.order != pending.order)
          fail("conflicting ring-closure bond symbols", pos);
        if (pending.explicit_symbol) {
          order = pending.order;
          stereo = pending.stereo;
        } else if (rc.bond.explicit_symbol) {
          order = rc.bond.order;
          stereo = rc.bond.stereo;
        } else if (m.atom(rc.atom).aromatic && m.atom(prev).aromatic) {
          order = BondOrder::Aromatic;
        }
        m.add_bond(rc.atom, prev, order, stereo);
        pending = PendingBond{};
      }
    } else if (c == '(') {
      if (prev < 0) fail("branch with no preceding atom", i);
      branch_stack.emplace_back(prev, i);
      ++i;
    } else if (c == ')') {
      if (branch_stack.empty()) fail("unopened branch", i);
      if (pending.set) fail("dangling bond before ')'", i);
      prev = branch_stack.back().first;
      branch_stack.pop_back();
      ++i;
    } else if (c == '.') {
      if (pending.set) fail("bond symbol before '.'", i);
      prev = -1;
      ++i;
    } else {
      fail("unknown atom symbol", i);
    }
  }

  if (!branch_stack.empty()) fail("unclosed branch", branch_stack.back().second);
  if (!closures.empty()) fail("unclosed ring closure", closures.begin()->second.position);
  if (pending.set) fail("dangling bond at end of input", s.size() - 1);
  if (m.atom_count() == 0) throw SmilesError("empty SMILES input", 1);

  // Fold neutral explicit [H] atoms into the heavy neighbor's H count.
  {
    std::vector<int> drop;
    for (const Atom& a : m.atoms())
      if (a.atomic_number == 1 && a.charge == 0 && a.isotope == 0 && m.degree(a.index) == 1 &&
          m.atom(m.neighbors(a.index)[0]).atomic_number != 1)
        drop.push_back(a.index);
    if (!drop.empty()) {
      std::vector<int> extra_h(static_cast<std::size_t>(m.atom_count()), 0);
      for (int h : drop) ++extra_h[static_cast<std::size_t>(m.neighbors(h)[0])];
      Molecule folded;
      std::vector<std::size_t> folded_pos;
      std::vector<int> remap(static_cast<std::size_t>(m.atom_count()), -1);
      for (const Atom& a : m.atoms()) {
        if (std::binary_search(drop.begin(), drop.end(), a.index)) continue;
        Atom copy = a;
        if (extra_h[static_cast<std::size_t>(a.index)] > 0) {
          copy.explicit_h = std::max(0, copy.explicit_h) + extra_h[static_cast<std::size_t>(a.index)];
          copy.bracket = true;
        }
        remap[static_cast<std::size_t>(a.index)] = folded.add_atom(copy);
        folded_pos.push_back(atom_pos[static_cast<std::size_t>(a.index)]);
      }
      for (const Bond& bd : m.bonds()) {
        int na = remap[static_cast<std::size_t>(bd.a)], nb = remap[static_cast<std::size_t>(bd.b)];
        if (na < 0 || nb < 0) continue;
        folded.add_bond(na, nb, bd.order, bd.stereo);
      }
      m = std::move(folded);
      atom_pos = std::move(folded_pos);
    }
  }

  m.source_ = std::string(text);
  m.finalize(atom_pos);
  return m;
}

std::map<std::string, int> molecular_formula(const Molecule& m) {
  std::map<std::string, int> counts;
  int hydrogens = 0;
  for (const Atom& a : m.atoms()) {
    if (a.atomic_number == 1)
      ++hydrogens;
    else
      ++counts[element_symbol(a.atomic_number)];
    hydrogens += a.implicit_h;
  }
  if (hydrogens > 0) counts["H"] = hydrogens;
  return counts;
}

std::map<std::string, int> parse_formula(std::string_view text) {
  std::map<std::string, int> counts;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isupper(static_cast<unsigned char>(text[i])))
      throw std::runtime_error("malformed formula: " + std::string(text));
    std::size_t start = i++;
    while (i < text.size() && std::islower(static_cast<unsigned char>(text[i]))) ++i;
    std::string sym(text.substr(start, i - start));
    int n = 0;
    std::size_t dstart = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    n = (i > dstart) ? std::stoi(std::string(text.substr(dstart, i - dstart))) : 1;
    counts[sym] += n;
  }
  return counts;
}

std::string write_smiles(const Molecule& m) {
  int n = m.atom_count();
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  std::vector<bool> closure_bond(static_cast<std::size_t>(m.bond_count()), false);
  std::vector<std::vector<std::pair<int, int>>> closures(static_cast<std::size_t>(n));
  int next_digit = 1;

  auto bond_symbol = [&](const Bond& bd) -> std::string {
    switch (bd.order) {
      case BondOrder::Single:
        return (m.atom(bd.a).aromatic && m.atom(bd.b).aromatic) ? "-" : "";
      case BondOrder::Double: return "=";
      case BondOrder::Triple: return "#";
      case BondOrder::Aromatic:
        return (m.atom(bd.a).aromatic && m.atom(bd.b).aromatic) ? "" : ":";
    }
    return "";
  };

  auto atom_text = [&](const Atom& a) -> std::string {
    bool organic = false;
    switch (a.atomic_number) {
      case 5: case 6: case 7: case 8: case 9: case 15: case 16: case 17:
      case 35: case 53:
        organic = true;
        break;
      default:
        break;
    }
    bool need_bracket =
        !organic || a.charge != 0 || a.isotope != 0 || a.bracket || a.atomic_number == 0;
    std::string sym = a.atomic_number == 0 ? "*" : element_symbol(a.atomic_number);
    if (a.aromatic)
      for (char& ch : sym) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (!need_bracket) return sym;
    std::ostringstream os;
    os << '[';
    if (a.isotope) os << a.isotope;
    os << sym;
    if (a.implicit_h == 1)
      os << 'H';
    else if (a.implicit_h > 1)
      os << 'H' << a.implicit_h;
    if (a.charge > 0) os << '+' << (a.charge > 1 ? std::to_string(a.charge) : "");
    if (a.charge < 0) os << '-' << (a.charge < -1 ? std::to_string(-a.charge) : "");
    os << ']';
    return os.str();
  };

  std::ostringstream out;
  std::function<void(int, int)> emit = [&](int u, int parent_bond) {
    visited[static_cast<std::size_t>(u)] = true;
    if (parent_bond >= 0) out << bond_symbol(m.bond(parent_bond));
    out << atom_text(m.atom(u));
    for (auto [digit, bi] : closures[static_cast<std::size_t>(u)]) {
      const Bond& bd = m.bond(bi);
      int other = bd.a == u ? bd.b : bd.a;
      if (!visited[static_cast<std::size_t>(other)]) out << bond_symbol(bd);
      if (digit >= 10)
        out << '%' << digit;
      else
        out << digit;
    }
    std::vector<std::pair<int, int>> kids;  // bond, atom
    const auto& nb = m.neighbors(u);
    const auto& nbb = m.neighbor_bonds(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nbb[k] == parent_bond || closure_bond[static_cast<std::size_t>(nbb[k])]) continue;
      kids.emplace_back(nbb[k], nb[k]);
    }
    for (std::size_t k = 0; k < kids.size(); ++k) {
      bool last = true;
      for (std::size_t j = k + 1; j < kids.size(); ++j) last = false;
      if (!last) out << '(';
      emit(kids[k].second, kids[k].first);
      if (!last) out << ')';
    }
  };

  bool first_component = true;
  for (int root = 0; root < n; ++root) {
    if (visited[static_cast<std::size_t>(root)]) continue;
    if (!first_component) out << '.';
    first_component = false;

    // Pre-pass: spanning-tree DFS marks back edges as ring closures.
    {
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      std::function<void(int, int)> dfs = [&](int u, int pb) {
        seen[static_cast<std::size_t>(u)] = true;
        const auto& nb = m.neighbors(u);
        const auto& nbb = m.neighbor_bonds(u);
        for (std::size_t k = 0; k < nb.size(); ++k) {
          int v = nb[k], bi = nbb[k];
          if (bi == pb || closure_bond[static_cast<std::size_t>(bi)]) continue;
          if (seen[static_cast<std::size_t>(v)]) {
            closure_bond[static_cast<std::size_t>(bi)] = true;
            int digit = next_digit++;
            closures[static_cast<std::size_t>(u)].emplace_back(digit, bi);
            closures[static_cast<std::size_t>(v)].emplace_back(digit, bi);
          } else {
            dfs(v, bi);
          }
        }
      };
      dfs(root, -1);
    }
    emit(root, -1);
  }
  return out.str();
}

}  // namespace molopt
