#include <algorithm>
#include <cctype>
#include <set>

#include "molopt/substructure.hpp"

namespace molopt {

namespace {

[[noreturn]] void unsupported(const std::string& token) {
  throw PatternError("unsupported SMARTS primitive: " + token, token);
}

[[noreturn]] void malformed(const std::string& what, const std::string& token) {
  throw PatternError("malformed SMARTS (" + what + "): " + token, token);
}

struct AtomToken {
  AtomExpr expr;
};

int read_int(std::string_view s, std::size_t& i, int fallback) {
  std::size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == start) return fallback;
  return std::stoi(std::string(s.substr(start, i - start)));
}

// One primitive inside a bracket expression, without leading '!'.
AtomPrimitive parse_bracket_primitive(std::string_view s, std::size_t& i) {
  AtomPrimitive p;
  char c = s[i];
  // Two-letter element symbols (Am, Hf, Re, Dy, ...) take precedence over the
  // one-letter primitives A/H/R/D/X they would otherwise split into.
  if (std::isupper(static_cast<unsigned char>(c)) && i + 1 < s.size() &&
      std::islower(static_cast<unsigned char>(s[i + 1]))) {
    int z = element_number(s.substr(i, 2));
    if (z > 0) {
      i += 2;
      p.kind = AtomPrimitive::Kind::Element;
      p.value = z;
      p.value2 = 0;
      return p;
    }
  }
  if (c == '*') {
    ++i;
    p.kind = AtomPrimitive::Kind::Any;
  } else if (c == 'a') {
    ++i;
    p.kind = AtomPrimitive::Kind::AromaticAny;
  } else if (c == 'A') {
    ++i;
    p.kind = AtomPrimitive::Kind::Aliphatic;
  } else if (c == '#') {
    ++i;
    int z = read_int(s, i, -1);
    if (z < 0) malformed("missing atomic number", "#");
    p.kind = AtomPrimitive::Kind::AtomicNumber;
    p.value = z;
  } else if (c == 'H') {
    ++i;
    p.kind = AtomPrimitive::Kind::TotalH;
    p.value = read_int(s, i, 1);
  } else if (c == 'R') {
    ++i;
    p.kind = AtomPrimitive::Kind::RingMembership;
    p.value = read_int(s, i, -1);
  } else if (c == 'r') {
    ++i;
    p.kind = AtomPrimitive::Kind::RingSize;
    p.value = read_int(s, i, -1);
  } else if (c == 'X') {
    ++i;
    p.kind = AtomPrimitive::Kind::Connectivity;
    p.value = read_int(s, i, 1);
  } else if (c == 'D') {
    ++i;
    p.kind = AtomPrimitive::Kind::Degree;
    p.value = read_int(s, i, 1);
  } else if (c == 'v') {
    ++i;
    p.kind = AtomPrimitive::Kind::Valence;
    p.value = read_int(s, i, 1);
  } else if (c == '+' || c == '-') {
    ++i;
    if (i < s.size() && s[i] == '*') {
      ++i;
      p.kind = c == '+' ? AtomPrimitive::Kind::AnyPositive : AtomPrimitive::Kind::AnyNegative;
    } else if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      p.kind = AtomPrimitive::Kind::Charge;
      p.value = read_int(s, i, 0) * (c == '+' ? 1 : -1);
    } else {
      int mag = 1;
      while (i < s.size() && s[i] == c) {
        ++mag;
        ++i;
      }
      p.kind = AtomPrimitive::Kind::Charge;
      p.value = c == '+' ? mag : -mag;
    }
  } else if (c == '$') {
    unsupported("$(...)");
  } else if (c == '@') {
    unsupported("@");
  } else if (std::isupper(static_cast<unsigned char>(c))) {
    int z = -1;
    std::size_t consumed = 1;
    if (i + 1 < s.size() && std::islower(static_cast<unsigned char>(s[i + 1]))) {
      z = element_number(s.substr(i, 2));
      if (z > 0) consumed = 2;
    }
    if (z <= 0) {
      z = element_number(s.substr(i, 1));
      if (z <= 0) unsupported(std::string(1, c));
    }
    i += consumed;
    p.kind = AtomPrimitive::Kind::Element;
    p.value = z;
    p.value2 = 0;  // aliphatic
  } else if (std::islower(static_cast<unsigned char>(c))) {
    int z = -1;
    if (s.substr(i, 2) == "se") { z = 34; i += 2; }
    else if (s.substr(i, 2) == "as") { z = 33; i += 2; }
    else if (s.substr(i, 2) == "te") { z = 52; i += 2; }
    else {
      switch (c) {
        case 'b': z = 5; break;
        case 'c': z = 6; break;
        case 'n': z = 7; break;
        case 'o': z = 8; break;
        case 'p': z = 15; break;
        case 's': z = 16; break;
        default: unsupported(std::string(1, c));
      }
      ++i;
    }
    p.kind = AtomPrimitive::Kind::Element;
    p.value = z;
    p.value2 = 1;  // aromatic
  } else {
    unsupported(std::string(1, c));
  }
  return p;
}

AtomExpr parse_bracket_expr(std::string_view s, std::size_t& i) {
  // inside '[' ... ']': AND(';') of OR(',') of AND('&'/adjacency)
  AtomExpr expr;
  std::vector<std::vector<AtomPrimitive>> or_terms;
  std::vector<AtomPrimitive> and_term;

  if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
    unsupported("isotope specification");

  while (i < s.size() && s[i] != ']') {
    char c = s[i];
    if (c == ';') {
      if (and_term.empty()) malformed("empty term before ';'", std::string(s));
      or_terms.push_back(and_term);
      and_term.clear();
      expr.parts.push_back(or_terms);
      or_terms.clear();
      ++i;
    } else if (c == ',') {
      if (and_term.empty()) malformed("empty term before ','", std::string(s));
      or_terms.push_back(and_term);
      and_term.clear();
      ++i;
    } else if (c == '&') {
      ++i;
    } else {
      bool neg = false;
      while (i < s.size() && s[i] == '!') {
        neg = !neg;
        ++i;
      }
      if (i >= s.size() || s[i] == ']') malformed("dangling '!'", std::string(s));
      AtomPrimitive p = parse_bracket_primitive(s, i);
      p.negated = neg;
      and_term.push_back(p);
    }
  }
  if (i >= s.size()) malformed("unclosed bracket", std::string(s));
  ++i;  // consume ']'
  if (!and_term.empty()) or_terms.push_back(and_term);
  if (!or_terms.empty()) expr.parts.push_back(or_terms);
  if (expr.parts.empty()) malformed("empty bracket expression", std::string(s));
  return expr;
}

AtomExpr single_primitive_expr(AtomPrimitive p) {
  AtomExpr e;
  e.parts = {{{p}}};
  return e;
}

BondPrimitive bond_primitive(char c) {
  BondPrimitive p;
  switch (c) {
    case '~': p.kind = BondPrimitive::Kind::Any; break;
    case '-': p.kind = BondPrimitive::Kind::Single; break;
    case '=': p.kind = BondPrimitive::Kind::Double; break;
    case '#': p.kind = BondPrimitive::Kind::Triple; break;
    case ':': p.kind = BondPrimitive::Kind::Aromatic; break;
    case '@': p.kind = BondPrimitive::Kind::Ring; break;
    case '/':
    case '\\': p.kind = BondPrimitive::Kind::Single; break;  // stereo ignored
    default: unsupported(std::string(1, c));
  }
  return p;
}

bool is_bond_char(char c) {
  return c == '~' || c == '-' || c == '=' || c == '#' || c == ':' || c == '@' ||
         c == '/' || c == '\\' || c == '!';
}

// Bond expression: sequence of primitives with '!', '&', ',', ';' logic.
BondExpr parse_bond_expr(std::string_view s, std::size_t& i) {
  BondExpr expr;
  std::vector<std::vector<BondPrimitive>> or_terms;
  std::vector<BondPrimitive> and_term;
  while (i < s.size()) {
    char c = s[i];
    if (c == ';') {
      if (and_term.empty()) malformed("empty bond term before ';'", std::string(s));
      or_terms.push_back(and_term);
      and_term.clear();
      expr.parts.push_back(or_terms);
      or_terms.clear();
      ++i;
    } else if (c == ',') {
      if (and_term.empty()) malformed("empty bond term before ','", std::string(s));
      or_terms.push_back(and_term);
      and_term.clear();
      ++i;
    } else if (c == '&') {
      ++i;
    } else if (c == '!') {
      bool neg = false;
      while (i < s.size() && s[i] == '!') {
        neg = !neg;
        ++i;
      }
      if (i >= s.size() || !is_bond_char(s[i]) || s[i] == '!')
        malformed("dangling bond '!'", std::string(s));
      BondPrimitive p = bond_primitive(s[i]);
      ++i;
      p.negated = neg;
      and_term.push_back(p);
    } else if (is_bond_char(c)) {
      and_term.push_back(bond_primitive(c));
      ++i;
    } else {
      break;
    }
  }
  if (!and_term.empty()) or_terms.push_back(and_term);
  if (!or_terms.empty()) expr.parts.push_back(or_terms);
  return expr;  // empty parts = default bond
}

}  // namespace

Pattern compile_pattern(std::string_view smarts, int min_count) {
  if (min_count < 1) throw PatternError("min_count must be positive", "");
  Pattern pat;
  pat.min_count = min_count;
  pat.source = std::string(smarts);

  int prev = -1;
  BondExpr pending;
  bool pending_set = false;
  std::vector<int> branch_stack;
  std::map<int, std::pair<int, BondExpr>> closures;

  auto add_atom = [&](AtomExpr e) {
    pat.atoms.push_back(std::move(e));
    return static_cast<int>(pat.atoms.size()) - 1;
  };
  auto add_bond = [&](int a, int b, BondExpr e) {
    pat.bonds.push_back({a, b, std::move(e)});
  };
  auto attach = [&](AtomExpr e) {
    int idx = add_atom(std::move(e));
    if (prev >= 0) add_bond(prev, idx, pending_set ? pending : BondExpr{});
    pending = BondExpr{};
    pending_set = false;
    prev = idx;
  };

  std::size_t i = 0;
  while (i < smarts.size()) {
    char c = smarts[i];
    if (c == '[') {
      ++i;
      attach(parse_bracket_expr(smarts, i));
    } else if (c == '(') {
      if (prev < 0) malformed("branch with no preceding atom", pat.source);
      branch_stack.push_back(prev);
      ++i;
    } else if (c == ')') {
      if (branch_stack.empty()) malformed("unopened branch", pat.source);
      prev = branch_stack.back();
      branch_stack.pop_back();
      ++i;
    } else if (is_bond_char(c)) {
      BondExpr e = parse_bond_expr(smarts, i);
      pending = std::move(e);
      pending_set = true;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      if (prev < 0) malformed("ring closure with no preceding atom", pat.source);
      int num;
      if (c == '%') {
        if (i + 2 >= smarts.size() || !std::isdigit(static_cast<unsigned char>(smarts[i + 1])) ||
            !std::isdigit(static_cast<unsigned char>(smarts[i + 2])))
          malformed("malformed %nn ring closure", pat.source);
        num = (smarts[i + 1] - '0') * 10 + (smarts[i + 2] - '0');
        i += 3;
      } else {
        num = c - '0';
        ++i;
      }
      auto it = closures.find(num);
      if (it == closures.end()) {
        closures.emplace(num, std::make_pair(prev, pending_set ? pending : BondExpr{}));
        pending = BondExpr{};
        pending_set = false;
      } else {
        auto [other, bexpr] = it->second;
        closures.erase(it);
        BondExpr use = pending_set ? pending : bexpr;
        add_bond(other, prev, std::move(use));
        pending = BondExpr{};
        pending_set = false;
      }
    } else if (c == '*') {
      attach(single_primitive_expr({AtomPrimitive::Kind::Any, 0, 0, false}));
      ++i;
    } else if (c == 'a') {
      attach(single_primitive_expr({AtomPrimitive::Kind::AromaticAny, 0, 0, false}));
      ++i;
    } else if (c == 'A') {
      attach(single_primitive_expr({AtomPrimitive::Kind::Aliphatic, 0, 0, false}));
      ++i;
    } else if (c == 'C' && i + 1 < smarts.size() && smarts[i + 1] == 'l') {
      attach(single_primitive_expr({AtomPrimitive::Kind::Element, 17, 0, false}));
      i += 2;
    } else if (c == 'B' && i + 1 < smarts.size() && smarts[i + 1] == 'r') {
      attach(single_primitive_expr({AtomPrimitive::Kind::Element, 35, 0, false}));
      i += 2;
    } else if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'P' ||
               c == 'S' || c == 'F' || c == 'I') {
      int z = 0;
      switch (c) {
        case 'B': z = 5; break;
        case 'C': z = 6; break;
        case 'N': z = 7; break;
        case 'O': z = 8; break;
        case 'P': z = 15; break;
        case 'S': z = 16; break;
        case 'F': z = 9; break;
        case 'I': z = 53; break;
      }
      attach(single_primitive_expr({AtomPrimitive::Kind::Element, z, 0, false}));
      ++i;
    } else if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's') {
      int z = 0;
      switch (c) {
        case 'b': z = 5; break;
        case 'c': z = 6; break;
        case 'n': z = 7; break;
        case 'o': z = 8; break;
        case 'p': z = 15; break;
        case 's': z = 16; break;
      }
      attach(single_primitive_expr({AtomPrimitive::Kind::Element, z, 1, false}));
      ++i;
    } else if (c == '$') {
      unsupported("$(...)");
    } else {
      unsupported(std::string(1, c));
    }
  }
  if (!branch_stack.empty()) malformed("unclosed branch", pat.source);
  if (!closures.empty()) malformed("unclosed ring closure", pat.source);
  if (pending_set) malformed("dangling bond", pat.source);
  if (pat.atoms.empty()) malformed("empty pattern", pat.source);

  // adjacency
  pat.adjacency.assign(pat.atoms.size(), {});
  pat.adjacency_bond.assign(pat.atoms.size(), {});
  for (std::size_t bi = 0; bi < pat.bonds.size(); ++bi) {
    const auto& b = pat.bonds[bi];
    pat.adjacency[static_cast<std::size_t>(b.a)].push_back(b.b);
    pat.adjacency[static_cast<std::size_t>(b.b)].push_back(b.a);
    pat.adjacency_bond[static_cast<std::size_t>(b.a)].push_back(static_cast<int>(bi));
    pat.adjacency_bond[static_cast<std::size_t>(b.b)].push_back(static_cast<int>(bi));
  }

  // connectivity check
  {
    std::vector<bool> seen(pat.atoms.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : pat.adjacency[static_cast<std::size_t>(u)])
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          stack.push_back(v);
        }
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
      malformed("pattern graph is not connected", pat.source);
  }

  // Placement order: most-connected start, then neighbors-first expansion
  // preferring nodes with many already-placed neighbors (degree heuristic).
  {
    std::size_t n = pat.atoms.size();
    std::vector<bool> placed(n, false);
    int start = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (pat.adjacency[k].size() > pat.adjacency[static_cast<std::size_t>(start)].size())
        start = static_cast<int>(k);
    pat.search_order.push_back(start);
    placed[static_cast<std::size_t>(start)] = true;
    while (pat.search_order.size() < n) {
      int best = -1;
      int best_placed_nb = -1, best_degree = -1;
      for (std::size_t k = 0; k < n; ++k) {
        if (placed[k]) continue;
        int pn = 0;
        for (int v : pat.adjacency[k])
          if (placed[static_cast<std::size_t>(v)]) ++pn;
        if (pn == 0) continue;  // stays connected
        int deg = static_cast<int>(pat.adjacency[k].size());
        if (pn > best_placed_nb || (pn == best_placed_nb && deg > best_degree)) {
          best = static_cast<int>(k);
          best_placed_nb = pn;
          best_degree = deg;
        }
      }
      pat.search_order.push_back(best);
      placed[static_cast<std::size_t>(best)] = true;
    }
  }
  return pat;
}

namespace {

bool primitive_matches(const AtomPrimitive& p, const Molecule& m, int ai) {
  const Atom& a = m.atom(ai);
  bool r = false;
  switch (p.kind) {
    case AtomPrimitive::Kind::Any: r = true; break;
    case AtomPrimitive::Kind::Aliphatic: r = !a.aromatic; break;
    case AtomPrimitive::Kind::AromaticAny: r = a.aromatic; break;
    case AtomPrimitive::Kind::Element:
      r = a.atomic_number == p.value && a.aromatic == (p.value2 == 1);
      break;
    case AtomPrimitive::Kind::AtomicNumber: r = a.atomic_number == p.value; break;
    case AtomPrimitive::Kind::TotalH: r = m.hydrogen_count(ai) == p.value; break;
    case AtomPrimitive::Kind::Charge: r = a.charge == p.value; break;
    case AtomPrimitive::Kind::AnyPositive: r = a.charge > 0; break;
    case AtomPrimitive::Kind::AnyNegative: r = a.charge < 0; break;
    case AtomPrimitive::Kind::RingMembership: {
      if (p.value < 0) {
        r = a.in_ring;
      } else if (p.value == 0) {
        r = !a.in_ring;
      } else {
        int count = 0;
        for (const auto& ring : m.rings())
          if (std::find(ring.begin(), ring.end(), ai) != ring.end()) ++count;
        r = count == p.value;
      }
      break;
    }
    case AtomPrimitive::Kind::RingSize: {
      if (p.value < 0) {
        r = a.in_ring;
      } else {
        for (const auto& ring : m.rings())
          if (static_cast<int>(ring.size()) == p.value &&
              std::find(ring.begin(), ring.end(), ai) != ring.end()) {
            r = true;
            break;
          }
      }
      break;
    }
    case AtomPrimitive::Kind::Connectivity: r = m.connectivity(ai) == p.value; break;
    case AtomPrimitive::Kind::Degree: r = m.degree(ai) == p.value; break;
    case AtomPrimitive::Kind::Valence: {
      int sum2 = 0;
      for (int bi : m.neighbor_bonds(ai)) {
        switch (m.bond(bi).order) {
          case BondOrder::Single: sum2 += 2; break;
          case BondOrder::Double: sum2 += 4; break;
          case BondOrder::Triple: sum2 += 6; break;
          case BondOrder::Aromatic: sum2 += 3; break;
        }
      }
      r = (sum2 + 1) / 2 + m.hydrogen_count(ai) == p.value;
      break;
    }
  }
  return p.negated ? !r : r;
}

bool bond_primitive_matches(const BondPrimitive& p, const Molecule& m, int bi) {
  const Bond& b = m.bond(bi);
  bool r = false;
  switch (p.kind) {
    case BondPrimitive::Kind::Any: r = true; break;
    case BondPrimitive::Kind::Single: r = b.order == BondOrder::Single; break;
    case BondPrimitive::Kind::Double: r = b.order == BondOrder::Double; break;
    case BondPrimitive::Kind::Triple: r = b.order == BondOrder::Triple; break;
    case BondPrimitive::Kind::Aromatic: r = b.order == BondOrder::Aromatic; break;
    case BondPrimitive::Kind::Ring: r = b.in_ring; break;
    case BondPrimitive::Kind::Default:
      r = b.order == BondOrder::Single || b.order == BondOrder::Aromatic;
      break;
  }
  return p.negated ? !r : r;
}

}  // namespace

bool bond_expr_matches(const BondExpr& e, const Molecule& m, int bi) {
  if (e.parts.empty()) {
    const Bond& b = m.bond(bi);
    return b.order == BondOrder::Single || b.order == BondOrder::Aromatic;
  }
  for (const auto& or_terms : e.parts) {
    bool any = false;
    for (const auto& and_term : or_terms) {
      bool all = true;
      for (const auto& p : and_term)
        if (!bond_primitive_matches(p, m, bi)) {
          all = false;
          break;
        }
      if (all) {
        any = true;
        break;
      }
    }
    if (!any) return false;
  }
  return true;
}

namespace {

struct SearchState {
  const Pattern& p;
  const Molecule& m;
  long budget;
  long steps = 0;
  bool anchored = false;
  std::vector<int> assign{};   // pattern atom -> molecule atom
  std::vector<bool> used{};    // molecule atom used
  std::set<std::vector<int>> found{};
  int stop_at = -1;  // stop when found.size() reaches this (-1 = exhaustive)

  bool place(std::size_t depth) {
    if (++steps > budget)
      throw MatchBudgetError("substructure search exceeded step budget on pattern: " +
                             p.source);
    if (depth == p.search_order.size()) {
      std::vector<int> atoms(assign.begin(), assign.end());
      std::sort(atoms.begin(), atoms.end());
      found.insert(std::move(atoms));
      return stop_at > 0 && static_cast<int>(found.size()) >= stop_at;
    }
    int pa = p.search_order[depth];
    // candidates: neighbors of an already-placed pattern neighbor
    int placed_nb = -1, via_bond = -1;
    for (std::size_t k = 0; k < p.adjacency[static_cast<std::size_t>(pa)].size(); ++k) {
      int nb = p.adjacency[static_cast<std::size_t>(pa)][k];
      if (assign[static_cast<std::size_t>(nb)] >= 0) {
        placed_nb = nb;
        via_bond = p.adjacency_bond[static_cast<std::size_t>(pa)][k];
        break;
      }
    }
    auto try_candidate = [&](int ma) -> bool {
      if (used[static_cast<std::size_t>(ma)]) return false;
      if (!atom_matches(p.atoms[static_cast<std::size_t>(pa)], m, ma)) return false;
      // all pattern bonds to placed atoms must exist and match
      for (std::size_t k = 0; k < p.adjacency[static_cast<std::size_t>(pa)].size(); ++k) {
        int nb = p.adjacency[static_cast<std::size_t>(pa)][k];
        int mapped = assign[static_cast<std::size_t>(nb)];
        if (mapped < 0) continue;
        int mb = m.bond_between(ma, mapped);
        if (mb < 0) return false;
        int pb = p.adjacency_bond[static_cast<std::size_t>(pa)][k];
        if (!bond_expr_matches(p.bonds[static_cast<std::size_t>(pb)].expr, m, mb)) return false;
      }
      assign[static_cast<std::size_t>(pa)] = ma;
      used[static_cast<std::size_t>(ma)] = true;
      bool stop = place(depth + 1);
      used[static_cast<std::size_t>(ma)] = false;
      assign[static_cast<std::size_t>(pa)] = -1;
      return stop;
    };

    if (placed_nb < 0) {
      (void)via_bond;
      if (anchored && depth == 0) return false;  // anchor handled by caller
      for (int ma = 0; ma < m.atom_count(); ++ma)
        if (try_candidate(ma)) return true;
    } else {
      int base = assign[static_cast<std::size_t>(placed_nb)];
      for (int ma : m.neighbors(base))
        if (try_candidate(ma)) return true;
    }
    return false;
  }
};

int run_search(const Pattern& p, const Molecule& m, const MatchOptions& opts, int stop_at) {
  if (m.atom_count() == 0) return 0;
  SearchState st{p, m, opts.budget};
  st.assign.assign(p.atoms.size(), -1);
  st.used.assign(static_cast<std::size_t>(m.atom_count()), false);
  st.stop_at = stop_at;

  if (opts.anchor_atom >= 0) {
    // pin pattern atom 0; search order must start there
    if (p.search_order.empty() || p.search_order[0] != 0) {
      Pattern reordered = p;
      std::vector<bool> placed(p.atoms.size(), false);
      reordered.search_order.clear();
      reordered.search_order.push_back(0);
      placed[0] = true;
      while (reordered.search_order.size() < p.atoms.size()) {
        for (std::size_t k = 0; k < p.atoms.size(); ++k) {
          if (placed[k]) continue;
          bool adj = false;
          for (int v : p.adjacency[k])
            if (placed[static_cast<std::size_t>(v)]) adj = true;
          if (adj) {
            reordered.search_order.push_back(static_cast<int>(k));
            placed[k] = true;
            break;
          }
        }
      }
      return run_search(reordered, m, MatchOptions{opts.budget, opts.anchor_atom}, stop_at);
    }
    int ma = opts.anchor_atom;
    if (!atom_matches(p.atoms[0], m, ma)) return 0;
    st.assign[0] = ma;
    st.used[static_cast<std::size_t>(ma)] = true;
    st.anchored = true;
    st.place(1);
    return static_cast<int>(st.found.size());
  }

  st.place(0);
  return static_cast<int>(st.found.size());
}

}  // namespace

bool atom_matches(const AtomExpr& e, const Molecule& m, int atom) {
  for (const auto& or_terms : e.parts) {
    bool any = false;
    for (const auto& and_term : or_terms) {
      bool all = true;
      for (const auto& p : and_term)
        if (!primitive_matches(p, m, atom)) {
          all = false;
          break;
        }
      if (all) {
        any = true;
        break;
      }
    }
    if (!any) return false;
  }
  return true;
}

int count_matches(const Pattern& p, const Molecule& m, const MatchOptions& opts) {
  return run_search(p, m, opts, -1);
}

bool has_count_at_least(const Pattern& p, const Molecule& m, int threshold,
                        const MatchOptions& opts) {
  if (threshold <= 0) return true;
  return run_search(p, m, opts, threshold) >= threshold;
}

bool matches_at(const Pattern& p, const Molecule& m, int atom) {
  MatchOptions opts;
  opts.anchor_atom = atom;
  return run_search(p, m, opts, 1) >= 1;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.key_table_version != b.key_table_version)
    throw std::runtime_error("fingerprint key-table version mismatch: " +
                             a.key_table_version + " vs " + b.key_table_version);
  auto inter = (a.bits & b.bits).count();
  auto uni = (a.bits | b.bits).count();
  if (uni == 0) return 1.0;  // identical emptiness
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace molopt
