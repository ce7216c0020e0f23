#ifndef MOLOPT_SUBSTRUCTURE_HPP
#define MOLOPT_SUBSTRUCTURE_HPP

#include <bitset>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molopt/molgraph.hpp"

namespace molopt {

// Raised at compile time for SMARTS outside the supported subset; carries the
// offending token so key tables can mark entries unimplemented.
class PatternError : public std::runtime_error {
 public:
  PatternError(std::string msg, std::string token)
      : std::runtime_error(std::move(msg)), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// Raised when the backtracking search exceeds its step budget.
class MatchBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AtomPrimitive {
  enum class Kind {
    Any,           // *
    Aliphatic,     // A
    AromaticAny,   // a
    Element,       // symbol, case decides aromaticity (value2: 0 aliph, 1 arom)
    AtomicNumber,  // #n, either aromaticity
    TotalH,        // Hn
    Charge,        // exact charge
    AnyPositive,   // +*
    AnyNegative,   // -*
    RingMembership,   // R (value = -1: any ring; else exact SSSR ring count)
    RingSize,      // rn: member of an SSSR ring of size n (r bare: any ring)
    Connectivity,  // Xn (heavy degree + H)
    Degree,        // Dn (heavy degree)
    Valence,       // vn (bond order sum + H)
  };
  Kind kind = Kind::Any;
  int value = 0;
  int value2 = 0;
  bool negated = false;
};

// SMARTS atom expression: AND(';') of OR(',') of AND('&'/adjacency) terms.
struct AtomExpr {
  std::vector<std::vector<std::vector<AtomPrimitive>>> parts;
};

struct BondPrimitive {
  enum class Kind { Any, Single, Double, Triple, Aromatic, Ring, Default };
  Kind kind = Kind::Default;
  bool negated = false;
};

struct BondExpr {
  std::vector<std::vector<std::vector<BondPrimitive>>> parts;
};

struct Pattern {
  struct PatternBond {
    int a = 0;
    int b = 0;
    BondExpr expr;
  };
  std::vector<AtomExpr> atoms;
  std::vector<PatternBond> bonds;
  std::vector<std::vector<int>> adjacency;       // pattern atom -> neighbor atoms
  std::vector<std::vector<int>> adjacency_bond;  // parallel pattern bond index
  std::vector<int> search_order;                 // most-constrained-first placement
  int min_count = 1;
  std::string source;
};

// Compile a SMARTS-subset pattern. min_count is the occurrence threshold the
// pattern must reach before a key counts as present (default 1).
Pattern compile_pattern(std::string_view smarts, int min_count = 1);

struct MatchOptions {
  long budget = 1'000'000;   // backtracking step limit
  int anchor_atom = -1;      // pin pattern atom 0 to this molecule atom
};

// Number of distinct matched atom sets (order-insensitive).
int count_matches(const Pattern& p, const Molecule& m, const MatchOptions& opts = {});
// Early-exit variant: true once `threshold` distinct atom sets are found.
bool has_count_at_least(const Pattern& p, const Molecule& m, int threshold,
                        const MatchOptions& opts = {});
// True if the pattern matches with pattern atom 0 mapped to molecule atom.
bool matches_at(const Pattern& p, const Molecule& m, int atom);

bool atom_matches(const AtomExpr& e, const Molecule& m, int atom);
bool bond_expr_matches(const BondExpr& e, const Molecule& m, int bond);

// 167-position structural-key bitset; position 0 is unused.
struct Fingerprint {
  std::bitset<167> bits;
  std::string key_table_version;

  int popcount() const { return static_cast<int>(bits.count()); }
  bool operator==(const Fingerprint& o) const = default;
};

double tanimoto(const Fingerprint& a, const Fingerprint& b);

struct MaccsKey {
  enum class Kind { Smarts, AromaticRings, Fragments, LargeRing, Unimplemented };
  int index = 0;
  Kind kind = Kind::Smarts;
  int min_count = 1;
  std::string smarts;
  Pattern pattern;  // compiled when kind == Smarts

  // Display text in explanation tables: SMARTS plus "(count > n)" annotation.
  std::string display() const;
};

class MaccsTable {
 public:
  static const MaccsTable& instance();
  explicit MaccsTable(const std::string& path);

  const std::string& version() const { return version_; }
  const std::vector<MaccsKey>& keys() const { return keys_; }
  const MaccsKey* find(int index) const;
  std::vector<int> unimplemented() const;

 private:
  std::string version_;
  std::vector<MaccsKey> keys_;
};

// Serial per-molecule fingerprint (the reference path).
Fingerprint maccs_fingerprint(const Molecule& m);
// Batch kernel, OpenMP-parallel over molecules; bit-identical to the serial path.
std::vector<Fingerprint> maccs_fingerprints(std::span<const Molecule> mols);

}  // namespace molopt

#endif
