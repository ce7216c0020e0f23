#ifndef MOLOPT_MOLGRAPH_HPP
#define MOLOPT_MOLGRAPH_HPP

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace molopt {

// Error raised by parse_smiles. Messages are stable strings: they are fed
// verbatim back to the LLM as corrective feedback.
class SmilesError : public std::runtime_error {
 public:
  SmilesError(std::string msg, std::size_t position)
      : std::runtime_error(std::move(msg)), position_(position) {}
  // 1-based character position in the input.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct Atom {
  int atomic_number = 0;
  int charge = 0;
  int isotope = 0;        // 0 = unspecified
  int explicit_h = -1;    // bracket-specified H count, -1 = derive from valence
  int implicit_h = 0;     // total attached hydrogens after derivation
  bool aromatic = false;
  bool bracket = false;   // written in [] in the input
  bool in_ring = false;
  int index = 0;
};

enum class BondOrder : int { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
  bool in_ring = false;
  int stereo = 0;  // '/' = 1, '\' = -1; stored, not modeled
};

class Molecule {
 public:
  Molecule() = default;

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const Atom& atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond& bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }

  // Neighbor atom indices / parallel bond indices of atom i.
  const std::vector<int>& neighbors(int i) const { return adj_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& neighbor_bonds(int i) const { return adj_bonds_[static_cast<std::size_t>(i)]; }
  int degree(int i) const { return static_cast<int>(adj_[static_cast<std::size_t>(i)].size()); }

  // SSSR-style smallest ring basis, |rings| = bonds - atoms + components.
  const std::vector<std::vector<int>>& rings() const { return rings_; }
  int component_count() const { return components_; }
  int aromatic_ring_count() const;

  // Total hydrogen count on atom i (explicit spec or derived).
  int hydrogen_count(int i) const { return atoms_[static_cast<std::size_t>(i)].implicit_h; }
  // Heavy-atom degree plus hydrogens (SMARTS 'X').
  int connectivity(int i) const { return degree(i) + hydrogen_count(i); }

  const std::string& source() const { return source_; }

  int bond_between(int a, int b) const;  // bond index or -1

  friend Molecule parse_smiles(std::string_view text);

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<int>> adj_bonds_;
  std::vector<std::vector<int>> rings_;
  int components_ = 0;
  std::string source_;

  int add_atom(Atom a);
  int add_bond(int a, int b, BondOrder order, int stereo);
  // Ring perception, aromaticity, implicit hydrogens, valence validation.
  void finalize(const std::vector<std::size_t>& atom_positions);
  void mark_ring_membership();
  void build_ring_basis();
  void derive_hydrogens(const std::vector<std::size_t>& atom_positions);
  void perceive_aromaticity();
};

// Parse a SMILES string into an attributed molecular graph. Throws SmilesError
// on syntax, atom-symbol, ring-closure and valence problems.
Molecule parse_smiles(std::string_view text);

// Element counts including implicit hydrogens, keyed by symbol.
std::map<std::string, int> molecular_formula(const Molecule& m);

// Parse a formula string like "C7H8N2O2" into element counts.
std::map<std::string, int> parse_formula(std::string_view text);

// Write a (non-canonical) SMILES string that reparses to an isomorphic graph.
std::string write_smiles(const Molecule& m);

// Standard atomic weight of element z (0.0 for unknown).
double atomic_weight(int z);

const std::string& element_symbol(int z);
int element_number(std::string_view symbol);  // -1 if unknown

}  // namespace molopt

#endif
