#include "molopt/molgraph.hpp"

#include <array>
#include <unordered_map>

namespace molopt {

namespace {

constexpr int kMaxZ = 118;

const std::array<const char*, kMaxZ + 1> kSymbols = {
    "*",  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
    "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
    "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

// Standard atomic weights (conventional values) for the common range; rare
// elements carry the mass number of the most stable isotope.
const std::array<double, kMaxZ + 1> kWeights = {
    0.0,     1.008,   4.0026,  6.94,    9.0122,  10.811,  12.011,  14.007,
    15.999,  18.998,  20.180,  22.990,  24.305,  26.982,  28.086,  30.974,
    32.067,  35.453,  39.948,  39.098,  40.078,  44.956,  47.867,  50.942,
    51.996,  54.938,  55.845,  58.933,  58.693,  63.546,  65.38,   69.723,
    72.630,  74.922,  78.971,  79.904,  83.798,  85.468,  87.62,   88.906,
    91.224,  92.906,  95.95,   97.0,    101.07,  102.906, 106.42,  107.868,
    112.414, 114.818, 118.710, 121.760, 127.60,  126.904, 131.293, 132.905,
    137.327, 138.905, 140.116, 140.908, 144.242, 145.0,   150.36,  151.964,
    157.25,  158.925, 162.500, 164.930, 167.259, 168.934, 173.045, 174.967,
    178.49,  180.948, 183.84,  186.207, 190.23,  192.217, 195.084, 196.967,
    200.592, 204.38,  207.2,   208.980, 209.0,   210.0,   222.0,   223.0,
    226.0,   227.0,   232.038, 231.036, 238.029, 237.0,   244.0,   243.0,
    247.0,   247.0,   251.0,   252.0,   257.0,   258.0,   259.0,   262.0,
    267.0,   270.0,   269.0,   270.0,   270.0,   278.0,   281.0,   281.0,
    285.0,   286.0,   289.0,   289.0,   293.0,   293.0,   294.0};

const std::unordered_map<std::string_view, int>& symbol_map() {
  static const std::unordered_map<std::string_view, int> map = [] {
    std::unordered_map<std::string_view, int> m;
    for (int z = 1; z <= kMaxZ; ++z) m.emplace(kSymbols[static_cast<std::size_t>(z)], z);
    return m;
  }();
  return map;
}

}  // namespace

double atomic_weight(int z) {
  if (z < 0 || z > kMaxZ) return 0.0;
  return kWeights[static_cast<std::size_t>(z)];
}

const std::string& element_symbol(int z) {
  static const std::array<std::string, kMaxZ + 1> symbols = [] {
    std::array<std::string, kMaxZ + 1> s;
    for (int z = 0; z <= kMaxZ; ++z) s[static_cast<std::size_t>(z)] = kSymbols[static_cast<std::size_t>(z)];
    return s;
  }();
  if (z < 0 || z > kMaxZ) return symbols[0];
  return symbols[static_cast<std::size_t>(z)];
}

int element_number(std::string_view symbol) {
  auto it = symbol_map().find(symbol);
  return it == symbol_map().end() ? -1 : it->second;
}

}  // namespace molopt
