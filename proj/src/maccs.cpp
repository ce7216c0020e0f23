#include <fstream>
#include <sstream>

#include "molopt/datapath.hpp"
#include "molopt/substructure.hpp"

namespace molopt {

std::string MaccsKey::display() const {
  if (min_count > 1) return smarts + " (count > " + std::to_string(min_count - 1) + ")";
  return smarts;
}

MaccsTable::MaccsTable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MACCS key table: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# maccs-keys ", 0) != 0)
    throw std::runtime_error("MACCS key table missing version header: " + path);
  version_ = line.substr(13);
  keys_.resize(167);
  int loaded = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    MaccsKey key;
    std::string kind;
    ls >> key.index >> kind >> key.min_count;
    std::getline(ls, key.smarts);
    auto first = key.smarts.find_first_not_of(" \t");
    key.smarts = first == std::string::npos ? std::string() : key.smarts.substr(first);
    if (!ls && key.index == 0) throw std::runtime_error("malformed key table line: " + line);
    if (key.index < 1 || key.index > 166)
      throw std::runtime_error("key index out of range in: " + line);
    if (kind == "smarts") {
      key.kind = MaccsKey::Kind::Smarts;
      key.pattern = compile_pattern(key.smarts, key.min_count);
    } else if (kind == "aromatic_rings") {
      key.kind = MaccsKey::Kind::AromaticRings;
    } else if (kind == "fragments") {
      key.kind = MaccsKey::Kind::Fragments;
    } else if (kind == "large_ring") {
      key.kind = MaccsKey::Kind::LargeRing;
    } else if (kind == "unimplemented") {
      key.kind = MaccsKey::Kind::Unimplemented;
    } else {
      throw std::runtime_error("unknown key kind '" + kind + "' in: " + line);
    }
    keys_[static_cast<std::size_t>(key.index)] = key;
    ++loaded;
  }
  if (loaded != 166)
    throw std::runtime_error("MACCS key table holds " + std::to_string(loaded) +
                             " keys, expected 166");
}

const MaccsTable& MaccsTable::instance() {
  static const MaccsTable table(data_file("maccs_keys.txt"));
  return table;
}

const MaccsKey* MaccsTable::find(int index) const {
  if (index < 1 || index > 166) return nullptr;
  return &keys_[static_cast<std::size_t>(index)];
}

std::vector<int> MaccsTable::unimplemented() const {
  std::vector<int> out;
  for (int i = 1; i <= 166; ++i)
    if (keys_[static_cast<std::size_t>(i)].kind == MaccsKey::Kind::Unimplemented)
      out.push_back(i);
  return out;
}

Fingerprint maccs_fingerprint(const Molecule& m) {
  const MaccsTable& table = MaccsTable::instance();
  Fingerprint fp;
  fp.key_table_version = table.version();
  for (int i = 1; i <= 166; ++i) {
    const MaccsKey& key = *table.find(i);
    bool set = false;
    switch (key.kind) {
      case MaccsKey::Kind::Smarts:
        set = has_count_at_least(key.pattern, m, key.min_count);
        break;
      case MaccsKey::Kind::AromaticRings:
        set = m.aromatic_ring_count() >= key.min_count;
        break;
      case MaccsKey::Kind::Fragments:
        set = m.component_count() >= key.min_count;
        break;
      case MaccsKey::Kind::LargeRing: {
        for (const auto& ring : m.rings())
          if (ring.size() >= 8) {
            set = true;
            break;
          }
        break;
      }
      case MaccsKey::Kind::Unimplemented:
        set = false;
        break;
    }
    if (set) fp.bits.set(static_cast<std::size_t>(i));
  }
  return fp;
}

std::vector<Fingerprint> maccs_fingerprints(std::span<const Molecule> mols) {
  MaccsTable::instance();  // load before the parallel region
  std::vector<Fingerprint> out(mols.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(mols.size()); ++i)
    out[static_cast<std::size_t>(i)] = maccs_fingerprint(mols[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace molopt
