// Compares the OpenMP kernels against their serial reference paths and
// verifies they produce identical results.

#include <chrono>
#include <cstdio>
#include <vector>

#include "molopt/harness.hpp"
#include "molopt/substructure.hpp"

using namespace molopt;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const char* kSmiles[] = {
    "CC(C)CC(NC(=O)C(Cc1ccccc1)NC(=O)OC)C(O)Cc1ccccc1",
    "Fc1ccc(S(=O)(=O)Nc2ccc(C(=O)NC3CCCCC3)cc2)cc1",
    "Fc1ccc(S(=O)(=O)Nc2nc3ccccc3s2)cc1C(=O)NC1CCCCC1",
    "Cc1ccc2nc(NC(=O)C3CCC(=O)N(C)C3)sc2c1F",
    "Fc1cc(CNC)c2nc(NC(=O)C3CCCN(CC)C(=O)N3C)sc2c1Cl",
    "O=C1c3c(O/C(=C1/O)c2ccc(O)c(O)c2)cc(O)cc3O",
    "COc1cc(N(C)CCN(C)C)c(NC(=O)C=C)cc1Nc2nccc(n2)c3cn(C)c4ccccc34",
    "Cc1ccc(-c2cc(C(F)(F)F)nn2-c2ccc(S(N)(=O)=O)cc2)cc1",
};

}  // namespace

int main(int argc, char** argv) {
  int replicate = argc > 1 ? std::atoi(argv[1]) : 50;

  std::vector<Molecule> mols;
  for (int r = 0; r < replicate; ++r)
    for (const char* s : kSmiles) mols.push_back(parse_smiles(s));
  std::printf("fingerprint corpus: %zu molecules\n", mols.size());

  auto t0 = Clock::now();
  std::vector<Fingerprint> serial(mols.size());
  for (std::size_t i = 0; i < mols.size(); ++i) serial[i] = maccs_fingerprint(mols[i]);
  double serial_ms = ms_since(t0);

  t0 = Clock::now();
  std::vector<Fingerprint> parallel = maccs_fingerprints(mols);
  double parallel_ms = ms_since(t0);

  bool equal = serial == parallel;
  std::printf("maccs_fingerprints: serial %.1f ms, parallel %.1f ms, speedup %.2fx, %s\n",
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              equal ? "identical" : "MISMATCH");

  std::vector<double> values;
  for (int i = 0; i < 200; ++i) values.push_back(0.001 * i);
  int resamples = 200000;

  t0 = Clock::now();
  BootstrapResult s = bootstrap_ci_serial(values, 0.95, resamples, 42);
  double boot_serial_ms = ms_since(t0);
  t0 = Clock::now();
  BootstrapResult p = bootstrap_ci(values, 0.95, resamples, 42);
  double boot_parallel_ms = ms_since(t0);

  bool boot_equal = s.lower == p.lower && s.upper == p.upper && s.point == p.point;
  std::printf("bootstrap_ci(%d): serial %.1f ms, parallel %.1f ms, speedup %.2fx, %s\n",
              resamples, boot_serial_ms, boot_parallel_ms, boot_serial_ms / boot_parallel_ms,
              boot_equal ? "identical" : "MISMATCH");

  return equal && boot_equal ? 0 : 1;
}
