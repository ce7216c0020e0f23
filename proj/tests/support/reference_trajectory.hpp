#ifndef MOLOPT_TESTS_REFERENCE_TRAJECTORY_HPP
#define MOLOPT_TESTS_REFERENCE_TRAJECTORY_HPP

#include <cmath>
#include <vector>

namespace molopt::testing {

// One iteration of the 50-call reference optimization run used as a fixture
// across the test suites. Iteration 44 was an invalid proposal (no outcome).
struct RefIteration {
  int iteration;
  const char* smiles;  // nullptr = invalid proposal
  double ic50_nm;      // NaN when invalid
  double qed;
  bool novel;
};

inline const std::vector<RefIteration>& reference_run() {
  static const std::vector<RefIteration> rows = {
      {1, "CC(C)CC(NC(=O)C(Cc1ccccc1)NC(=O)OC)C(O)Cc1ccccc1", 94377.57, 0.560, true},
      {2, "Fc1ccc(S(=O)(=O)Nc2ccc(C(=O)NC3CCCCC3)cc2)cc1", 810.56, 0.836, false},
      {3, "FC(F)(F)c1ccc(S(=O)(=O)Nc2ccc(C(=O)NC3CCCC3)nc2)cc1", 2907.69, 0.784, true},
      {4, "Fc1ccc(S(=O)(=O)Nc2nc3ccccc3s2)cc1C(=O)NC1CCCCC1", 491.44, 0.628, true},
      {5, "Fc1ccc(Sc2ccc(C(=O)N3CCNCC3)nc2)cc1", 8718.88, 0.944, true},
      {6, "Fc1ccc(S(=O)(=O)N2CCN(C(=O)c3cccnc3)CC2)cc1", 12561.47, 0.839, false},
      {7, "Fc1ccc2nc(NC(=O)c3ccc(C(=O)NC4CCOCC4)cc3)sc2c1", 2449.49, 0.703, true},
      {8, "Fc1ccc2sc(NC(=O)c3cccc(F)c3)nc2c1CC(O)C1CCCCC1", 1021.78, 0.592, true},
      {9, "Fc1ccc2sc(NC(=O)c3ccncc3)nc2c1CN1CCOCC1", 1061.66, 0.763, true},
      {10, "Fc1ccc(S(=O)(=O)NC2CCN(C(=O)c3ccccc3)CC2)cc1", 5591.23, 0.908, false},
      {11, "Cc1ccc2nc(NC(=O)C3CCCCC3)sc2c1F", 752.34, 0.898, true},
      {12, "Cc1ccc2nc(NC(=O)C3CCNCC3)sc2c1F", 2377.80, 0.895, true},
      {13, "Cc1ccc2nc(NC(=O)CN3CCOCC3)sc2c1F", 839.39, 0.942, true},
      {14, "Cc1ccc2nc(NC(=O)CN3CCN(C)CC3)sc2c1F", 1352.25, 0.938, true},
      {15, "Cc1ccc2nc(NC(=O)C3CC(O)CCC3)sc2c1F", 744.23, 0.895, true},
      {16, "Cc1ccc2nc(NC(=O)C3CCC(=O)NC3)sc2c1F", 320.67, 0.893, true},
      {17, "Cc1ccc2nc(NC(=O)C3CCC(=O)N(C)C3)sc2c1F", 169.35, 0.924, true},
      {18, "Cc1ccc2nc(NC(=O)C3CC(O)C(=O)N(C)C3)sc2c1F", 2055.81, 0.870, true},
      {19, "Cc1ccc2nc(NC(=O)C3CN(C)C(=O)CN3C)sc2c1F", 241.84, 0.902, true},
      {20, "CN(C)c1ccc2nc(NC(=O)C3CCC(=O)N(C)C3)sc2c1", 44128.01, 0.935, true},
      {21, "Cc1ccc2nc(NC(=O)C3CCC(=O)N3C)sc2c1Cl", 157.35, 0.924, true},
      {22, "Cc1ccc2nc(NC(=O)C3CCC(=O)N(C)C3)sc2c1Cl", 116.91, 0.916, true},
      {23, "Cc1ccc2nc(NC(=O)C3CCN(C)C(=O)N3C)sc2c1Cl", 108.01, 0.903, true},
      {24, "Cc1ccc2nc(NC(=O)C3CCCC(=O)N(C)C3)sc2c1Cl", 182.31, 0.901, true},
      {25, "Cc1cc(CN(C)C)c2nc(NC(=O)C3CCC(=O)N(C)C3)sc2c1Cl", 80.30, 0.865, true},
      {26, "Clc1cc(Cl)c2nc(NC(=O)C3CCC(=O)N(C)C3)sc2c1", 937.08, 0.895, true},
      {27, "Cc1cc(CN(C)C)c2nc(NC(=O)C3CN(C)C(=O)CC3)sc2c1Cl", 80.30, 0.865, true},
      {28, "Fc1cc(C)c2nc(NC(=O)C3CCC(=O)N(C)C3)sc2c1Cl", 61.52, 0.899, true},
      {29, "Fc1cc(C)c2nc(NC(=O)C3CCC(=O)N(CC)C3)sc2c1Cl", 17.80, 0.899, true},
      {30, "Fc1cc(C)c2nc(NC(=O)C3CCC(=O)N(CCC)C3)sc2c1Cl", 48.02, 0.868, true},
      {31, "Fc1cc(CN)c2nc(NC(=O)C3CCC(=O)N(CC)C3)sc2c1Cl", 13.66, 0.848, true},
      {32, "Fc1cc(CN(C)C)c2nc(NC(=O)C3CCC(=O)N(CC)C3)sc2c1Cl", 23.30, 0.817, true},
      {33, "Fc1cc(C)c2nc(NC(=O)C3CCC(=O)N(C(C)C)C3)sc2c1Cl", 29.26, 0.871, true},
      {34, "Fc1cc(CNC)c2nc(NC(=O)C3CCC(=O)N(CC)C3)sc2c1Cl", 9.36, 0.811, true},
      {35, "Fc1cc(CNC)c2nc(NC(=O)C3CCN(CC)C(=O)N3)sc2c1Cl", 7.54, 0.721, true},
      {36, "Fc1cc(CN(C)C)c2nc(NC(=O)C3CCC(=O)N(CC)C3)sc2c1Cl", 23.30, 0.817, true},
      {37, "Fc1cc(CNC)c2nc(NC(=O)C3CCN(CC)C(=O)N3C)sc2c1Cl", 5.20, 0.790, true},
      {38, "Fc1cc(CNC)c2nc(NC(=O)C3CCCN(CC)C(=O)N3C)sc2c1Cl", 2.47, 0.767, true},
      {39, "Fc1cc(CNC)c2nc(NC(=O)C3CCCN(C=C)C(=O)N3C)sc2c1Cl", 21.70, 0.769, true},
      {40, "Fc1cc(CNCC)c2nc(NC(=O)C3CCCN(CC)C(=O)N3C)sc2c1Cl", 2.77, 0.717, true},
      {41, "Fc1cc(CC)c2nc(NC(=O)C3CCCN(CC)C(=O)N3C)sc2c1Cl", 8.73, 0.821, true},
      {42, "Fc1cc(COC)c2nc(NC(=O)C3CCCN(CC)C(=O)N3C)sc2c1Cl", 6.33, 0.787, true},
      {43, "Fc1cc2nc(NC(=O)C3CCCN(CC)C(=O)N3C)sc2cc1Cl", 12.26, 0.879, true},
      {44, nullptr, std::nan(""), std::nan(""), false},
      {45, "Fc1cc(CNC)c2nc(NC(=O)C3CCCN(CC4CC4)C(=O)N3C)sc2c1Cl", 4.01, 0.699, true},
      {46, "Fc1cc(CNC)c2nc(NC(=O)C3CCCN(CC)C(=S)N3C)sc2c1Cl", 23.16, 0.690, true},
      {47, "Fc1cc(CNC)c2nc(NC(=O)C3CCCN(C)C(=O)N3C)sc2c1Cl", 15.06, 0.807, true},
      {48, "Fc1cc(CNCCC)c2nc(NC(=O)C3CCCN(CC)C(=O)N3C)sc2c1Cl", 3.22, 0.617, true},
      {49, "Fc1cc(CNC)c2nc(NC(=O)C3CCCN(CC)CC3)sc2c1Cl", 58.96, 0.802, true},
      {50, "Fc1cc(C(F)NC)c2nc(NC(=O)C3CCCN(CC)C(=O)N3C)sc2c1Cl", 5.52, 0.687, true},
  };
  return rows;
}

}  // namespace molopt::testing

#endif
