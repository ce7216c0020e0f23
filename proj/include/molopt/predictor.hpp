#ifndef MOLOPT_PREDICTOR_HPP
#define MOLOPT_PREDICTOR_HPP

#include <array>
#include <string>

#include "molopt/substructure.hpp"

namespace molopt {

// Linear model over structural-key bits: pIC50 = intercept + sum w_b x_b.
// Baseline bit frequencies E[x] make exact additive attributions computable.
struct AdditivePredictor {
  double intercept = 0.0;
  std::array<double, 167> weights{};
  std::array<double, 167> baseline{};

  double predict(const Fingerprint& fp) const {
    double v = intercept;
    for (int b = 1; b <= 166; ++b)
      if (fp.bits.test(static_cast<std::size_t>(b))) v += weights[static_cast<std::size_t>(b)];
    return v;
  }
  double expected_value() const {
    double v = intercept;
    for (int b = 1; b <= 166; ++b)
      v += weights[static_cast<std::size_t>(b)] * baseline[static_cast<std::size_t>(b)];
    return v;
  }

  static AdditivePredictor load(const std::string& path);
};

}  // namespace molopt

#endif
