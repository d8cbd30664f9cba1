#pragma once

// Along the coding of a Lebesgue-typical x, the increments
// log(a_{omega|k} / l_{omega_k}) have mean phi under the product measure, so
// S_n / n -> phi. One realization theta is shared by all probe paths.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "boxlike/heightlaw.hpp"
#include "boxlike/symbolic.hpp"

namespace boxlike {

struct DriftPath {
  std::vector<double> frequencies;  ///< C_n^{(i)} / n; sums to 1
  double sum = 0.0;                 ///< S_n, may be -infinity
  double slope = 0.0;               ///< S_n / n
  std::size_t sign_changes = 0;     ///< of S_k over k <= n (illustrative)
};

/// Follows the given digits in the realization keyed by `seed`.
DriftPath drift_along(const HeightLaw& law, const Partition& p, std::uint64_t seed,
                      const Word& digits);

struct DriftConfig {
  std::size_t paths = 200;
  std::size_t steps = 2000;
  std::uint64_t seed = 1;
  double band = 4.0;
};

struct DriftReport {
  double phi = 0.0;  ///< target the slopes are compared against
  std::size_t paths = 0;
  std::size_t steps = 0;
  double mean_slope = 0.0;
  double se_slope = 0.0;
  std::vector<double> mean_frequency;
  std::vector<double> se_frequency;
  std::size_t sign_changes = 0;
  bool slope_ok = false;
  bool frequencies_ok = false;
  std::vector<DriftPath> samples;
};

/// Digits of each x are drawn with probabilities l_i from an auxiliary stream
/// of the seed. Slopes are compared with `phi` within band standard errors;
/// frequencies with l_i.
DriftReport drift_probe(const HeightLaw& law, const Partition& p, double phi,
                        const DriftConfig& config = {});

}  // namespace boxlike
