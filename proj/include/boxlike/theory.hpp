#pragma once

// The differentiability functional phi and the box-dimension root s, both
// computed from RatioMoments only.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boxlike/heightlaw.hpp"
#include "boxlike/symbolic.hpp"

namespace boxlike {

enum class DiffClass {
  DifferentiableAlmostEverywhere,
  NonDifferentiableAlmostEverywhere,
  InconclusiveStatistical,
};

/// "differentiable-a.e.", "non-differentiable-a.e.", "inconclusive-statistical".
const char* to_string(DiffClass c) noexcept;

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

struct DiffReport {
  double phi = 0.0;  ///< may be -infinity
  double std_error = 0.0;
  DiffClass classification = DiffClass::NonDifferentiableAlmostEverywhere;
  std::optional<Interval> ci;
  bool exact = true;     ///< closed-form moments
  double level = 0.99;   ///< two-sided level used when !exact
  std::string verdict_confidence() const;
};

struct StatConfig {
  double level = 0.99;
};

/// Two-sided standard normal quantile for the given coverage level.
double normal_quantile_two_sided(double level);

/// phi = sum_i l_i (E log a_i - log l_i). phi < 0 classifies as
/// differentiable a.e., phi >= 0 as non-differentiable a.e.; with Monte Carlo
/// moments a confidence interval straddling 0 yields InconclusiveStatistical.
DiffReport compute_phi(const RatioMoments& moments, const Partition& p,
                       const StatConfig& stats = {});

struct SolverConfig {
  double tol = 1e-12;
  std::size_t max_iterations = 200;
};

struct DimensionReport {
  double s = 1.0;
  double residual = 0.0;
  Interval bracket{1.0, 2.0};
  std::size_t iterations = 0;
  std::optional<Interval> ci;
  std::vector<std::string> warnings;
};

/// g(s) = sum_i E(a_i) l_i^{s-1} - 1.
double dimension_gap(std::span<const double> mean_a, const Partition& p, double s);

/// Root of g on [1, 2] by bisection. Throws SolverError when the bracket
/// g(1) >= 0 >= g(2) does not hold, ContractError when all E a_i vanish.
DimensionReport solve_dimension(const RatioMoments& moments, const Partition& p,
                                const SolverConfig& config = {});
DimensionReport solve_dimension(std::span<const double> mean_a,
                                const Partition& p,
                                const SolverConfig& config = {});

struct SensitivityResult {
  Interval interval;
  bool lower_open = false;  ///< bracket failed at the pessimistic end
  bool upper_open = false;
  std::vector<std::string> warnings;
};

/// Re-solves with every E a_i moved k standard errors down (lower end) and up
/// (upper end). An end whose bracket fails is reported as the domain bound
/// with a warning.
SensitivityResult dimension_sensitivity(const RatioMoments& moments,
                                        const Partition& p, double k,
                                        const SolverConfig& config = {});

/// alpha = sum_i E(a_i^2) l_i^{2(s-1)}.
double second_moment_rate(const RatioMoments& moments, const Partition& p, double s);

/// E[(sum_i a_i l_i^{s-1})^2].
double squared_sum_moment(const RatioMoments& moments, const Partition& p, double s);

/// max over pairs with nonzero means of E(a_k a_l) / (E a_k E a_l).
double cross_ratio_constant(const RatioMoments& moments);

}  // namespace boxlike
