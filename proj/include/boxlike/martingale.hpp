#pragma once

// X_n = sum_{Q_n} h l^{s-1} and Y_n = sum_{I_n} h l^{s-1} per realization,
// the Q_n-cover sandwich, and multi-tree statistical diagnostics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "boxlike/boxcount.hpp"
#include "boxlike/heightlaw.hpp"
#include "boxlike/realization.hpp"
#include "boxlike/stopping.hpp"

namespace boxlike {

struct MartingaleTrace {
  double s = 1.0;
  /// sum_i E(a_i^2) l_i^{2(s-1)}; NaN when no moments were supplied.
  double alpha = 0.0;
  std::vector<double> x;               ///< X_0..X_{n_max}
  std::vector<double> y;               ///< Y_0..Y_{n_max}
  std::vector<double> gap;             ///< |X_n - Y_n|
  std::vector<std::size_t> q_size;     ///< #Q_n
};

/// Exact sums on a materialized tree. Throws InsufficientDepthError when the
/// tree is shallower than required_tree_depth(p, n_max).
MartingaleTrace martingale_trace(const RealizationTree& tree, double s, std::size_t n_max,
                                 std::optional<double> alpha = std::nullopt);

/// The same sums by a depth-first walk that never materializes the tree.
/// Node randomness is keyed exactly as in sample_tree, so for equal seeds
/// both agree up to summation order. With `cover_counts`, also returns the
/// box count of the Q_n rectangles at scale delta^n for n = 0..n_max.
struct StreamedTrace {
  MartingaleTrace trace;
  std::vector<std::size_t> cover_counts;
};
StreamedTrace stream_martingale_trace(const Partition& p, const HeightLaw& law, std::uint64_t seed,
                                      double s, std::size_t n_max, bool cover_counts = false);

/// Rectangles R_omega for omega in Q_n, from a materialized tree.
std::vector<Rect> q_cover_rects(const RealizationTree& tree, std::size_t n);

struct SandwichRow {
  SandwichBounds bounds;
  double scale = 0.0;
  std::size_t count = 0;
  bool stated_lower_ok = false;
  bool stated_upper_ok = false;
  bool rigorous_lower_ok = false;
  bool rigorous_upper_ok = false;
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  bool stated_holds() const;
  bool rigorous_holds() const;
};

/// Compares counts[k] (taken at scales[k] = delta^n, n = k + 1) against the
/// bounds from trace.x[n]. Throws ContractError when a scale is not delta^n
/// to 1e-12 relative or the lengths disagree.
SandwichReport sandwich_check(const MartingaleTrace& trace, std::span<const std::size_t> counts,
                              std::span<const double> scales, const Partition& p);

struct MartingaleConfig {
  std::size_t n_max = 8;
  std::size_t trees = 2000;
  std::uint64_t seed = 1;
  /// Half-width of every statistical band, in standard errors.
  double band = 4.0;
  /// Trees (the first ones) whose Q_n covers are box counted.
  std::size_t sandwich_trees = 20;
  /// Allowed excess of the fitted gap decay rate over alpha.
  double decay_slack = 0.05;
};

struct MartingaleLevel {
  std::size_t n = 0;
  double mean_y = 0.0;
  double se_y = 0.0;
  double mean_y_sq = 0.0;
  double se_y_sq = 0.0;
  double y_sq_bound = 0.0;   ///< 1 + C sum_{k<n} alpha^k
  double mean_gap_sq = 0.0;
  double se_gap_sq = 0.0;
  double gap_bound = 0.0;    ///< C' alpha^n / (1 - alpha)
  bool mean_ok = false;
  bool y_sq_ok = false;
  bool gap_ok = false;
};

struct SandwichSummary {
  std::size_t pairs = 0;
  std::size_t stated_lower_violations = 0;
  std::size_t stated_upper_violations = 0;
  std::size_t rigorous_lower_violations = 0;
  std::size_t rigorous_upper_violations = 0;
};

struct MartingaleDiagnostics {
  double s = 1.0;
  double alpha = 0.0;
  double c_second = 0.0;  ///< C = E[(sum_i a_i l_i^{s-1})^2]
  double c_cross = 0.0;   ///< C' = max E(a_k a_l) / (E a_k E a_l)
  std::size_t trees = 0;
  std::vector<MartingaleLevel> levels;  ///< n = 0..n_max
  /// exp of the least-squares slope of log E(X_n - Y_n)^2 over n >= 1 with a
  /// positive estimate; 0 when the gap vanishes identically.
  double decay_rate = 0.0;
  bool decay_ok = false;
  SandwichSummary sandwich;
  /// Y_n, the bands and the decay rate.
  bool statistical_pass() const;
  /// Y_0 = 1 and the rigorous sandwich on every tested pair.
  bool exact_pass() const;
};

MartingaleDiagnostics martingale_diagnostics(const HeightLaw& law, const Partition& p, double s,
                                             const MartingaleConfig& config = {},
                                             const MomentConfig& moment_config = {});

}  // namespace boxlike
