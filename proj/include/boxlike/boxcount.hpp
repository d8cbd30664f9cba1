#pragma once

// Grid box counting and the log-log dimension fit.
//
// Grid cells are [i delta, (i+1) delta) x [j delta, (j+1) delta), anchored at
// the origin; the last row and column are closed at 1.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "boxlike/realization.hpp"

namespace boxlike {

inline constexpr double kMinBoxScale = 1e-9;

/// Number of grid cells meeting the union of closed rectangles. Returns 1
/// for delta >= 1. Throws DomainError for delta < 1e-9 or coordinates
/// outside [0,1].
std::size_t box_count(std::span<const Rect> rects, double delta);

/// Number of grid cells meeting the polyline through the graph points.
std::size_t box_count(const GraphApprox& graph, double delta);

struct ScaleSchedule {
  /// Empty: delta^k for k = 1..depth with delta = min_i l_i.
  std::vector<double> scales;
};

struct FitPolicy {
  std::size_t drop_coarsest = 2;
  std::size_t min_scales = 3;
};

/// Per-scale bounds on the Q_n-cover count. The "stated" pair is
/// X_n delta^{-ns} / delta <= N <= X_n delta^{-ns} + 2 delta^{-(n+1)}; the
/// "rigorous" pair is
/// X_n delta^{-ns} / (ceil(1/delta) + 1) <= N
///     <= 2 delta^{1-s} delta^{-ns} X_n + 4 delta^{-(n+1)}.
struct SandwichBounds {
  std::size_t n = 0;
  double x_n = 0.0;
  double stated_lower = 0.0;
  double stated_upper = 0.0;
  double rigorous_lower = 0.0;
  double rigorous_upper = 0.0;
};

SandwichBounds sandwich_bounds(double x_n, std::size_t n, double delta, double s);

struct BoxCountResult {
  std::vector<double> scales;        ///< descending
  std::vector<std::size_t> counts;   ///< non-increasing in delta
  std::vector<bool> used;            ///< in the fit
  std::vector<double> excluded;      ///< finer than the approximant resolves
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
  /// Present for scales delta^n when s is supplied and the tree is deep
  /// enough for Q_n.
  std::vector<SandwichBounds> sandwich;
};

/// Least-squares slope of log N against -log delta. Throws FitError when
/// fewer than policy.min_scales scales remain after dropping.
BoxCountResult fit_counts(std::vector<double> scales, std::vector<std::size_t> counts,
                          const FitPolicy& policy = {});

BoxCountResult estimate_dimension(std::span<const Rect> rects, std::span<const double> scales,
                                  const FitPolicy& policy = {});

/// Counts the level-n polyline at each scale. Scales finer than the widest
/// level-n interval are excluded. With `s`, sandwich bounds from X_n are
/// attached for every scale delta^n whose Q_n the tree contains.
BoxCountResult estimate_dimension(const RealizationTree& tree, const ScaleSchedule& schedule = {},
                                  const FitPolicy& policy = {},
                                  std::optional<double> s = std::nullopt);

}  // namespace boxlike
