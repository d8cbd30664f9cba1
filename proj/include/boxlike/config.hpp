#pragma once

// Model configuration files: a YAML (JSON-compatible) key/value tree that
// parses to a valid Partition and HeightLaw or fails with a line-anchored
// ConfigError.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boxlike/heightlaw.hpp"
#include "boxlike/symbolic.hpp"
#include "boxlike/theory.hpp"

namespace boxlike {

struct ModelConfig {
  std::vector<double> breakpoints;
  HeightLaw law = HeightLaw::iid_uniform(3);
  std::optional<std::uint64_t> seed;
  std::size_t depth = 8;
  std::size_t max_depth = kDefaultMaxDepth;
  std::size_t node_budget = 8'000'000;

  MomentConfig moments;
  SolverConfig solver;
  StatConfig stats;
  double sensitivity_k = 2.0;

  // boxcount
  std::vector<double> scales;
  std::size_t drop_coarsest = 2;
  std::size_t min_scales = 3;

  // diagnose
  std::size_t n_max = 8;
  std::size_t trees = 2000;
  std::size_t sandwich_trees = 20;
  double band = 4.0;
  double decay_slack = 0.05;
  double s_offset = 0.0;
  std::size_t drift_paths = 200;
  std::size_t drift_steps = 2000;
  /// Materialized tree for the exact streamed-vs-tree cross-check; 0 picks
  /// the depth required for `exact_levels`.
  std::size_t exact_depth = 0;
  std::size_t exact_levels = 3;

  // render
  int svg_width = 640;
  int svg_height = 640;
  std::optional<std::size_t> rectangles_level;

  std::optional<std::string> out;
  std::optional<std::string> svg;
  std::string format = "json";

  Partition partition() const { return Partition(breakpoints); }
};

/// Throws ConfigError (with the offending line where known) for malformed
/// text, unknown keys, wrong types or values that do not form a valid
/// partition and height law.
ModelConfig parse_config(const std::string& text);
ModelConfig load_config(const std::string& path);

}  // namespace boxlike
