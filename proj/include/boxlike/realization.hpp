#pragma once

// One sampled realization theta: the random rectangle tree R_omega to a
// finite depth, the level-n graph approximant, and its SVG/CSV export.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxlike/heightlaw.hpp"
#include "boxlike/symbolic.hpp"

namespace boxlike {

/// Closed axis-parallel rectangle [x0, x1] x [y0, y1]. Segments are
/// degenerate rectangles.
struct Rect {
  double x0, x1, y0, y1;
};

/// All nodes of one level, in lexicographic word order (structure of arrays).
struct Level {
  std::size_t depth = 0;
  std::vector<double> u;       ///< F(b_omega), signed frame endpoint
  std::vector<double> w;       ///< F(b_omega')
  std::vector<double> ratio;   ///< signed ratio y_{omega'} - y_omega (1 at the root)
  std::vector<double> height;  ///< h_omega = prod_k a_{omega|k}
  std::vector<double> base;    ///< b_omega
  std::vector<double> width;   ///< l_omega
  std::vector<std::uint64_t> key;

  std::size_t size() const noexcept { return u.size(); }
  double a(std::size_t i) const { return std::abs(ratio[i]); }
  Rect rect(std::size_t i) const {
    return {base[i], base[i] + width[i], std::min(u[i], w[i]), std::max(u[i], w[i])};
  }
};

struct TreeConfig {
  std::size_t max_depth = kDefaultMaxDepth;
  /// Upper bound on the number of stored nodes; exceeded -> ResourceError.
  std::size_t node_budget = 8'000'000;
};

/// Draws the ordinate vector Y_omega of the node with the given key. Every
/// consumer of a realization (tree, streaming diagnostics, drift probe) goes
/// through this, so a node's randomness depends only on (seed, path).
void node_heights(const HeightLaw& law, std::uint64_t key, std::span<double> y);

class RealizationTree {
 public:
  RealizationTree(Partition p, std::uint64_t seed, std::vector<Level> levels)
      : partition_(std::move(p)), seed_(seed), levels_(std::move(levels)) {}

  std::size_t depth() const noexcept { return levels_.size() - 1; }
  std::size_t m() const noexcept { return partition_.m(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const Partition& partition() const noexcept { return partition_; }
  const Level& level(std::size_t k) const { return levels_.at(k); }

  struct Node {
    double u, w, ratio, height, base, width;
  };
  /// Throws DomainError for words longer than the tree or with bad digits.
  Node node(const Word& w) const;

 private:
  Partition partition_;
  std::uint64_t seed_;
  std::vector<Level> levels_;
};

/// Expands every node of `parent` into its m children.
Level expand_level(const Level& parent, const Partition& p, const HeightLaw& law);

Level root_level(std::uint64_t seed);

/// Materializes levels 0..depth. Throws ContractError for a rejected law and
/// ResourceError when depth > max_depth or the node count exceeds the budget.
RealizationTree sample_tree(const Partition& p, const HeightLaw& law,
                            std::size_t depth, std::uint64_t seed,
                            const TreeConfig& config = {});

/// Level-only mode: streams levels 0..depth to `visit`, keeping only the
/// current frontier in memory.
void stream_levels(const Partition& p, const HeightLaw& law, std::size_t depth,
                   std::uint64_t seed, const std::function<void(const Level&)>& visit,
                   const TreeConfig& config = {});

/// The final level only (frontier memory).
Level sample_level(const Partition& p, const HeightLaw& law, std::size_t depth,
                   std::uint64_t seed, const TreeConfig& config = {});

/// Level-n approximant: points (b_omega, F(b_omega)) for all omega in I_n,
/// then (1, 1). Consecutive points are the diagonals of the level rectangles.
struct GraphApprox {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return x.size(); }
  std::vector<Rect> rectangles() const;
};

/// Throws ConsistencyError if sibling continuity fails beyond 1e-9.
GraphApprox graph_points(const Level& level);
GraphApprox graph_points(const RealizationTree& tree);
GraphApprox graph_points(const RealizationTree& tree, std::size_t level);

struct RenderOptions {
  int width = 640;
  int height = 640;
  int margin = 24;
  /// Outline these level rectangles and draw their diagonals.
  std::optional<GraphApprox> rectangles;
  std::string stroke = "#1f3b73";
  double stroke_width = 1.0;
};

/// Deterministic SVG document: unit-square frame, optional rectangles with
/// diagonals, and the graph polyline.
std::string render_svg(const GraphApprox& graph, const RenderOptions& options = {});

/// "x,y" header then one point per line, 17 significant digits.
std::string graph_to_csv(const GraphApprox& graph);

}  // namespace boxlike
