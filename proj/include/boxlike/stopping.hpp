#pragma once

// Stopping sets Q_n: the minimal words with delta^{n+1} < l_omega <= delta^n,
// delta = min_i l_i.

#include <cstddef>
#include <span>
#include <vector>

#include "boxlike/symbolic.hpp"

namespace boxlike {

/// Thresholds delta^k with a relative slack of 1e-9 in log space, so that
/// widths computed as floating products of the l_i land on the intended
/// side of each scale. All stopping-set membership tests go through this.
class ScaleLadder {
 public:
  explicit ScaleLadder(const Partition& p, std::size_t levels = 64);

  double delta() const noexcept { return delta_; }
  /// l <= delta^k (up to the slack).
  bool reaches(double width, std::size_t k) const {
    return k < thresholds_.size() ? width <= thresholds_[k] : reaches_far(width, k);
  }
  /// Largest k with reaches(width, k); a child's level exceeds its parent's
  /// by at most one.
  std::size_t level(double width) const;
  /// delta^k without slack.
  double scale(std::size_t k) const;

 private:
  bool reaches_far(double width, std::size_t k) const;

  double delta_;
  double log_delta_;
  std::vector<double> thresholds_;
};

struct StoppingSet {
  std::size_t n = 0;
  std::size_t m = 0;
  double delta = 0.0;
  std::vector<Word> words;      ///< lexicographic order
  std::vector<double> lengths;  ///< l_omega, parallel to words
};

/// Depth-first descent stopping at the first prefix with l_omega <= delta^n.
/// Throws DomainError for n = 0, ResourceError once more than `word_budget`
/// words would be produced.
StoppingSet build_stopping_set(const Partition& p, std::size_t n,
                               std::size_t word_budget = 4'000'000);

/// |sum over the set of prod_i p_{omega_i} - 1|. Throws DomainError unless
/// `weights` is a probability vector of size m (sum within 1e-9 of 1).
double partition_identity_check(const StoppingSet& set, std::span<const double> weights);

/// ceil((n+1) log delta / log max_i l_i): a tree this deep contains every
/// word of Q_0..Q_n.
std::size_t required_tree_depth(const Partition& p, std::size_t n);

}  // namespace boxlike
