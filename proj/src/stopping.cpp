#include "boxlike/stopping.hpp"

#include <cmath>
#include <string>

#include "boxlike/error.hpp"

namespace boxlike {

namespace {
constexpr double kLevelSlack = 1e-9;
}

ScaleLadder::ScaleLadder(const Partition& p, std::size_t levels)
    : delta_(p.min_length()), log_delta_(std::log(p.min_length())) {
  thresholds_.resize(levels + 1);
  for (std::size_t k = 0; k <= levels; ++k) {
    thresholds_[k] = std::exp((static_cast<double>(k) - kLevelSlack) * log_delta_);
  }
}

bool ScaleLadder::reaches_far(double width, std::size_t k) const {
  return std::log(width) <= (static_cast<double>(k) - kLevelSlack) * log_delta_;
}

std::size_t ScaleLadder::level(double width) const {
  std::size_t k = 0;
  while (reaches(width, k + 1)) ++k;
  return k;
}

double ScaleLadder::scale(std::size_t k) const {
  return std::pow(delta_, static_cast<double>(k));
}

StoppingSet build_stopping_set(const Partition& p, std::size_t n, std::size_t word_budget) {
  if (n == 0) throw DomainError("stopping sets are defined for n >= 1");
  const ScaleLadder ladder(p, n + 1);
  StoppingSet out;
  out.n = n;
  out.m = p.m();
  out.delta = ladder.delta();

  Word w;
  std::vector<double> widths{1.0};
  // Iterative DFS: `w` is the current word, widths[k] = l_{w|k}.
  auto descend = [&](auto&& self) -> void {
    const double width = widths.back();
    if (ladder.reaches(width, n)) {
      if (out.words.size() >= word_budget) {
        throw ResourceError("stopping set Q_" + std::to_string(n) + " exceeds the budget of " +
                            std::to_string(word_budget) + " words");
      }
      out.words.push_back(w);
      out.lengths.push_back(width);
      return;
    }
    for (std::uint32_t i = 0; i < p.m(); ++i) {
      w.digits.push_back(i);
      widths.push_back(width * p.length(i));
      self(self);
      widths.pop_back();
      w.digits.pop_back();
    }
  };
  descend(descend);
  return out;
}

double partition_identity_check(const StoppingSet& set, std::span<const double> weights) {
  if (weights.size() != set.m) {
    throw DomainError("expected " + std::to_string(set.m) + " weights, got " +
                      std::to_string(weights.size()));
  }
  long double total = 0.0L;
  for (double q : weights) {
    if (!std::isfinite(q) || q < 0.0) throw DomainError("weights must be finite and non-negative");
    total += q;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-9) {
    throw DomainError("weights sum to " + std::to_string(static_cast<double>(total)) +
                      ", not 1");
  }
  long double sum = 0.0L;
  for (const Word& w : set.words) {
    long double prod = 1.0L;
    for (std::uint32_t d : w.digits) prod *= weights[d];
    sum += prod;
  }
  return std::abs(static_cast<double>(sum - 1.0L));
}

std::size_t required_tree_depth(const Partition& p, std::size_t n) {
  const double ratio = std::log(p.min_length()) / std::log(p.max_length());
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n + 1) * ratio - 1e-9));
}

}  // namespace boxlike
