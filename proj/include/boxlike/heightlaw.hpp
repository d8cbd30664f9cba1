#pragma once

// Joint law of the random ordinates Y = (y_1, ..., y_{m-1}) redrawn at every
// node, and the moments of the vertical ratios a_i = |y_{i+1} - y_i|
// (y_0 = 0, y_m = 1) consumed by the theory solvers.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "boxlike/rng.hpp"
#include "boxlike/symbolic.hpp"

namespace boxlike {

struct DeterministicHeights {
  std::vector<double> y;
};

struct IidUniform {};

struct IidBeta {
  double alpha;
  double beta;
};

/// m = 3 only: y_1 ~ Beta(alpha, beta) and y_2 = 1 - y_1.
struct MirroredBeta {
  double alpha;
  double beta;
};

/// Black-box joint sampler. It writes m-1 ordinates into `y`. The caller
/// declares whether the law satisfies the model assumptions; validate() can
/// only spot-check that declaration.
struct CustomSampler {
  std::string name;
  std::function<void(StreamRng&, std::span<double>)> draw;
  bool assumptions_declared = true;
};

class HeightLaw {
 public:
  using Family = std::variant<DeterministicHeights, IidUniform, IidBeta,
                              MirroredBeta, CustomSampler>;

  static HeightLaw deterministic(std::vector<double> y);
  static HeightLaw iid_uniform(std::size_t m);
  static HeightLaw iid_beta(std::size_t m, double alpha, double beta);
  static HeightLaw mirrored_beta(double alpha, double beta);
  static HeightLaw custom(std::size_t m, CustomSampler sampler);

  /// Okamoto's function: Deterministic(alpha, 1 - alpha) on thirds.
  static HeightLaw okamoto(double alpha);

  std::size_t m() const noexcept { return m_; }
  const Family& family() const noexcept { return family_; }
  std::string family_name() const;
  bool is_deterministic() const noexcept {
    return std::holds_alternative<DeterministicHeights>(family_);
  }

  /// Draws one vector of m-1 ordinates into y. Throws ContractError when a
  /// custom sampler produces values outside [0,1].
  void draw(StreamRng& rng, std::span<double> y) const;

 private:
  HeightLaw(std::size_t m, Family f) : m_(m), family_(std::move(f)) {}

  std::size_t m_;
  Family family_;
};

struct SampleVector {
  std::vector<double> y;

  std::size_t m() const noexcept { return y.size() + 1; }
  /// y_{i+1} - y_i for i = 0..m-1; sums to 1.
  std::vector<double> signed_ratios() const;
  std::vector<double> ratios() const;
};

SampleVector sample(const HeightLaw& law, StreamRng& rng);

/// Signed ratio y_{i+1} - y_i given the m-1 interior ordinates.
inline double signed_ratio(std::span<const double> y, std::size_t i) noexcept {
  const double lo = i == 0 ? 0.0 : y[i - 1];
  const double hi = i == y.size() ? 1.0 : y[i];
  return hi - lo;
}

enum class Provenance { ClosedForm, MonteCarlo };

const char* to_string(Provenance p) noexcept;

struct MomentConfig {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 0x243f6a8885a308d3ULL;
  /// Skip closed forms even where available (used to cross-check them).
  bool force_monte_carlo = false;
};

/// Moments of the ratios a_0..a_{m-1}. Standard errors are zero for closed
/// forms. mean_log_a entries may be -infinity (atom of a_i at zero).
struct RatioMoments {
  std::size_t m = 0;
  Provenance provenance = Provenance::ClosedForm;
  std::size_t samples = 0;

  std::vector<double> mean_a;
  std::vector<double> mean_log_a;
  std::vector<double> mean_a_sq;
  std::vector<double> se_a;
  std::vector<double> se_log_a;
  std::vector<double> se_a_sq;
  /// E(a_i a_j), m x m row-major; the diagonal equals mean_a_sq.
  std::vector<double> cross;
  std::vector<double> se_cross;
  /// Covariance matrix of the estimator of mean_log_a (zero for closed forms
  /// and for rows with an atom at zero).
  std::vector<double> log_cov;

  double cross_at(std::size_t i, std::size_t j) const { return cross.at(i * m + j); }
  double log_cov_at(std::size_t i, std::size_t j) const {
    return log_cov.at(i * m + j);
  }
  bool has_zero_atom() const;
  bool complete() const noexcept;

  static RatioMoments zeros(std::size_t m, Provenance p);
};

/// Closed forms for the deterministic family, integer-shape Beta families
/// (IidUniform is Beta(1,1)) and integer-shape MirroredBeta; Monte Carlo
/// otherwise. Throws ConfigError when Monte Carlo is needed and fewer than
/// 1000 samples are configured; ContractError if the law's m differs from
/// the partition's.
RatioMoments moments(const HeightLaw& law, const Partition& p,
                     const MomentConfig& config = {});

RatioMoments monte_carlo_moments(const HeightLaw& law,
                                 const MomentConfig& config);

/// True when moments() would use a closed form for this law.
bool has_closed_form(const HeightLaw& law);

struct ValidationReport {
  bool accepted = true;
  std::vector<std::string> rejections;
  std::vector<std::string> flags;
  /// P(a_i = 0) > 0 for some i: phi = -infinity.
  bool degenerate_height = false;
  bool trivial_regime = false;
  /// The verdict rests on an empirical spot check (custom samplers).
  bool heuristic = false;
};

ValidationReport validate(const HeightLaw& law, const Partition& p);

/// Throws ContractError listing the rejections if validate() rejects.
void require_valid(const HeightLaw& law, const Partition& p);

}  // namespace boxlike
