#include "boxlike/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

#include "boxlike/error.hpp"
#include "boxlike/realization.hpp"
#include "boxlike/rng.hpp"
#include "parallel.hpp"

namespace boxlike {

namespace {

constexpr std::uint64_t kDigitDomain = 0x64696769;  // "digi"

class PathFollower {
 public:
  PathFollower(const HeightLaw& law, const Partition& p, std::uint64_t seed)
      : law_(law), p_(p), key_(root_key(seed)), y_(p.m() - 1), counts_(p.m(), 0) {}

  void step(std::uint32_t digit) {
    node_heights(law_, key_, y_);
    const double a = std::abs(signed_ratio(y_, digit));
    const double prev = sum_;
    sum_ += (a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity()) - p_.log_length(digit);
    if (++steps_ > 1 && std::isfinite(sum_) && ((prev > 0.0) != (sum_ > 0.0))) ++sign_changes_;
    ++counts_[digit];
    key_ = child_key(key_, digit);
  }

  DriftPath result() const {
    DriftPath r;
    r.sum = sum_;
    r.slope = steps_ ? sum_ / static_cast<double>(steps_) : 0.0;
    r.sign_changes = sign_changes_;
    r.frequencies.resize(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      r.frequencies[i] = steps_ ? static_cast<double>(counts_[i]) / static_cast<double>(steps_) : 0.0;
    }
    return r;
  }

 private:
  const HeightLaw& law_;
  const Partition& p_;
  std::uint64_t key_;
  std::vector<double> y_;
  std::vector<std::size_t> counts_;
  double sum_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t sign_changes_ = 0;
};

std::pair<double, double> mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  if (v.size() < 2 || !std::isfinite(mean)) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

DriftPath drift_along(const HeightLaw& law, const Partition& p, std::uint64_t seed,
                      const Word& digits) {
  if (law.m() != p.m()) throw ContractError("height law and partition disagree on m");
  check_digits(digits, p.m());
  PathFollower f(law, p, seed);
  for (std::uint32_t d : digits.digits) f.step(d);
  return f.result();
}

DriftReport drift_probe(const HeightLaw& law, const Partition& p, double phi,
                        const DriftConfig& config) {
  require_valid(law, p);
  if (config.paths == 0 || config.steps == 0) throw ContractError("drift probe needs paths and steps");
  const std::size_t m = p.m();

  DriftReport out;
  out.phi = phi;
  out.paths = config.paths;
  out.steps = config.steps;
  out.samples.resize(config.paths);
  detail::parallel_for(config.paths, [&](std::size_t k) {
    StreamRng digits(substream_key(config.seed, kDigitDomain, k));
    PathFollower f(law, p, config.seed);
    for (std::size_t n = 0; n < config.steps; ++n) {
      const double u = uniform_open01(digits);
      std::uint32_t d = 0;
      while (d + 1 < m && u >= p.breakpoint(d + 1)) ++d;
      f.step(d);
    }
    out.samples[k] = f.result();
  });

  std::vector<double> slopes(config.paths);
  for (std::size_t k = 0; k < config.paths; ++k) {
    slopes[k] = out.samples[k].slope;
    out.sign_changes += out.samples[k].sign_changes;
  }
  std::tie(out.mean_slope, out.se_slope) = mean_se(slopes);
  out.slope_ok = std::isfinite(phi) ? std::abs(out.mean_slope - phi) <= config.band * out.se_slope + 1e-12
                                    : out.mean_slope == phi;

  out.frequencies_ok = true;
  out.mean_frequency.resize(m);
  out.se_frequency.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> f(config.paths);
    for (std::size_t k = 0; k < config.paths; ++k) f[k] = out.samples[k].frequencies[i];
    std::tie(out.mean_frequency[i], out.se_frequency[i]) = mean_se(f);
    if (std::abs(out.mean_frequency[i] - p.length(i)) > config.band * out.se_frequency[i] + 1e-12) {
      out.frequencies_ok = false;
    }
  }
  return out;
}

}  // namespace boxlike
