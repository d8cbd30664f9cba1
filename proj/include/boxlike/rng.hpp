#pragma once

#include <cstdint>
#include <limits>

namespace boxlike {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: the n-th output depends only on (key, n), so any
/// node of a realization can be regenerated in isolation.
/// Satisfies UniformRandomBitGenerator.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr StreamRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    return splitmix64(key_ + 0x632be59bd9b4e019ULL * ++counter_);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform draw on the open interval (0, 1) with 53 bits of resolution.
inline double uniform_open01(StreamRng& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Node keys of the realization tree. The key of a word is a hash chain over
// its digits starting from the master seed; the node's height vector is drawn
// from StreamRng(key).
constexpr std::uint64_t root_key(std::uint64_t seed) noexcept {
  return splitmix64(seed ^ 0x5851f42d4c957f2dULL);
}

constexpr std::uint64_t child_key(std::uint64_t parent,
                                  std::uint32_t digit) noexcept {
  return splitmix64(parent ^ splitmix64(0xd1b54a32d192ed03ULL + digit));
}

/// Independent auxiliary stream derived from a seed and an index (Monte Carlo
/// sample i, probe path i, ...). `domain` separates unrelated uses of one seed.
constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t domain,
                                      std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed ^ splitmix64(domain)) + index);
}

}  // namespace boxlike
