#pragma once

// Word arithmetic over the alphabet {0, ..., m-1} and the deterministic
// x-axis partition 0 = b_0 < b_1 < ... < b_m = 1.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace boxlike {

inline constexpr std::size_t kDefaultMaxDepth = 32;

class Partition {
 public:
  /// Throws DomainError unless breakpoints start at 0, end at 1, increase
  /// strictly and describe at least two intervals.
  explicit Partition(std::vector<double> breakpoints);

  /// b_i = i/m.
  static Partition uniform(std::size_t m);

  std::size_t m() const noexcept { return lengths_.size(); }
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<double>& lengths() const noexcept { return lengths_; }
  double breakpoint(std::size_t i) const { return breaks_.at(i); }
  double length(std::size_t i) const { return lengths_.at(i); }
  double log_length(std::size_t i) const { return log_lengths_.at(i); }

  /// delta = min_i l_i, the base of the stopping-set scales.
  double min_length() const noexcept { return min_length_; }
  double max_length() const noexcept { return max_length_; }

  /// m = 2 is admissible, but the construction is then a monotone
  /// distribution function and both questions are trivial.
  bool trivial_regime() const noexcept { return m() == 2; }

  bool equal_lengths() const noexcept;

 private:
  std::vector<double> breaks_;
  std::vector<double> lengths_;
  std::vector<double> log_lengths_;
  double min_length_ = 0.0;
  double max_length_ = 0.0;
};

/// A finite word; digits are stored unpacked so m is not limited by the
/// width of a machine integer.
struct Word {
  std::vector<std::uint32_t> digits;

  Word() = default;
  explicit Word(std::vector<std::uint32_t> d) : digits(std::move(d)) {}
  Word(std::initializer_list<std::uint32_t> d) : digits(d) {}

  std::size_t size() const noexcept { return digits.size(); }
  bool empty() const noexcept { return digits.empty(); }
  std::uint32_t operator[](std::size_t k) const { return digits[k]; }

  /// omega|_k; throws DomainError when k > |omega|.
  Word prefix(std::size_t k) const;
  Word child(std::uint32_t digit) const;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

/// Throws DomainError if any digit is >= m.
void check_digits(const Word& w, std::size_t m);

/// b_omega = sum_k b_{omega_k} prod_{i<k} l_{omega_i}; the empty word maps to 0.
double word_base(const Word& w, const Partition& p);

/// l_omega = prod_i l_{omega_i}; the empty word has length 1. Words longer
/// than 64 digits are multiplied in log space.
double word_length(const Word& w, const Partition& p);

/// sum_i log l_{omega_i}.
double word_log_length(const Word& w, const Partition& p);

/// The next word of equal length in lexicographic order, or nullopt for the
/// maximal word (m-1, ..., m-1), whose successor is the "top" sentinel.
std::optional<Word> successor(const Word& w, std::size_t m);

/// b_{omega'}: the base of the successor, or 1 for the maximal word.
double successor_base(const Word& w, const Partition& p);

/// Position of w among the m^|w| words of its length, in lexicographic order.
std::size_t lex_index(const Word& w, std::size_t m);
Word word_at(std::size_t index, std::size_t length, std::size_t m);

/// Lazily yields the digits of the coding of x: the partial bases b_{omega|n}
/// increase to x. Points with two codings take the one ending in zeros; x = 1
/// yields m-1 forever.
class Coding {
 public:
  /// Throws DomainError unless 0 <= x <= 1.
  Coding(double x, const Partition& p);

  std::uint32_t next();

  double base() const noexcept { return base_; }
  double width() const noexcept { return width_; }
  std::size_t depth() const noexcept { return depth_; }

 private:
  const Partition* p_;
  double x_;
  double base_ = 0.0;
  double width_ = 1.0;
  std::size_t depth_ = 0;
};

/// omega(x)|_n. Throws DomainError for x outside [0,1] or n > max_depth.
Word code_point(double x, const Partition& p, std::size_t n,
                std::size_t max_depth = kDefaultMaxDepth);

}  // namespace boxlike
