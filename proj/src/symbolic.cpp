#include "boxlike/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boxlike/error.hpp"

namespace boxlike {

Partition::Partition(std::vector<double> breakpoints)
    : breaks_(std::move(breakpoints)) {
  if (breaks_.size() < 3) {
    throw DomainError("partition needs at least two intervals (m >= 2)");
  }
  if (breaks_.front() != 0.0 || breaks_.back() != 1.0) {
    throw DomainError("partition must start at 0 and end at 1");
  }
  lengths_.reserve(breaks_.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    const double l = breaks_[i + 1] - breaks_[i];
    if (!(l > 0.0)) {
      throw DomainError("partition breakpoints must increase strictly (b_" +
                        std::to_string(i) + " >= b_" + std::to_string(i + 1) +
                        ")");
    }
    lengths_.push_back(l);
    log_lengths_.push_back(std::log(l));
  }
  min_length_ = *std::min_element(lengths_.begin(), lengths_.end());
  max_length_ = *std::max_element(lengths_.begin(), lengths_.end());
}

Partition Partition::uniform(std::size_t m) {
  if (m < 2) throw DomainError("partition needs m >= 2");
  std::vector<double> b(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    b[i] = static_cast<double>(i) / static_cast<double>(m);
  }
  b.back() = 1.0;
  return Partition(std::move(b));
}

bool Partition::equal_lengths() const noexcept {
  return max_length_ - min_length_ <= 1e-12 * max_length_;
}

Word Word::prefix(std::size_t k) const {
  if (k > digits.size()) {
    throw DomainError("restriction to " + std::to_string(k) +
                      " digits of a word of length " +
                      std::to_string(digits.size()));
  }
  return Word(std::vector<std::uint32_t>(digits.begin(),
                                         digits.begin() + static_cast<long>(k)));
}

Word Word::child(std::uint32_t digit) const {
  Word w = *this;
  w.digits.push_back(digit);
  return w;
}

void check_digits(const Word& w, std::size_t m) {
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] >= m) {
      throw DomainError("digit " + std::to_string(w[k]) + " at position " +
                        std::to_string(k) + " is outside [0, " +
                        std::to_string(m - 1) + "]");
    }
  }
}

double word_base(const Word& w, const Partition& p) {
  check_digits(w, p.m());
  double base = 0.0;
  double width = 1.0;
  for (auto d : w.digits) {
    base += p.breakpoint(d) * width;
    width *= p.length(d);
  }
  return base;
}

double word_log_length(const Word& w, const Partition& p) {
  check_digits(w, p.m());
  double s = 0.0;
  for (auto d : w.digits) s += p.log_length(d);
  return s;
}

double word_length(const Word& w, const Partition& p) {
  check_digits(w, p.m());
  if (w.size() > 64) return std::exp(word_log_length(w, p));
  double prod = 1.0;
  for (auto d : w.digits) prod *= p.length(d);
  return prod;
}

std::optional<Word> successor(const Word& w, std::size_t m) {
  check_digits(w, m);
  Word next = w;
  for (std::size_t k = next.size(); k-- > 0;) {
    if (next.digits[k] + 1 < m) {
      ++next.digits[k];
      return next;
    }
    next.digits[k] = 0;
  }
  return std::nullopt;
}

double successor_base(const Word& w, const Partition& p) {
  auto next = successor(w, p.m());
  return next ? word_base(*next, p) : 1.0;
}

std::size_t lex_index(const Word& w, std::size_t m) {
  check_digits(w, m);
  std::size_t index = 0;
  for (auto d : w.digits) index = index * m + d;
  return index;
}

Word word_at(std::size_t index, std::size_t length, std::size_t m) {
  std::vector<std::uint32_t> d(length);
  for (std::size_t k = length; k-- > 0;) {
    d[k] = static_cast<std::uint32_t>(index % m);
    index /= m;
  }
  if (index != 0) throw DomainError("word index out of range");
  return Word(std::move(d));
}

Coding::Coding(double x, const Partition& p) : p_(&p), x_(x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("point " + std::to_string(x) + " is outside [0, 1]");
  }
}

std::uint32_t Coding::next() {
  // Largest digit whose child base does not exceed x. The candidates are
  // evaluated with the same arithmetic as word_base, so x = b_omega codes
  // back to omega followed by zeros.
  std::uint32_t digit = 0;
  for (std::uint32_t i = static_cast<std::uint32_t>(p_->m()); i-- > 1;) {
    if (base_ + p_->breakpoint(i) * width_ <= x_) {
      digit = i;
      break;
    }
  }
  base_ += p_->breakpoint(digit) * width_;
  width_ *= p_->length(digit);
  ++depth_;
  return digit;
}

Word code_point(double x, const Partition& p, std::size_t n,
                std::size_t max_depth) {
  if (n > max_depth) {
    throw DomainError("coding depth " + std::to_string(n) +
                      " exceeds the configured maximum " +
                      std::to_string(max_depth));
  }
  Coding coding(x, p);
  std::vector<std::uint32_t> d(n);
  for (auto& digit : d) digit = coding.next();
  return Word(std::move(d));
}

}  // namespace boxlike
