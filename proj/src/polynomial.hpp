#pragma once

// Dense univariate polynomials with double coefficients, used for exact
// integer-shape Beta moments. Internal to the library.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace boxlike::detail {

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    trim();
  }
  static Polynomial constant(double v) { return Polynomial({v}); }
  static Polynomial identity() { return Polynomial({0.0, 1.0}); }

  std::size_t degree() const noexcept { return c_.empty() ? 0 : c_.size() - 1; }
  const std::vector<double>& coeffs() const noexcept { return c_; }
  double coeff(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0.0; }

  double operator()(double x) const noexcept {
    double v = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) v = v * x + c_[k];
    return v;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return a + b * -1.0;
  }
  friend Polynomial operator*(const Polynomial& a, double s) {
    std::vector<double> c = a.c_;
    for (auto& v : c) v *= s;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(double s, const Polynomial& a) { return a * s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> c(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) c[k - 1] = c_[k] * static_cast<double>(k);
    return Polynomial(std::move(c));
  }

  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const {
    std::vector<double> c(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) c[k + 1] = c_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(c));
  }

  double integrate(double lo, double hi) const {
    const Polynomial P = antiderivative();
    return P(hi) - P(lo);
  }

  /// p(a + b t) as a polynomial in t.
  Polynomial compose_affine(double a, double b) const {
    Polynomial result;
    const Polynomial inner({a, b});
    for (std::size_t k = c_.size(); k-- > 0;) {
      result = result * inner + constant(c_[k]);
    }
    return result;
  }

  /// integral_0^1 p(t) log t dt.
  double log_moment() const noexcept {
    double v = 0.0;
    for (std::size_t k = 0; k < c_.size(); ++k) {
      const double d = static_cast<double>(k + 1);
      v -= c_[k] / (d * d);
    }
    return v;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  std::vector<double> c_;
};

}  // namespace boxlike::detail
