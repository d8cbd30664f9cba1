#include "boxlike/heightlaw.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "boxlike/error.hpp"
#include "parallel.hpp"
#include "polynomial.hpp"

namespace boxlike {

namespace {

using detail::Polynomial;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Ratios below this are treated as exact zeros by the log-moment guard.
constexpr double kZeroRatio = 1e-300;
constexpr std::uint64_t kMomentDomain = 0x6d6f6d656e7473ULL;
constexpr std::uint64_t kValidateDomain = 0x76616c6964617465ULL;
constexpr std::size_t kSpotCheckDraws = 10'000;
constexpr std::size_t kMinMonteCarloSamples = 1000;

bool is_small_integer(double v) {
  return v >= 1.0 && v <= 32.0 && std::floor(v) == v;
}

bool integer_shapes(double a, double b) {
  return is_small_integer(a) && is_small_integer(b) && a + b <= 24.0;
}

double draw_beta(StreamRng& rng, double a, double b) {
  if (a == 1.0 && b == 1.0) return uniform_open01(rng);
  if (b == 1.0) {
    const double u = uniform_open01(rng);
    return a == 2.0 ? std::sqrt(u) : std::pow(u, 1.0 / a);
  }
  if (a == 1.0) return 1.0 - std::pow(uniform_open01(rng), 1.0 / b);
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

// Beta(a, b) density as a polynomial; a, b positive integers.
Polynomial beta_density(double a, double b) {
  const auto ia = static_cast<int>(a);
  const auto ib = static_cast<int>(b);
  Polynomial p = Polynomial::constant(
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)));
  for (int k = 1; k < ia; ++k) p = p * Polynomial::identity();
  const Polynomial one_minus_x({1.0, -1.0});
  for (int k = 1; k < ib; ++k) p = p * one_minus_x;
  return p;
}

void set_symmetric(RatioMoments& r, std::size_t i, std::size_t j, double v) {
  r.cross[i * r.m + j] = v;
  r.cross[j * r.m + i] = v;
}

RatioMoments deterministic_moments(const DeterministicHeights& d) {
  const std::size_t m = d.y.size() + 1;
  auto r = RatioMoments::zeros(m, Provenance::ClosedForm);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = std::abs(signed_ratio(d.y, i));
    r.mean_a[i] = a;
    r.mean_a_sq[i] = a * a;
    r.mean_log_a[i] = a < kZeroRatio ? kNegInf : std::log(a);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      r.cross[i * m + j] = r.mean_a[i] * r.mean_a[j];
  return r;
}

// y_1..y_{m-1} iid Beta(a, b), integer shapes.
RatioMoments iid_beta_moments(std::size_t m, double a, double b) {
  auto r = RatioMoments::zeros(m, Provenance::ClosedForm);
  const Polynomial x = Polynomial::identity();
  const Polynomial one({1.0});
  const Polynomial p = beta_density(a, b);
  const Polynomial p_reflected = p.compose_affine(1.0, -1.0);  // law of 1 - Y

  const double mean_y = (p * x).integrate(0, 1);

  // |Y - Y'| has density q(t) = 2 sum_j t^j / j! R_j(1 - t), where
  // R_j(z) = int_0^z p p^(j) (Taylor expansion of p(x + t) in t).
  Polynomial q;
  {
    Polynomial deriv = p;
    double factorial = 1.0;
    Polynomial t_pow = one;
    for (std::size_t j = 0; j <= p.degree(); ++j) {
      if (j > 0) {
        deriv = deriv.derivative();
        factorial *= static_cast<double>(j);
        t_pow = t_pow * x;
      }
      const Polynomial R = (p * deriv).antiderivative();
      q = q + t_pow * R.compose_affine(1.0, -1.0) * (2.0 / factorial);
    }
  }

  // g(y) = E|Y' - y|.
  const Polynomial P1 = p.antiderivative();
  const Polynomial P2 = (x * p).antiderivative();
  const Polynomial g = 2.0 * x * P1 - 2.0 * P2 + Polynomial::constant(mean_y) - x;

  for (std::size_t i = 0; i < m; ++i) {
    const Polynomial& density = i == 0 ? p : (i == m - 1 ? p_reflected : q);
    r.mean_a[i] = (density * x).integrate(0, 1);
    r.mean_a_sq[i] = (density * x * x).integrate(0, 1);
    r.mean_log_a[i] = density.log_moment();
  }
  for (std::size_t i = 0; i < m; ++i) {
    set_symmetric(r, i, i, r.mean_a_sq[i]);
    for (std::size_t j = i + 2; j < m; ++j)
      set_symmetric(r, i, j, r.mean_a[i] * r.mean_a[j]);
    if (i + 1 >= m) continue;
    // Adjacent ratios share the ordinate y_{i+1}.
    double v;
    if (m == 2) {
      v = (p * x * (one - x)).integrate(0, 1);
    } else if (i == 0) {
      v = (p * x * g).integrate(0, 1);
    } else if (i + 1 == m - 1) {
      v = (p * (one - x) * g).integrate(0, 1);
    } else {
      v = (p * g * g).integrate(0, 1);
    }
    set_symmetric(r, i, i + 1, v);
  }
  return r;
}

// m = 3, y_1 = Y ~ Beta(a, b), y_2 = 1 - Y: a_0 = a_2 = Y, a_1 = |1 - 2Y|.
RatioMoments mirrored_beta_moments(double a, double b) {
  auto r = RatioMoments::zeros(3, Provenance::ClosedForm);
  const Polynomial x = Polynomial::identity();
  const Polynomial p = beta_density(a, b);
  const Polynomial lo({1.0, -2.0});  // 1 - 2x on [0, 1/2]
  const Polynomial hi({-1.0, 2.0});  // 2x - 1 on [1/2, 1]

  const double ey = (p * x).integrate(0, 1);
  const double ey2 = (p * x * x).integrate(0, 1);
  const double elog_y = p.log_moment();
  const double e_mid = (p * lo).integrate(0, 0.5) + (p * hi).integrate(0.5, 1);
  const double e_mid_sq = (p * lo * lo).integrate(0, 1);
  // u = |1 - 2y| maps each half of [0,1] onto [0,1] with Jacobian 1/2.
  const double elog_mid =
      0.5 * (p.compose_affine(0.5, -0.5) + p.compose_affine(0.5, 0.5)).log_moment();
  const double e_y_mid =
      (p * x * lo).integrate(0, 0.5) + (p * x * hi).integrate(0.5, 1);

  r.mean_a = {ey, e_mid, ey};
  r.mean_a_sq = {ey2, e_mid_sq, ey2};
  r.mean_log_a = {elog_y, elog_mid, elog_y};
  for (std::size_t i = 0; i < 3; ++i) set_symmetric(r, i, i, r.mean_a_sq[i]);
  set_symmetric(r, 0, 2, ey2);
  set_symmetric(r, 0, 1, e_y_mid);
  set_symmetric(r, 1, 2, e_y_mid);
  return r;
}

struct MomentSums {
  std::size_t n = 0;
  std::vector<double> a, a2, a4, log, cross, cross2, logprod;
  std::vector<char> zero;

  explicit MomentSums(std::size_t m)
      : a(m), a2(m), a4(m), log(m), cross(m * m), cross2(m * m),
        logprod(m * m), zero(m, 0) {}

  void add(const MomentSums& o) {
    n += o.n;
    auto acc = [](std::vector<double>& x, const std::vector<double>& y) {
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += y[k];
    };
    acc(a, o.a);
    acc(a2, o.a2);
    acc(a4, o.a4);
    acc(log, o.log);
    acc(cross, o.cross);
    acc(cross2, o.cross2);
    acc(logprod, o.logprod);
    for (std::size_t k = 0; k < zero.size(); ++k) zero[k] |= o.zero[k];
  }
};

double standard_error(double sum, double sum_sq, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, sum_sq / nn - mean * mean) * nn / (nn - 1.0);
  return std::sqrt(var / nn);
}

}  // namespace

HeightLaw HeightLaw::deterministic(std::vector<double> y) {
  if (y.empty()) throw DomainError("deterministic law needs m - 1 >= 1 ordinates");
  const std::size_t m = y.size() + 1;
  return HeightLaw(m, DeterministicHeights{std::move(y)});
}

HeightLaw HeightLaw::iid_uniform(std::size_t m) {
  if (m < 2) throw DomainError("height law needs m >= 2");
  return HeightLaw(m, IidUniform{});
}

HeightLaw HeightLaw::iid_beta(std::size_t m, double alpha, double beta) {
  if (m < 2) throw DomainError("height law needs m >= 2");
  return HeightLaw(m, IidBeta{alpha, beta});
}

HeightLaw HeightLaw::mirrored_beta(double alpha, double beta) {
  return HeightLaw(3, MirroredBeta{alpha, beta});
}

HeightLaw HeightLaw::custom(std::size_t m, CustomSampler sampler) {
  if (m < 2) throw DomainError("height law needs m >= 2");
  if (!sampler.draw) throw DomainError("custom sampler has no draw function");
  return HeightLaw(m, std::move(sampler));
}

HeightLaw HeightLaw::okamoto(double alpha) {
  return deterministic({alpha, 1.0 - alpha});
}

std::string HeightLaw::family_name() const {
  struct Visitor {
    std::string operator()(const DeterministicHeights&) const { return "deterministic"; }
    std::string operator()(const IidUniform&) const { return "iid-uniform"; }
    std::string operator()(const IidBeta&) const { return "iid-beta"; }
    std::string operator()(const MirroredBeta&) const { return "mirrored-beta"; }
    std::string operator()(const CustomSampler& c) const { return "custom:" + c.name; }
  };
  return std::visit(Visitor{}, family_);
}

void HeightLaw::draw(StreamRng& rng, std::span<double> y) const {
  if (y.size() != m_ - 1) throw ContractError("ordinate buffer has wrong size");
  switch (family_.index()) {
    case 0: {
      const auto& d = std::get<DeterministicHeights>(family_);
      std::copy(d.y.begin(), d.y.end(), y.begin());
      return;
    }
    case 1:
      for (auto& v : y) v = uniform_open01(rng);
      return;
    case 2: {
      const auto& b = std::get<IidBeta>(family_);
      for (auto& v : y) v = draw_beta(rng, b.alpha, b.beta);
      return;
    }
    case 3: {
      const auto& b = std::get<MirroredBeta>(family_);
      y[0] = draw_beta(rng, b.alpha, b.beta);
      y[1] = 1.0 - y[0];
      return;
    }
    default: {
      const auto& c = std::get<CustomSampler>(family_);
      c.draw(rng, y);
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
          throw ContractError("custom sampler '" + c.name + "' returned y_" +
                              std::to_string(i + 1) + " = " +
                              std::to_string(y[i]) + " outside [0, 1]");
        }
      }
      return;
    }
  }
}

std::vector<double> SampleVector::signed_ratios() const {
  std::vector<double> r(m());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = signed_ratio(y, i);
  return r;
}

std::vector<double> SampleVector::ratios() const {
  auto r = signed_ratios();
  for (auto& v : r) v = std::abs(v);
  return r;
}

SampleVector sample(const HeightLaw& law, StreamRng& rng) {
  SampleVector s{std::vector<double>(law.m() - 1)};
  law.draw(rng, s.y);
  return s;
}

const char* to_string(Provenance p) noexcept {
  return p == Provenance::ClosedForm ? "closed-form" : "monte-carlo";
}

RatioMoments RatioMoments::zeros(std::size_t m, Provenance p) {
  RatioMoments r;
  r.m = m;
  r.provenance = p;
  r.mean_a.assign(m, 0.0);
  r.mean_log_a.assign(m, 0.0);
  r.mean_a_sq.assign(m, 0.0);
  r.se_a.assign(m, 0.0);
  r.se_log_a.assign(m, 0.0);
  r.se_a_sq.assign(m, 0.0);
  r.cross.assign(m * m, 0.0);
  r.se_cross.assign(m * m, 0.0);
  r.log_cov.assign(m * m, 0.0);
  return r;
}

bool RatioMoments::has_zero_atom() const {
  for (double v : mean_log_a)
    if (v == kNegInf) return true;
  return false;
}

bool RatioMoments::complete() const noexcept {
  return m >= 2 && mean_a.size() == m && mean_log_a.size() == m &&
         mean_a_sq.size() == m && se_a.size() == m && se_log_a.size() == m &&
         cross.size() == m * m && log_cov.size() == m * m;
}

bool has_closed_form(const HeightLaw& law) {
  const auto& f = law.family();
  if (std::holds_alternative<DeterministicHeights>(f)) return true;
  if (std::holds_alternative<IidUniform>(f)) return true;
  if (const auto* b = std::get_if<IidBeta>(&f)) return integer_shapes(b->alpha, b->beta);
  if (const auto* b = std::get_if<MirroredBeta>(&f)) return integer_shapes(b->alpha, b->beta);
  return false;
}

RatioMoments monte_carlo_moments(const HeightLaw& law, const MomentConfig& config) {
  if (config.samples < kMinMonteCarloSamples) {
    throw ConfigError("Monte Carlo moments need at least " +
                      std::to_string(kMinMonteCarloSamples) + " samples, got " +
                      std::to_string(config.samples));
  }
  const std::size_t m = law.m();
  constexpr std::size_t kChunk = 1 << 15;
  const std::size_t chunks = (config.samples + kChunk - 1) / kChunk;
  std::vector<MomentSums> partial(chunks, MomentSums(m));

  detail::parallel_for(chunks, [&](std::size_t c) {
    MomentSums& s = partial[c];
    std::vector<double> y(m - 1), a(m), la(m);
    const std::size_t end = std::min(config.samples, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) {
      StreamRng rng(substream_key(config.seed, kMomentDomain, k));
      law.draw(rng, y);
      for (std::size_t i = 0; i < m; ++i) {
        a[i] = std::abs(signed_ratio(y, i));
        if (a[i] < kZeroRatio) {
          s.zero[i] = 1;
          la[i] = 0.0;
        } else {
          la[i] = std::log(a[i]);
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        const double a2 = a[i] * a[i];
        s.a[i] += a[i];
        s.a2[i] += a2;
        s.a4[i] += a2 * a2;
        s.log[i] += la[i];
        for (std::size_t j = 0; j < m; ++j) {
          const double prod = a[i] * a[j];
          s.cross[i * m + j] += prod;
          s.cross2[i * m + j] += prod * prod;
          s.logprod[i * m + j] += la[i] * la[j];
        }
      }
      ++s.n;
    }
  });

  MomentSums total(m);
  for (const auto& s : partial) total.add(s);

  auto r = RatioMoments::zeros(m, Provenance::MonteCarlo);
  r.samples = total.n;
  const double n = static_cast<double>(total.n);
  for (std::size_t i = 0; i < m; ++i) {
    r.mean_a[i] = total.a[i] / n;
    r.se_a[i] = standard_error(total.a[i], total.a2[i], total.n);
    r.mean_a_sq[i] = total.a2[i] / n;
    r.se_a_sq[i] = standard_error(total.a2[i], total.a4[i], total.n);
    if (total.zero[i]) {
      r.mean_log_a[i] = kNegInf;
    } else {
      r.mean_log_a[i] = total.log[i] / n;
      r.se_log_a[i] = standard_error(total.log[i], total.logprod[i * m + i], total.n);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t ij = i * m + j;
      r.cross[ij] = total.cross[ij] / n;
      r.se_cross[ij] = standard_error(total.cross[ij], total.cross2[ij], total.n);
      if (!total.zero[i] && !total.zero[j]) {
        const double cov = (total.logprod[ij] / n - r.mean_log_a[i] * r.mean_log_a[j]) *
                           n / (n - 1.0);
        r.log_cov[ij] = cov / n;
      }
    }
  }
  return r;
}

RatioMoments moments(const HeightLaw& law, const Partition& p,
                     const MomentConfig& config) {
  if (law.m() != p.m()) {
    throw ContractError("height law has m = " + std::to_string(law.m()) +
                        " but the partition has m = " + std::to_string(p.m()));
  }
  if (config.force_monte_carlo || !has_closed_form(law)) {
    return monte_carlo_moments(law, config);
  }
  const auto& f = law.family();
  if (const auto* d = std::get_if<DeterministicHeights>(&f)) return deterministic_moments(*d);
  if (std::holds_alternative<IidUniform>(f)) return iid_beta_moments(law.m(), 1.0, 1.0);
  if (const auto* b = std::get_if<IidBeta>(&f)) return iid_beta_moments(law.m(), b->alpha, b->beta);
  const auto& b = std::get<MirroredBeta>(f);
  return mirrored_beta_moments(b.alpha, b.beta);
}

ValidationReport validate(const HeightLaw& law, const Partition& p) {
  ValidationReport rep;
  auto reject = [&](std::string why) {
    rep.accepted = false;
    rep.rejections.push_back(std::move(why));
  };
  if (law.m() != p.m()) {
    reject("height law has m = " + std::to_string(law.m()) +
           " but the partition has m = " + std::to_string(p.m()));
    return rep;
  }
  if (p.trivial_regime()) {
    rep.trivial_regime = true;
    rep.flags.push_back("trivial-regime: m = 2 yields a monotone function");
  }
  const std::size_t m = law.m();
  const auto& f = law.family();

  auto check_shapes = [&](double a, double b) {
    if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))) {
      reject("Beta shapes must be positive and finite");
    }
  };

  if (const auto* d = std::get_if<DeterministicHeights>(&f)) {
    bool diagonal = true;
    for (std::size_t i = 0; i < d->y.size(); ++i) {
      const double v = d->y[i];
      if (!(v > 0.0 && v < 1.0)) {
        reject("y_" + std::to_string(i + 1) + " = " + std::to_string(v) +
               " must lie strictly inside (0, 1)");
      }
      if (std::abs(v - p.breakpoint(i + 1)) > 1e-12) diagonal = false;
    }
    if (diagonal) {
      reject("heights equal the breakpoints: the identity function violates "
             "the non-diagonal assumption");
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (std::abs(signed_ratio(d->y, i)) < kZeroRatio) rep.degenerate_height = true;
    }
  } else if (const auto* b = std::get_if<IidBeta>(&f)) {
    check_shapes(b->alpha, b->beta);
  } else if (const auto* b = std::get_if<MirroredBeta>(&f)) {
    if (m != 3) reject("mirrored-beta is defined for m = 3 only");
    check_shapes(b->alpha, b->beta);
  } else if (const auto* c = std::get_if<CustomSampler>(&f)) {
    rep.heuristic = true;
    rep.flags.push_back("custom sampler assumptions spot-checked on " +
                        std::to_string(kSpotCheckDraws) + " draws (heuristic)");
    if (!c->assumptions_declared) {
      reject("custom sampler '" + c->name + "' declares that the model assumptions do not hold");
    }
    std::vector<double> y(m - 1);
    std::vector<std::size_t> on_diagonal(m, 0);
    bool boundary = false;
    try {
      for (std::size_t k = 0; k < kSpotCheckDraws; ++k) {
        StreamRng rng(substream_key(0, kValidateDomain, k));
        law.draw(rng, y);
        for (double v : y) boundary |= (v == 0.0 || v == 1.0);
        for (std::size_t i = 0; i < m; ++i) {
          const double t = signed_ratio(y, i);
          if (std::abs(t - p.length(i)) < 1e-12) ++on_diagonal[i];
          if (std::abs(t) < kZeroRatio) rep.degenerate_height = true;
        }
      }
    } catch (const ContractError& e) {
      reject(e.what());
      return rep;
    }
    if (boundary) reject("custom sampler produced heights at 0 or 1 (jump discontinuity)");
    for (std::size_t i = 0; i + 1 < m; ++i) {
      // The assumption is stated for i = 1..m-1 (pairs y_i, y_{i+1}).
      if (on_diagonal[i + 1] == kSpotCheckDraws) {
        reject("y_" + std::to_string(i + 2) + " - y_" + std::to_string(i + 1) +
               " equalled l_" + std::to_string(i + 1) + " on every draw");
      }
    }
  }
  if (rep.degenerate_height) {
    rep.flags.push_back("degenerate-height: P(a_i = 0) > 0 for some i, phi = -infinity");
  }
  return rep;
}

void require_valid(const HeightLaw& law, const Partition& p) {
  const auto rep = validate(law, p);
  if (rep.accepted) return;
  std::string msg = "height law rejected:";
  for (const auto& r : rep.rejections) msg += " " + r + ";";
  throw ContractError(msg);
}

}  // namespace boxlike
