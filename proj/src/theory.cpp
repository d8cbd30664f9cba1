#include "boxlike/theory.hpp"

#include <boost/math/distributions/normal.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "boxlike/error.hpp"

namespace boxlike {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Rounding slack when checking the bracket of exactly-monotone laws
// (sum E a_i = 1 in exact arithmetic).
constexpr double kBracketSlack = 1e-12;

}  // namespace

const char* to_string(DiffClass c) noexcept {
  switch (c) {
    case DiffClass::DifferentiableAlmostEverywhere:
      return "differentiable-a.e.";
    case DiffClass::NonDifferentiableAlmostEverywhere:
      return "non-differentiable-a.e.";
    case DiffClass::InconclusiveStatistical:
      return "inconclusive-statistical";
  }
  return "unknown";
}

std::string DiffReport::verdict_confidence() const {
  if (exact) return "exact";
  std::ostringstream os;
  os << "statistical(" << level << ")";
  return os.str();
}

double normal_quantile_two_sided(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
}

DiffReport compute_phi(const RatioMoments& moments, const Partition& p,
                       const StatConfig& stats) {
  if (!moments.complete() || moments.m != p.m()) {
    throw ContractError("compute_phi needs complete moments for m = " + std::to_string(p.m()));
  }
  DiffReport r;
  r.exact = moments.provenance == Provenance::ClosedForm;
  r.level = stats.level;
  const std::size_t m = p.m();
  if (moments.has_zero_atom()) {
    r.phi = kNegInf;
    r.classification = DiffClass::DifferentiableAlmostEverywhere;
    return r;
  }
  double phi = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    phi += p.length(i) * (moments.mean_log_a[i] - p.log_length(i));
  }
  r.phi = phi;
  if (!r.exact) {
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        var += p.length(i) * p.length(j) * moments.log_cov_at(i, j);
    r.std_error = std::sqrt(std::max(0.0, var));
    const double z = normal_quantile_two_sided(stats.level);
    r.ci = Interval{phi - z * r.std_error, phi + z * r.std_error};
    if (r.ci->lo < 0.0 && r.ci->hi >= 0.0 && r.std_error > 0.0) {
      r.classification = DiffClass::InconclusiveStatistical;
      return r;
    }
  }
  r.classification = phi < 0.0 ? DiffClass::DifferentiableAlmostEverywhere
                                : DiffClass::NonDifferentiableAlmostEverywhere;
  return r;
}

double dimension_gap(std::span<const double> mean_a, const Partition& p, double s) {
  double g = -1.0;
  for (std::size_t i = 0; i < p.m(); ++i) {
    g += mean_a[i] * std::exp((s - 1.0) * p.log_length(i));
  }
  return g;
}

DimensionReport solve_dimension(std::span<const double> mean_a, const Partition& p,
                                const SolverConfig& config) {
  if (mean_a.size() != p.m()) {
    throw ContractError("solve_dimension needs one mean ratio per interval");
  }
  bool any_positive = false;
  for (double v : mean_a) any_positive |= v > 0.0;
  if (!any_positive) throw ContractError("all mean ratios vanish; the dimension equation has no root");

  DimensionReport r;
  const double g1 = dimension_gap(mean_a, p, 1.0);
  const double g2 = dimension_gap(mean_a, p, 2.0);
  if (g1 < -kBracketSlack || g2 > kBracketSlack) {
    std::ostringstream os;
    os << "dimension equation not bracketed on [1, 2]: g(1) = " << g1
       << " (needs >= 0, i.e. sum E a_i >= 1), g(2) = " << g2
       << " (needs <= 0, i.e. sum E a_i l_i <= 1)";
    throw SolverError(os.str());
  }
  if (g1 <= 0.0) {
    r.s = 1.0;
    r.residual = std::abs(g1);
    return r;
  }
  if (g2 >= 0.0) {
    r.s = 2.0;
    r.residual = std::abs(g2);
    return r;
  }
  // g is strictly decreasing because every l_i < 1.
  double lo = 1.0, hi = 2.0;
  double mid = 1.5, gm = 0.0;
  while (r.iterations < config.max_iterations) {
    ++r.iterations;
    mid = 0.5 * (lo + hi);
    gm = dimension_gap(mean_a, p, mid);
    if (gm == 0.0) break;
    (gm > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
  }
  r.s = mid;
  r.residual = std::abs(gm);
  r.bracket = Interval{lo, hi};
  if (r.residual >= config.tol) {
    r.warnings.push_back("residual above tolerance after bisection");
  }
  return r;
}

DimensionReport solve_dimension(const RatioMoments& moments, const Partition& p,
                                const SolverConfig& config) {
  if (moments.mean_a.size() != p.m()) {
    throw ContractError("solve_dimension needs mean_a for all m = " + std::to_string(p.m()));
  }
  return solve_dimension(std::span<const double>(moments.mean_a), p, config);
}

SensitivityResult dimension_sensitivity(const RatioMoments& moments, const Partition& p,
                                        double k, const SolverConfig& config) {
  const double s = solve_dimension(moments, p, config).s;
  SensitivityResult out;
  out.interval = Interval{s, s};
  std::vector<double> shifted(p.m());
  for (int sign : {-1, 1}) {
    for (std::size_t i = 0; i < p.m(); ++i) {
      shifted[i] = std::clamp(moments.mean_a[i] + sign * k * moments.se_a[i], 0.0, 1.0);
    }
    try {
      const double v = solve_dimension(std::span<const double>(shifted), p, config).s;
      (sign < 0 ? out.interval.lo : out.interval.hi) = v;
    } catch (const Error&) {
      if (sign < 0) {
        out.interval.lo = 1.0;
        out.lower_open = true;
        out.warnings.push_back("lower end unbracketed (sum E a_i - k se < 1); interval is one-sided");
      } else {
        out.interval.hi = 2.0;
        out.upper_open = true;
        out.warnings.push_back("upper end unbracketed; interval is one-sided");
      }
    }
  }
  return out;
}

double second_moment_rate(const RatioMoments& moments, const Partition& p, double s) {
  double alpha = 0.0;
  for (std::size_t i = 0; i < p.m(); ++i) {
    alpha += moments.mean_a_sq[i] * std::exp(2.0 * (s - 1.0) * p.log_length(i));
  }
  return alpha;
}

double squared_sum_moment(const RatioMoments& moments, const Partition& p, double s) {
  double c = 0.0;
  for (std::size_t i = 0; i < p.m(); ++i)
    for (std::size_t j = 0; j < p.m(); ++j)
      c += moments.cross_at(i, j) * std::exp((s - 1.0) * (p.log_length(i) + p.log_length(j)));
  return c;
}

double cross_ratio_constant(const RatioMoments& moments) {
  double best = 0.0;
  for (std::size_t i = 0; i < moments.m; ++i)
    for (std::size_t j = 0; j < moments.m; ++j) {
      const double denom = moments.mean_a[i] * moments.mean_a[j];
      if (denom > 0.0) best = std::max(best, moments.cross_at(i, j) / denom);
    }
  return best;
}

}  // namespace boxlike
