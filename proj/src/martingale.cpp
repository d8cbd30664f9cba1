#include "boxlike/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "boxlike/error.hpp"
#include "boxlike/rng.hpp"
#include "boxlike/theory.hpp"
#include "parallel.hpp"

namespace boxlike {

namespace {

constexpr std::uint64_t kTreeDomain = 0x74726565;  // "tree"
constexpr double kExactSlack = 1e-12;

// l_i^{s-1}, so that t_{omega i} = t_omega * a_{omega i} * l_i^{s-1}.
std::vector<double> weight_factors(const Partition& p, double s) {
  std::vector<double> c(p.m());
  for (std::size_t i = 0; i < p.m(); ++i) c[i] = std::pow(p.length(i), s - 1.0);
  return c;
}

MartingaleTrace empty_trace(double s, std::size_t n_max, std::optional<double> alpha) {
  MartingaleTrace t;
  t.s = s;
  t.alpha = alpha.value_or(std::numeric_limits<double>::quiet_NaN());
  t.x.assign(n_max + 1, 0.0);
  t.y.assign(n_max + 1, 0.0);
  t.q_size.assign(n_max + 1, 0);
  return t;
}

void finish(MartingaleTrace& t) {
  t.gap.resize(t.x.size());
  for (std::size_t n = 0; n < t.x.size(); ++n) t.gap[n] = std::abs(t.x[n] - t.y[n]);
}

// Stopping level of every node of a materialized tree up to `depth`, with a
// flag for membership in Q_{level}.
struct TreeLevels {
  std::vector<std::vector<std::size_t>> lambda;
  std::vector<std::vector<char>> fresh;
};

TreeLevels tree_levels(const RealizationTree& tree, const ScaleLadder& ladder, std::size_t depth) {
  TreeLevels out;
  out.lambda.resize(depth + 1);
  out.fresh.resize(depth + 1);
  const std::size_t m = tree.m();
  for (std::size_t k = 0; k <= depth; ++k) {
    const Level& l = tree.level(k);
    out.lambda[k].resize(l.size());
    out.fresh[k].resize(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (k == 0) {
        out.lambda[k][i] = 0;
        out.fresh[k][i] = 1;
        continue;
      }
      const std::size_t parent = out.lambda[k - 1][i / m];
      const bool up = ladder.reaches(l.width[i], parent + 1);
      out.lambda[k][i] = parent + (up ? 1 : 0);
      out.fresh[k][i] = up;
    }
  }
  return out;
}

void require_depth(const RealizationTree& tree, std::size_t n_max) {
  const std::size_t need = required_tree_depth(tree.partition(), n_max);
  if (tree.depth() < need) throw InsufficientDepthError(need, tree.depth());
}

// Depth-first walk to the Q_{n_max} frontier.
class Walker {
 public:
  Walker(const Partition& p, const HeightLaw& law, double s, std::size_t n_max, bool geometry)
      : p_(p), law_(law), ladder_(p, n_max + 2), n_max_(n_max), geometry_(geometry),
        c_(weight_factors(p, s)), l_(p.lengths()), b_(p.breakpoints()),
        ybuf_((p.m() - 1) * (64 + 1)) {
    x_.assign(n_max + 1, 0.0);
    y_.assign(n_max + 1, 0.0);
    q_.assign(n_max + 1, 0);
    if (geometry_) rects_.resize(n_max + 1);
  }

  struct Node {
    std::uint64_t key;  ///< of the parent until the node is expanded
    std::uint32_t digit;
    std::size_t depth;
    std::size_t lambda;
    double t, width, u, w, base;
  };

  void run(std::uint64_t seed) {
    visit({root_key(seed), kRoot, 0, 0, 1.0, 1.0, 0.0, 1.0, 0.0}, true);
  }

  const ScaleLadder& ladder() const { return ladder_; }
  std::vector<double> x_, y_;
  std::vector<std::size_t> q_;
  std::vector<std::vector<Rect>> rects_;

 private:
  static constexpr std::uint32_t kRoot = ~std::uint32_t{0};

  void visit(Node node, bool fresh) {
    if (node.depth <= n_max_) y_[node.depth] += node.t;
    if (fresh) {
      x_[node.lambda] += node.t;
      ++q_[node.lambda];
      if (geometry_) {
        rects_[node.lambda].push_back(
            {node.base, node.base + node.width, std::min(node.u, node.w), std::max(node.u, node.w)});
      }
    }
    if (node.lambda == n_max_) return;

    const std::size_t m = p_.m();
    if (node.depth > 64) throw ResourceError("stopping-set walk exceeded depth 64");
    if (node.digit != kRoot) node.key = child_key(node.key, node.digit);
    std::span<double> y(ybuf_.data() + node.depth * (m - 1), m - 1);
    node_heights(law_, node.key, y);
    const double span = node.w - node.u;
    double e_lo = node.u;
    for (std::size_t i = 0; i < m; ++i) {
      const double e_hi = i + 1 < m ? node.u + y[i] * span : node.w;
      const double ratio = signed_ratio(y, i);
      Node child;
      child.key = node.key;
      child.digit = static_cast<std::uint32_t>(i);
      child.depth = node.depth + 1;
      child.width = node.width * l_[i];
      child.t = node.t * std::abs(ratio) * c_[i];
      child.u = e_lo;
      child.w = e_hi;
      child.base = node.base + b_[i] * node.width;
      const bool up = ladder_.reaches(child.width, node.lambda + 1);
      child.lambda = node.lambda + (up ? 1 : 0);
      visit(child, up);
      e_lo = e_hi;
    }
  }

  const Partition& p_;
  const HeightLaw& law_;
  ScaleLadder ladder_;
  std::size_t n_max_;
  bool geometry_;
  std::vector<double> c_;
  std::vector<double> l_;
  std::vector<double> b_;
  std::vector<double> ybuf_;
};

}  // namespace

MartingaleTrace martingale_trace(const RealizationTree& tree, double s, std::size_t n_max,
                                 std::optional<double> alpha) {
  require_depth(tree, n_max);
  const Partition& p = tree.partition();
  const ScaleLadder ladder(p, n_max + 2);
  const std::size_t depth = required_tree_depth(p, n_max);
  const TreeLevels lv = tree_levels(tree, ladder, depth);
  const std::vector<double> c = weight_factors(p, s);
  const std::size_t m = p.m();

  MartingaleTrace out = empty_trace(s, n_max, alpha);
  std::vector<double> x(n_max + 1, 0.0), y(n_max + 1, 0.0);
  std::vector<double> t{1.0}, next;
  for (std::size_t k = 0; k <= depth; ++k) {
    const Level& l = tree.level(k);
    if (k > 0) {
      next.resize(l.size());
      for (std::size_t i = 0; i < l.size(); ++i) next[i] = t[i / m] * std::abs(l.ratio[i]) * c[i % m];
      t.swap(next);
    }
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (k <= n_max) y[k] += t[i];
      const std::size_t lam = lv.lambda[k][i];
      if (lv.fresh[k][i] && lam <= n_max) {
        x[lam] += t[i];
        ++out.q_size[lam];
      }
    }
  }
  for (std::size_t n = 0; n <= n_max; ++n) {
    out.x[n] = static_cast<double>(x[n]);
    out.y[n] = static_cast<double>(y[n]);
  }
  finish(out);
  return out;
}

StreamedTrace stream_martingale_trace(const Partition& p, const HeightLaw& law, std::uint64_t seed,
                                      double s, std::size_t n_max, bool cover_counts) {
  if (law.m() != p.m()) throw ContractError("height law and partition disagree on m");
  Walker walker(p, law, s, n_max, cover_counts);
  walker.run(seed);
  StreamedTrace out{empty_trace(s, n_max, std::nullopt), {}};
  for (std::size_t n = 0; n <= n_max; ++n) {
    out.trace.x[n] = static_cast<double>(walker.x_[n]);
    out.trace.y[n] = static_cast<double>(walker.y_[n]);
    out.trace.q_size[n] = walker.q_[n];
  }
  finish(out.trace);
  if (cover_counts) {
    out.cover_counts.resize(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
      out.cover_counts[n] = box_count(walker.rects_[n], walker.ladder().scale(n));
    }
  }
  return out;
}

std::vector<Rect> q_cover_rects(const RealizationTree& tree, std::size_t n) {
  require_depth(tree, n);
  const ScaleLadder ladder(tree.partition(), n + 2);
  const std::size_t depth = required_tree_depth(tree.partition(), n);
  const TreeLevels lv = tree_levels(tree, ladder, depth);
  std::vector<Rect> out;
  for (std::size_t k = 0; k <= depth; ++k) {
    const Level& l = tree.level(k);
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (lv.fresh[k][i] && lv.lambda[k][i] == n) out.push_back(l.rect(i));
    }
  }
  return out;
}

bool SandwichReport::stated_holds() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const SandwichRow& r) { return r.stated_lower_ok && r.stated_upper_ok; });
}

bool SandwichReport::rigorous_holds() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const SandwichRow& r) { return r.rigorous_lower_ok && r.rigorous_upper_ok; });
}

SandwichReport sandwich_check(const MartingaleTrace& trace, std::span<const std::size_t> counts,
                              std::span<const double> scales, const Partition& p) {
  if (counts.size() != scales.size()) {
    throw ContractError("sandwich check got " + std::to_string(counts.size()) + " counts but " +
                        std::to_string(scales.size()) + " scales");
  }
  if (counts.size() + 1 > trace.x.size()) {
    throw ContractError("sandwich check needs X_n for n up to " + std::to_string(counts.size()));
  }
  const ScaleLadder ladder(p);
  SandwichReport out;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const std::size_t n = k + 1;
    const double expect = ladder.scale(n);
    if (!(std::abs(scales[k] - expect) <= 1e-12 * expect)) {
      throw ContractError("scale " + std::to_string(scales[k]) + " is not delta^" + std::to_string(n));
    }
    SandwichRow row;
    row.bounds = sandwich_bounds(trace.x[n], n, ladder.delta(), trace.s);
    row.scale = scales[k];
    row.count = counts[k];
    const double c = static_cast<double>(counts[k]);
    auto le = [](double a, double b) { return a <= b + kExactSlack * std::max(1.0, std::abs(b)); };
    row.stated_lower_ok = le(row.bounds.stated_lower, c);
    row.stated_upper_ok = le(c, row.bounds.stated_upper);
    row.rigorous_lower_ok = le(row.bounds.rigorous_lower, c);
    row.rigorous_upper_ok = le(c, row.bounds.rigorous_upper);
    out.rows.push_back(row);
  }
  return out;
}

bool MartingaleDiagnostics::statistical_pass() const {
  return decay_ok && std::all_of(levels.begin(), levels.end(), [](const MartingaleLevel& l) {
           return l.mean_ok && l.y_sq_ok && l.gap_ok;
         });
}

bool MartingaleDiagnostics::exact_pass() const {
  return !levels.empty() && levels[0].mean_y == 1.0 && levels[0].se_y == 0.0 &&
         sandwich.rigorous_lower_violations == 0 && sandwich.rigorous_upper_violations == 0;
}

namespace {

// Mean and standard error of the mean.
std::pair<double, double> mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  long double sum = 0.0L;
  for (double x : v) sum += x;
  const double mean = static_cast<double>(sum / n);
  if (v.size() < 2) return {mean, 0.0};
  long double ss = 0.0L;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(static_cast<double>(ss / (n - 1.0)) / n)};
}

}  // namespace

MartingaleDiagnostics martingale_diagnostics(const HeightLaw& law, const Partition& p, double s,
                                             const MartingaleConfig& config,
                                             const MomentConfig& moment_config) {
  require_valid(law, p);
  if (config.trees == 0) throw ContractError("martingale diagnostics need at least one tree");
  const RatioMoments mom = moments(law, p, moment_config);

  MartingaleDiagnostics out;
  out.s = s;
  out.alpha = second_moment_rate(mom, p, s);
  out.c_second = squared_sum_moment(mom, p, s);
  out.c_cross = cross_ratio_constant(mom);
  out.trees = config.trees;

  const std::size_t N = config.n_max;
  std::vector<StreamedTrace> runs(config.trees);
  detail::parallel_for(config.trees, [&](std::size_t t) {
    runs[t] = stream_martingale_trace(p, law, substream_key(config.seed, kTreeDomain, t), s, N,
                                      t < config.sandwich_trees);
  });

  double partial = 0.0;  // sum_{k<n} alpha^k
  for (std::size_t n = 0; n <= N; ++n) {
    std::vector<double> y(config.trees), y2(config.trees), g2(config.trees);
    for (std::size_t t = 0; t < config.trees; ++t) {
      const MartingaleTrace& tr = runs[t].trace;
      y[t] = tr.y[n];
      y2[t] = tr.y[n] * tr.y[n];
      g2[t] = tr.gap[n] * tr.gap[n];
    }
    MartingaleLevel lv;
    lv.n = n;
    std::tie(lv.mean_y, lv.se_y) = mean_se(y);
    std::tie(lv.mean_y_sq, lv.se_y_sq) = mean_se(y2);
    std::tie(lv.mean_gap_sq, lv.se_gap_sq) = mean_se(g2);
    lv.y_sq_bound = 1.0 + out.c_second * partial;
    lv.gap_bound = out.alpha < 1.0
                       ? out.c_cross * std::pow(out.alpha, static_cast<double>(n)) / (1.0 - out.alpha)
                       : std::numeric_limits<double>::infinity();
    lv.mean_ok = std::abs(lv.mean_y - 1.0) <= config.band * lv.se_y + 1e-9;
    lv.y_sq_ok = lv.mean_y_sq <= lv.y_sq_bound + config.band * lv.se_y_sq + 1e-9;
    lv.gap_ok = lv.mean_gap_sq <= lv.gap_bound + config.band * lv.se_gap_sq + 1e-12;
    out.levels.push_back(lv);
    partial += std::pow(out.alpha, static_cast<double>(n));
  }

  // Exponential decay rate of E(X_n - Y_n)^2.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double g = out.levels[n].mean_gap_sq;
    if (!(g > 1e-300)) continue;
    const double xn = static_cast<double>(n), yn = std::log(g);
    sx += xn;
    sy += yn;
    sxx += xn * xn;
    sxy += xn * yn;
    ++k;
  }
  if (k >= 2) {
    const double kn = static_cast<double>(k);
    out.decay_rate = std::exp((sxy - sx * sy / kn) / (sxx - sx * sx / kn));
  }
  out.decay_ok = out.decay_rate <= out.alpha + config.decay_slack;

  const ScaleLadder ladder(p);
  std::vector<double> scales;
  for (std::size_t n = 1; n <= N; ++n) scales.push_back(ladder.scale(n));
  for (std::size_t t = 0; t < std::min(config.sandwich_trees, config.trees); ++t) {
    const std::vector<std::size_t> counts(runs[t].cover_counts.begin() + 1, runs[t].cover_counts.end());
    const SandwichReport r = sandwich_check(runs[t].trace, counts, scales, p);
    for (const SandwichRow& row : r.rows) {
      ++out.sandwich.pairs;
      out.sandwich.stated_lower_violations += !row.stated_lower_ok;
      out.sandwich.stated_upper_violations += !row.stated_upper_ok;
      out.sandwich.rigorous_lower_violations += !row.rigorous_lower_ok;
      out.sandwich.rigorous_upper_violations += !row.rigorous_upper_ok;
    }
  }
  return out;
}

}  // namespace boxlike
