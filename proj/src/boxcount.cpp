#include "boxlike/boxcount.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boxlike/error.hpp"
#include "boxlike/stopping.hpp"
#include "parallel.hpp"

namespace boxlike {

namespace {

constexpr double kCoordinateSlack = 1e-12;

struct Grid {
  double delta;
  std::size_t cells;

  explicit Grid(double d)
      : delta(d), cells(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(1.0 / d - 1e-9)))) {}

  double boundary(std::size_t k) const { return static_cast<double>(k) * delta; }

  // Cell containing v: boundary(k) <= v < boundary(k+1), last cell closed.
  std::size_t index(double v) const {
    if (v <= 0.0) return 0;
    std::size_t k = static_cast<std::size_t>(std::floor(v / delta));
    while (k > 0 && boundary(k) > v) --k;
    while (k + 1 < cells && boundary(k + 1) <= v) ++k;
    return std::min(k, cells - 1);
  }

  // Cell containing values just below v (v itself excluded).
  std::size_t index_below(double v) const {
    const std::size_t k = index(v);
    return (k > 0 && boundary(k) == v) ? k - 1 : k;
  }
};

struct Span {
  std::size_t col, lo, hi;
  friend bool operator<(const Span& a, const Span& b) {
    return a.col != b.col ? a.col < b.col : a.lo < b.lo;
  }
};

std::size_t count_spans(std::vector<Span>& spans) {
  std::sort(spans.begin(), spans.end());
  std::size_t total = 0;
  std::size_t i = 0;
  while (i < spans.size()) {
    const std::size_t col = spans[i].col;
    std::size_t lo = spans[i].lo, hi = spans[i].hi;
    for (++i; i < spans.size() && spans[i].col == col; ++i) {
      if (spans[i].lo <= hi + 1) {
        hi = std::max(hi, spans[i].hi);
      } else {
        total += hi - lo + 1;
        lo = spans[i].lo;
        hi = spans[i].hi;
      }
    }
    total += hi - lo + 1;
  }
  return total;
}

void check_delta(double delta) {
  if (!(delta >= kMinBoxScale)) {
    throw DomainError("box scale " + std::to_string(delta) + " is below the resolution floor 1e-9");
  }
}

double clamp_unit(double v) {
  if (!(v >= -kCoordinateSlack && v <= 1.0 + kCoordinateSlack)) {
    throw DomainError("coordinate " + std::to_string(v) + " lies outside [0,1]");
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

std::size_t box_count(std::span<const Rect> rects, double delta) {
  check_delta(delta);
  if (delta >= 1.0) return rects.empty() ? 0 : 1;
  const Grid g(delta);
  std::vector<Span> spans;
  spans.reserve(rects.size() * 2);
  for (const Rect& r : rects) {
    const std::size_t c0 = g.index(clamp_unit(r.x0)), c1 = g.index(clamp_unit(r.x1));
    const std::size_t r0 = g.index(clamp_unit(r.y0)), r1 = g.index(clamp_unit(r.y1));
    for (std::size_t c = c0; c <= c1; ++c) spans.push_back({c, r0, r1});
  }
  return count_spans(spans);
}

std::size_t box_count(const GraphApprox& graph, double delta) {
  check_delta(delta);
  if (graph.size() == 0) return 0;
  if (delta >= 1.0) return 1;
  const Grid g(delta);
  std::vector<Span> spans;
  spans.reserve(graph.size() * 2);
  auto rows = [&](std::size_t col, double ya, double yb, bool open_end) {
    std::size_t lo, hi;
    if (ya == yb) {
      lo = hi = g.index(ya);
    } else if (ya < yb) {
      lo = g.index(ya);
      hi = open_end ? g.index_below(yb) : g.index(yb);
    } else {
      // Values in (yb, ya]: the cell of yb also holds the values just above it.
      hi = g.index(ya);
      lo = g.index(yb);
    }
    spans.push_back({col, std::min(lo, hi), std::max(lo, hi)});
  };
  for (std::size_t i = 0; i + 1 < graph.size(); ++i) {
    const double x0 = clamp_unit(graph.x[i]), x1 = clamp_unit(graph.x[i + 1]);
    const double y0 = clamp_unit(graph.y[i]), y1 = clamp_unit(graph.y[i + 1]);
    const std::size_t c0 = g.index(x0), c1 = g.index(x1);
    if (x1 <= x0) {
      const std::size_t c = g.index(x0);
      spans.push_back({c, g.index(std::min(y0, y1)), g.index(std::max(y0, y1))});
      continue;
    }
    auto y_at = [&](double x) {
      if (x <= x0) return y0;
      if (x >= x1) return y1;
      return y0 + (y1 - y0) * ((x - x0) / (x1 - x0));
    };
    for (std::size_t c = c0; c <= c1; ++c) {
      const double xa = std::max(x0, g.boundary(c));
      const bool open_end = c + 1 < g.cells && g.boundary(c + 1) <= x1;
      const double xb = open_end ? g.boundary(c + 1) : x1;
      rows(c, y_at(xa), y_at(xb), open_end && xb > xa);
    }
  }
  return count_spans(spans);
}

SandwichBounds sandwich_bounds(double x_n, std::size_t n, double delta, double s) {
  const double dn = static_cast<double>(n);
  const double scaled = std::pow(delta, -dn * s) * x_n;
  const double grid_term = std::pow(delta, -(dn + 1.0));
  SandwichBounds b;
  b.n = n;
  b.x_n = x_n;
  b.stated_lower = scaled / delta;
  b.stated_upper = scaled + 2.0 * grid_term;
  b.rigorous_lower = scaled / (std::ceil(1.0 / delta - 1e-12) + 1.0);
  b.rigorous_upper = 2.0 * std::pow(delta, 1.0 - s) * scaled + 4.0 * grid_term;
  return b;
}

BoxCountResult fit_counts(std::vector<double> scales, std::vector<std::size_t> counts,
                          const FitPolicy& policy) {
  if (scales.size() != counts.size()) throw ContractError("scales and counts differ in length");
  std::vector<std::size_t> order(scales.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scales[a] > scales[b]; });

  BoxCountResult r;
  for (std::size_t i : order) {
    r.scales.push_back(scales[i]);
    r.counts.push_back(counts[i]);
  }
  r.used.assign(r.scales.size(), false);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = policy.drop_coarsest; i < r.scales.size(); ++i) {
    if (r.counts[i] == 0) continue;
    r.used[i] = true;
    const double x = -std::log(r.scales[i]), y = std::log(static_cast<double>(r.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < std::max<std::size_t>(policy.min_scales, 2)) {
    throw FitError("only " + std::to_string(k) + " usable scales; at least " +
                   std::to_string(std::max<std::size_t>(policy.min_scales, 2)) + " are required");
  }
  const double kn = static_cast<double>(k);
  const double sxx_c = sxx - sx * sx / kn;
  if (!(sxx_c > 0.0)) throw FitError("fit scales are not distinct");
  r.slope = (sxy - sx * sy / kn) / sxx_c;
  r.intercept = (sy - r.slope * sx) / kn;
  if (k > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < r.scales.size(); ++i) {
      if (!r.used[i]) continue;
      const double e = std::log(static_cast<double>(r.counts[i])) -
                       (r.intercept - r.slope * std::log(r.scales[i]));
      rss += e * e;
    }
    r.slope_std_error = std::sqrt(rss / (kn - 2.0) / sxx_c);
  }
  return r;
}

BoxCountResult estimate_dimension(std::span<const Rect> rects, std::span<const double> scales,
                                  const FitPolicy& policy) {
  std::vector<std::size_t> counts(scales.size());
  detail::parallel_for(scales.size(), [&](std::size_t i) { counts[i] = box_count(rects, scales[i]); });
  return fit_counts({scales.begin(), scales.end()}, std::move(counts), policy);
}

BoxCountResult estimate_dimension(const RealizationTree& tree, const ScaleSchedule& schedule,
                                  const FitPolicy& policy, std::optional<double> s) {
  const Partition& p = tree.partition();
  const ScaleLadder ladder(p);
  std::vector<double> scales = schedule.scales;
  if (scales.empty()) {
    for (std::size_t k = 1; k <= tree.depth(); ++k) scales.push_back(ladder.scale(k));
  }
  const double resolution = std::pow(p.max_length(), static_cast<double>(tree.depth()));
  std::vector<double> kept, excluded;
  for (double d : scales) {
    check_delta(d);
    (resolution <= d * (1.0 + 1e-12) ? kept : excluded).push_back(d);
  }
  const GraphApprox graph = graph_points(tree);
  std::vector<std::size_t> counts(kept.size());
  detail::parallel_for(kept.size(), [&](std::size_t i) { counts[i] = box_count(graph, kept[i]); });
  BoxCountResult r = fit_counts(kept, std::move(counts), policy);
  r.excluded = std::move(excluded);

  if (s) {
    const double delta = ladder.delta();
    // X_n from the levels present in the tree.
    std::size_t n_max = 0;
    while (n_max + 1 <= 64 && required_tree_depth(p, n_max + 1) <= tree.depth()) ++n_max;
    if (n_max > 0) {
      std::vector<std::vector<std::size_t>> lambda(tree.depth() + 1);
      std::vector<double> x(n_max + 1, 0.0);
      const std::size_t m = p.m();
      for (std::size_t k = 0; k <= tree.depth(); ++k) {
        const Level& l = tree.level(k);
        lambda[k].resize(l.size());
        for (std::size_t i = 0; i < l.size(); ++i) {
          const std::size_t lam = ladder.level(l.width[i]);
          lambda[k][i] = lam;
          const bool fresh = k == 0 || lam > lambda[k - 1][i / m];
          if (fresh && lam <= n_max) x[lam] += l.height[i] * std::pow(l.width[i], *s - 1.0);
        }
      }
      for (double d : r.scales) {
        for (std::size_t n = 1; n <= n_max; ++n) {
          if (std::abs(d - ladder.scale(n)) <= 1e-12 * d) {
            r.sandwich.push_back(sandwich_bounds(x[n], n, delta, *s));
          }
        }
      }
    }
  }
  return r;
}

}  // namespace boxlike
