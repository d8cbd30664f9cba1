#include "boxlike/realization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "boxlike/error.hpp"
#include "boxlike/rng.hpp"
#include "parallel.hpp"

namespace boxlike {

namespace {

constexpr double kContinuityTolerance = 1e-9;

// Number of nodes in levels 0..depth, saturating.
double tree_size(std::size_t m, std::size_t depth) {
  double total = 0.0, level = 1.0;
  for (std::size_t k = 0; k <= depth; ++k) {
    total += level;
    level *= static_cast<double>(m);
  }
  return total;
}

void check_budget(std::size_t m, std::size_t depth, double nodes, const TreeConfig& config) {
  if (depth > config.max_depth) {
    throw ResourceError("depth " + std::to_string(depth) + " exceeds the configured maximum " +
                        std::to_string(config.max_depth));
  }
  if (nodes > static_cast<double>(config.node_budget)) {
    std::ostringstream os;
    os << "depth " << depth << " with m = " << m << " needs " << nodes
       << " nodes, above the budget of " << config.node_budget;
    throw ResourceError(os.str());
  }
}

void resize(Level& l, std::size_t n) {
  l.u.resize(n);
  l.w.resize(n);
  l.ratio.resize(n);
  l.height.resize(n);
  l.base.resize(n);
  l.width.resize(n);
  l.key.resize(n);
}

}  // namespace

void node_heights(const HeightLaw& law, std::uint64_t key, std::span<double> y) {
  StreamRng rng(key);
  law.draw(rng, y);
}

Level root_level(std::uint64_t seed) {
  Level root;
  resize(root, 1);
  root.u[0] = 0.0;
  root.w[0] = 1.0;
  root.ratio[0] = 1.0;
  root.height[0] = 1.0;
  root.base[0] = 0.0;
  root.width[0] = 1.0;
  root.key[0] = root_key(seed);
  return root;
}

Level expand_level(const Level& parent, const Partition& p, const HeightLaw& law) {
  const std::size_t m = p.m();
  Level out;
  out.depth = parent.depth + 1;
  resize(out, parent.size() * m);

  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (parent.size() + kChunk - 1) / kChunk;
  detail::parallel_for(chunks, [&](std::size_t c) {
    std::vector<double> y(m - 1);
    std::vector<double> e(m + 1);
    const std::size_t end = std::min(parent.size(), (c + 1) * kChunk);
    for (std::size_t j = c * kChunk; j < end; ++j) {
      node_heights(law, parent.key[j], y);
      const double u = parent.u[j], w = parent.w[j], span = w - u;
      e[0] = u;
      for (std::size_t i = 1; i < m; ++i) e[i] = u + y[i - 1] * span;
      e[m] = w;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = j * m + i;
        out.u[k] = e[i];
        out.w[k] = e[i + 1];
        out.ratio[k] = signed_ratio(y, i);
        out.height[k] = parent.height[j] * std::abs(out.ratio[k]);
        out.base[k] = parent.base[j] + p.breakpoint(i) * parent.width[j];
        out.width[k] = parent.width[j] * p.length(i);
        out.key[k] = child_key(parent.key[j], static_cast<std::uint32_t>(i));
      }
    }
  });
  return out;
}

RealizationTree::Node RealizationTree::node(const Word& w) const {
  if (w.size() > depth()) {
    throw DomainError("word of length " + std::to_string(w.size()) +
                      " is deeper than the tree (" + std::to_string(depth()) + ")");
  }
  const Level& l = levels_[w.size()];
  const std::size_t i = lex_index(w, m());
  return {l.u[i], l.w[i], l.ratio[i], l.height[i], l.base[i], l.width[i]};
}

RealizationTree sample_tree(const Partition& p, const HeightLaw& law, std::size_t depth,
                            std::uint64_t seed, const TreeConfig& config) {
  require_valid(law, p);
  check_budget(p.m(), depth, tree_size(p.m(), depth), config);
  std::vector<Level> levels;
  levels.reserve(depth + 1);
  levels.push_back(root_level(seed));
  for (std::size_t k = 1; k <= depth; ++k) {
    levels.push_back(expand_level(levels.back(), p, law));
  }
  return RealizationTree(p, seed, std::move(levels));
}

void stream_levels(const Partition& p, const HeightLaw& law, std::size_t depth,
                   std::uint64_t seed, const std::function<void(const Level&)>& visit,
                   const TreeConfig& config) {
  require_valid(law, p);
  const double m = static_cast<double>(p.m());
  const double frontier = std::pow(m, static_cast<double>(depth)) *
                          (1.0 + (depth > 0 ? 1.0 / m : 0.0));
  check_budget(p.m(), depth, frontier, config);
  Level current = root_level(seed);
  visit(current);
  for (std::size_t k = 1; k <= depth; ++k) {
    current = expand_level(current, p, law);
    visit(current);
  }
}

Level sample_level(const Partition& p, const HeightLaw& law, std::size_t depth,
                   std::uint64_t seed, const TreeConfig& config) {
  Level last;
  stream_levels(p, law, depth, seed,
                [&](const Level& l) {
                  if (l.depth == depth) last = l;
                },
                config);
  return last;
}

std::vector<Rect> GraphApprox::rectangles() const {
  std::vector<Rect> out;
  if (x.size() < 2) return out;
  out.reserve(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    out.push_back({x[i], x[i + 1], std::min(y[i], y[i + 1]), std::max(y[i], y[i + 1])});
  }
  return out;
}

GraphApprox graph_points(const Level& level) {
  GraphApprox g;
  const std::size_t n = level.size();
  g.x.reserve(n + 1);
  g.y.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && std::abs(level.w[i] - level.u[i + 1]) > kContinuityTolerance) {
      throw ConsistencyError("sibling continuity violated between nodes " + std::to_string(i) +
                             " and " + std::to_string(i + 1));
    }
    g.x.push_back(level.base[i]);
    g.y.push_back(level.u[i]);
  }
  if (n > 0 && std::abs(level.w[n - 1] - 1.0) > kContinuityTolerance) {
    throw ConsistencyError("graph does not end at (1, 1)");
  }
  g.x.push_back(1.0);
  g.y.push_back(1.0);
  return g;
}

GraphApprox graph_points(const RealizationTree& tree) { return graph_points(tree.level(tree.depth())); }

GraphApprox graph_points(const RealizationTree& tree, std::size_t level) {
  return graph_points(tree.level(level));
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const GraphApprox& graph, const RenderOptions& o) {
  const double W = o.width, H = o.height, M = o.margin;
  auto px = [&](double x) { return fmt(M + x * (W - 2 * M)); };
  auto py = [&](double y) { return fmt(H - M - y * (H - 2 * M)); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\""
     << o.height << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << o.width << "\" height=\"" << o.height
     << "\" fill=\"white\"/>\n"
     << "<rect x=\"" << px(0) << "\" y=\"" << py(1) << "\" width=\"" << fmt(W - 2 * M)
     << "\" height=\"" << fmt(H - 2 * M) << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n";

  if (o.rectangles) {
    const GraphApprox& r = *o.rectangles;
    os << "<g class=\"rectangles\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"0.75\">\n";
    for (const Rect& rc : r.rectangles()) {
      os << "<rect x=\"" << px(rc.x0) << "\" y=\"" << py(rc.y1) << "\" width=\""
         << fmt((rc.x1 - rc.x0) * (W - 2 * M)) << "\" height=\"" << fmt((rc.y1 - rc.y0) * (H - 2 * M))
         << "\"/>\n";
    }
    os << "</g>\n<g class=\"diagonals\" stroke=\"#c0392b\" stroke-width=\"0.75\" stroke-dasharray=\"3 2\">\n";
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      os << "<line x1=\"" << px(r.x[i]) << "\" y1=\"" << py(r.y[i]) << "\" x2=\"" << px(r.x[i + 1])
         << "\" y2=\"" << py(r.y[i + 1]) << "\"/>\n";
    }
    os << "</g>\n";
  }

  os << "<polyline class=\"graph\" fill=\"none\" stroke=\"" << o.stroke << "\" stroke-width=\""
     << o.stroke_width << "\" points=\"";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (i) os << ' ';
    os << px(graph.x[i]) << ',' << py(graph.y[i]);
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

std::string graph_to_csv(const GraphApprox& graph) {
  std::string out = "x,y\n";
  char buf[64];
  for (std::size_t i = 0; i < graph.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", graph.x[i], graph.y[i]);
    out += buf;
  }
  return out;
}

}  // namespace boxlike
