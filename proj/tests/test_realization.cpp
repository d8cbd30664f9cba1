#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "boxlike/error.hpp"
#include "boxlike/realization.hpp"

using namespace boxlike;

namespace {

const Partition thirds = Partition::uniform(3);
const Partition uneven({0.0, 0.4, 0.6, 1.0});

Word word_of(std::size_t index, std::size_t depth, std::size_t m) { return word_at(index, depth, m); }

}  // namespace

TEST_CASE("devil's staircase first step") {
  const RealizationTree t = sample_tree(thirds, HeightLaw::deterministic({0.5, 0.5}), 1, 1);
  const Level& l = t.level(1);
  REQUIRE(l.size() == 3);
  const double u[] = {0.0, 0.5, 0.5}, w[] = {0.5, 0.5, 1.0}, h[] = {0.5, 0.0, 0.5};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(l.u[i] == u[i]);
    CHECK(l.w[i] == w[i]);
    CHECK(l.height[i] == h[i]);
  }
}

TEST_CASE("Perkins heights and level-1 graph") {
  const HeightLaw perkins = HeightLaw::deterministic({5.0 / 6.0, 1.0 / 6.0});
  const RealizationTree t = sample_tree(thirds, perkins, 2, 9);
  CHECK(t.node(Word{1, 1}).height == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  CHECK_THROWS_AS(t.node(Word{1, 1, 1}), DomainError);
  CHECK_THROWS_AS(t.node(Word{3}), DomainError);

  const GraphApprox g = graph_points(t, 1);
  const double x[] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}, y[] = {0.0, 5.0 / 6.0, 1.0 / 6.0, 1.0};
  REQUIRE(g.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(g.x[i] == doctest::Approx(x[i]).epsilon(1e-15));
    CHECK(g.y[i] == doctest::Approx(y[i]).epsilon(1e-15));
  }
}

TEST_CASE("depth 0 is the diagonal") {
  const RealizationTree t = sample_tree(thirds, HeightLaw::iid_uniform(3), 0, 5);
  CHECK(t.depth() == 0);
  const RealizationTree::Node root = t.node(Word{});
  CHECK(root.u == 0.0);
  CHECK(root.w == 1.0);
  CHECK(root.height == 1.0);
  const GraphApprox g = graph_points(t);
  REQUIRE(g.size() == 2);
  CHECK(g.x[0] == 0.0);
  CHECK(g.y[0] == 0.0);
  CHECK(g.x[1] == 1.0);
  CHECK(g.y[1] == 1.0);
}

TEST_CASE("rejected laws never reach the tree") {
  CHECK_THROWS_AS(sample_tree(thirds, HeightLaw::deterministic({1.0 / 3.0, 2.0 / 3.0}), 2, 1), ContractError);
}

TEST_CASE("budget and depth limits fail before allocation") {
  TreeConfig cfg;
  cfg.node_budget = 1000;
  CHECK_THROWS_AS(sample_tree(thirds, HeightLaw::iid_uniform(3), 7, 1, cfg), ResourceError);
  CHECK_NOTHROW(sample_tree(thirds, HeightLaw::iid_uniform(3), 5, 1, cfg));
  cfg = TreeConfig{};
  cfg.max_depth = 4;
  CHECK_THROWS_AS(sample_tree(thirds, HeightLaw::iid_uniform(3), 5, 1, cfg), ResourceError);
}

TEST_CASE("property: multiplicativity, telescoping and continuity") {
  const HeightLaw laws[] = {HeightLaw::iid_uniform(3), HeightLaw::mirrored_beta(2.0, 1.0),
                            HeightLaw::iid_beta(5, 0.5, 0.5)};
  const Partition parts[] = {thirds, uneven, Partition({0.0, 0.1, 0.3, 0.6, 0.8, 1.0})};
  for (std::size_t c = 0; c < 3; ++c) {
    const Partition& p = parts[c];
    const std::size_t depth = c == 2 ? 6 : 9;
    const RealizationTree t = sample_tree(p, laws[c], depth, 100 + c);
    for (std::size_t k = 1; k <= depth; ++k) {
      const Level& lv = t.level(k);
      const Level& parent = t.level(k - 1);
      const std::size_t m = p.m();
      for (std::size_t i = 0; i < lv.size(); ++i) {
        // h as a product of ratios along the path.
        const Word w = word_of(i, k, m);
        double h = 1.0;
        for (std::size_t j = 1; j <= k; ++j) {
          const Level& lj = t.level(j);
          h *= lj.a(lex_index(w.prefix(j), m));
        }
        CHECK(std::abs(h - std::abs(lv.w[i] - lv.u[i])) <= 1e-12);
        CHECK(std::abs(lv.height[i] - std::abs(lv.w[i] - lv.u[i])) <= 1e-12);
        CHECK(lv.base[i] == doctest::Approx(word_base(w, p)).epsilon(1e-12));
        if (i % m + 1 < m) CHECK(std::abs(lv.w[i] - lv.u[i + 1]) <= 1e-12);
      }
      for (std::size_t q = 0; q < parent.size(); ++q) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += lv.ratio[q * m + i];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
    const GraphApprox g = graph_points(t);
    CHECK(g.size() == t.level(depth).size() + 1);
    CHECK(g.x.front() == 0.0);
    CHECK(g.y.front() == 0.0);
    CHECK(g.x.back() == 1.0);
    CHECK(g.y.back() == doctest::Approx(1.0).epsilon(1e-12));
    bool increasing = true, in_range = true;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) increasing &= g.x[i] < g.x[i + 1];
    for (double y : g.y) in_range &= y >= -1e-12 && y <= 1.0 + 1e-12;
    CHECK(increasing);
    CHECK(in_range);
  }
}

TEST_CASE("property: levels are reproducible across depths and modes") {
  const HeightLaw law = HeightLaw::mirrored_beta(2.0, 1.0);
  const RealizationTree deep = sample_tree(uneven, law, 8, 77);
  for (std::size_t k = 0; k <= 8; ++k) {
    const RealizationTree shallow = sample_tree(uneven, law, k, 77);
    CHECK(shallow.level(k).u == deep.level(k).u);
    CHECK(shallow.level(k).w == deep.level(k).w);
    CHECK(shallow.level(k).height == deep.level(k).height);
  }
  const Level only = sample_level(uneven, law, 8, 77);
  CHECK(only.u == deep.level(8).u);
  CHECK(only.key == deep.level(8).key);

  std::size_t visited = 0;
  stream_levels(uneven, law, 5, 77, [&](const Level& lv) {
    CHECK(lv.w == deep.level(lv.depth).w);
    ++visited;
  });
  CHECK(visited == 6);

  const RealizationTree other = sample_tree(uneven, law, 8, 78);
  CHECK(other.level(8).u != deep.level(8).u);
}

TEST_CASE("statistical: level-1 ratios match the law's moments") {
  struct Case {
    HeightLaw law;
    Partition p;
  };
  const Case cases[] = {{HeightLaw::iid_uniform(3), thirds}, {HeightLaw::mirrored_beta(2.0, 1.0), uneven}};
  for (const Case& c : cases) {
    const RatioMoments r = moments(c.law, c.p);
    const std::size_t m = c.p.m();
    std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
    const std::size_t seeds = 10000;
    for (std::size_t s = 0; s < seeds; ++s) {
      const Level lv = sample_level(c.p, c.law, 1, s);
      for (std::size_t i = 0; i < m; ++i) {
        sum[i] += lv.a(i);
        sum_sq[i] += lv.a(i) * lv.a(i);
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double mean = sum[i] / seeds;
      const double se = std::sqrt((sum_sq[i] / seeds - mean * mean) / (seeds - 1));
      CHECK(std::abs(mean - r.mean_a[i]) <= 4.0 * se);
    }
  }
}

TEST_CASE("max height is non-increasing and small at n = 14") {
  for (std::uint64_t seed : {1u, 2u}) {
    std::vector<double> max_h;
    stream_levels(thirds, HeightLaw::iid_uniform(3), 14, seed, [&](const Level& lv) {
      max_h.push_back(*std::max_element(lv.height.begin(), lv.height.end()));
    });
    REQUIRE(max_h.size() == 15);
    CHECK(max_h[0] == 1.0);
    for (std::size_t n = 1; n < max_h.size(); ++n) CHECK(max_h[n] <= max_h[n - 1]);
    CHECK(max_h[14] < 0.05);
  }
}

TEST_CASE("SVG output") {
  const RealizationTree t = sample_tree(thirds, HeightLaw::iid_uniform(3), 1, 3);
  RenderOptions opt;
  opt.rectangles = graph_points(t, 1);
  const std::string a = render_svg(graph_points(t), opt);
  const std::string b = render_svg(graph_points(t), opt);
  CHECK(a == b);
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.substr(a.size() - 7) == "</svg>\n");
  std::size_t rects = 0;
  for (std::size_t pos = a.find("<rect"); pos != std::string::npos; pos = a.find("<rect", pos + 1)) ++rects;
  // Background and frame, then one outline per level-1 rectangle.
  CHECK(rects == 5);
  std::size_t diagonals = 0;
  for (std::size_t pos = a.find("<line"); pos != std::string::npos; pos = a.find("<line", pos + 1)) ++diagonals;
  CHECK(diagonals == 3);

  const std::string seg = render_svg(graph_points(sample_tree(thirds, HeightLaw::iid_uniform(3), 0, 3)));
  CHECK(seg.find("<polyline") != std::string::npos);
  CHECK(seg.find("<rect") != std::string::npos);
}

TEST_CASE("CSV export") {
  const GraphApprox g = graph_points(sample_tree(thirds, HeightLaw::deterministic({5.0 / 6.0, 1.0 / 6.0}), 1, 1));
  const std::string csv = graph_to_csv(g);
  CHECK(csv.rfind("x,y\n0,0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.substr(csv.size() - 4) == "1,1\n");
  CHECK(g.rectangles().size() == 3);
}
