#include "boxlike/report.hpp"

#include <cmath>

namespace boxlike {

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

Json interval(const Interval& i) { return Json{{"lo", json_number(i.lo)}, {"hi", json_number(i.hi)}}; }

Json strings(const std::vector<std::string>& v) {
  Json a = Json::array();
  for (const auto& s : v) a.push_back(s);
  return a;
}

}  // namespace

Json to_json(const Partition& p) {
  return Json{{"breakpoints", numbers(p.breakpoints())}, {"lengths", numbers(p.lengths())}};
}

Json to_json(const RatioMoments& m) {
  Json j{{"m", m.m},
         {"provenance", to_string(m.provenance)},
         {"samples", m.samples},
         {"mean_a", numbers(m.mean_a)},
         {"mean_log_a", numbers(m.mean_log_a)},
         {"mean_a_sq", numbers(m.mean_a_sq)}};
  if (m.provenance == Provenance::MonteCarlo) {
    j["se_a"] = numbers(m.se_a);
    j["se_log_a"] = numbers(m.se_log_a);
    j["se_a_sq"] = numbers(m.se_a_sq);
  }
  return j;
}

Json to_json(const ValidationReport& r) {
  return Json{{"accepted", r.accepted},
              {"rejections", strings(r.rejections)},
              {"flags", strings(r.flags)},
              {"degenerate_height", r.degenerate_height},
              {"trivial_regime", r.trivial_regime},
              {"heuristic", r.heuristic}};
}

Json to_json(const DiffReport& r) {
  Json j{{"phi", json_number(r.phi)},
         {"std_error", json_number(r.std_error)},
         {"classification", to_string(r.classification)},
         {"exact", r.exact},
         {"confidence", r.verdict_confidence()}};
  if (r.ci) {
    j["ci"] = interval(*r.ci);
    j["level"] = r.level;
  }
  return j;
}

Json to_json(const DimensionReport& r) {
  Json j{{"s", json_number(r.s)},
         {"residual", json_number(r.residual)},
         {"bracket", interval(r.bracket)},
         {"iterations", r.iterations},
         {"warnings", strings(r.warnings)}};
  if (r.ci) j["ci"] = interval(*r.ci);
  return j;
}

Json to_json(const SensitivityResult& r) {
  return Json{{"interval", interval(r.interval)},
              {"lower_open", r.lower_open},
              {"upper_open", r.upper_open},
              {"warnings", strings(r.warnings)}};
}

Json to_json(const GraphApprox& g) {
  Json a = Json::array();
  for (std::size_t i = 0; i < g.size(); ++i) a.push_back(Json::array({json_number(g.x[i]), json_number(g.y[i])}));
  return a;
}

Json to_json(const SandwichReport& r) {
  Json rows = Json::array();
  for (const SandwichRow& row : r.rows) {
    rows.push_back(Json{{"n", row.bounds.n},
                        {"scale", json_number(row.scale)},
                        {"count", row.count},
                        {"x_n", json_number(row.bounds.x_n)},
                        {"stated_lower", json_number(row.bounds.stated_lower)},
                        {"stated_upper", json_number(row.bounds.stated_upper)},
                        {"rigorous_lower", json_number(row.bounds.rigorous_lower)},
                        {"rigorous_upper", json_number(row.bounds.rigorous_upper)},
                        {"stated_ok", row.stated_lower_ok && row.stated_upper_ok},
                        {"rigorous_ok", row.rigorous_lower_ok && row.rigorous_upper_ok}});
  }
  return Json{{"rows", rows}, {"stated_holds", r.stated_holds()}, {"rigorous_holds", r.rigorous_holds()}};
}

Json to_json(const BoxCountResult& r) {
  Json table = Json::array();
  for (std::size_t i = 0; i < r.scales.size(); ++i) {
    table.push_back(Json{{"scale", json_number(r.scales[i])}, {"count", r.counts[i]}, {"used", r.used[i]}});
  }
  Json sandwich = Json::array();
  for (const SandwichBounds& b : r.sandwich) {
    sandwich.push_back(Json{{"n", b.n},
                            {"x_n", json_number(b.x_n)},
                            {"stated_lower", json_number(b.stated_lower)},
                            {"stated_upper", json_number(b.stated_upper)},
                            {"rigorous_lower", json_number(b.rigorous_lower)},
                            {"rigorous_upper", json_number(b.rigorous_upper)}});
  }
  return Json{{"slope", json_number(r.slope)},
              {"slope_std_error", json_number(r.slope_std_error)},
              {"intercept", json_number(r.intercept)},
              {"scales", table},
              {"excluded_scales", numbers(r.excluded)},
              {"sandwich", sandwich}};
}

Json to_json(const MartingaleTrace& t) {
  Json q = Json::array();
  for (std::size_t v : t.q_size) q.push_back(v);
  return Json{{"s", json_number(t.s)}, {"alpha", json_number(t.alpha)}, {"x", numbers(t.x)},
              {"y", numbers(t.y)},     {"gap", numbers(t.gap)},            {"q_size", q}};
}

Json to_json(const MartingaleDiagnostics& d) {
  Json levels = Json::array();
  for (const MartingaleLevel& l : d.levels) {
    levels.push_back(Json{{"n", l.n},
                          {"mean_y", json_number(l.mean_y)},
                          {"se_y", json_number(l.se_y)},
                          {"mean_y_sq", json_number(l.mean_y_sq)},
                          {"y_sq_bound", json_number(l.y_sq_bound)},
                          {"mean_gap_sq", json_number(l.mean_gap_sq)},
                          {"se_gap_sq", json_number(l.se_gap_sq)},
                          {"gap_bound", json_number(l.gap_bound)},
                          {"mean_ok", l.mean_ok},
                          {"y_sq_ok", l.y_sq_ok},
                          {"gap_ok", l.gap_ok}});
  }
  return Json{{"s", json_number(d.s)},
              {"alpha", json_number(d.alpha)},
              {"c_second", json_number(d.c_second)},
              {"c_cross", json_number(d.c_cross)},
              {"trees", d.trees},
              {"levels", levels},
              {"decay_rate", json_number(d.decay_rate)},
              {"decay_ok", d.decay_ok},
              {"sandwich",
               Json{{"pairs", d.sandwich.pairs},
                    {"stated_lower_violations", d.sandwich.stated_lower_violations},
                    {"stated_upper_violations", d.sandwich.stated_upper_violations},
                    {"rigorous_lower_violations", d.sandwich.rigorous_lower_violations},
                    {"rigorous_upper_violations", d.sandwich.rigorous_upper_violations}}},
              {"statistical_pass", d.statistical_pass()},
              {"exact_pass", d.exact_pass()}};
}

Json to_json(const DriftReport& r) {
  return Json{{"phi", json_number(r.phi)},
              {"paths", r.paths},
              {"steps", r.steps},
              {"mean_slope", json_number(r.mean_slope)},
              {"se_slope", json_number(r.se_slope)},
              {"mean_frequency", numbers(r.mean_frequency)},
              {"se_frequency", numbers(r.se_frequency)},
              {"sign_changes", r.sign_changes},
              {"slope_ok", r.slope_ok},
              {"frequencies_ok", r.frequencies_ok}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace boxlike
