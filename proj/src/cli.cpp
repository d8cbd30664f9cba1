#include "boxlike/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "boxlike/boxcount.hpp"
#include "boxlike/config.hpp"
#include "boxlike/drift.hpp"
#include "boxlike/error.hpp"
#include "boxlike/martingale.hpp"
#include "boxlike/realization.hpp"
#include "boxlike/report.hpp"
#include "boxlike/stopping.hpp"
#include "boxlike/theory.hpp"

namespace boxlike {

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::size_t> depth;
  std::optional<double> s_offset;
  std::optional<std::string> svg;
  std::optional<std::size_t> rectangles;
  bool unit_square = false;
};

class Command {
 public:
  Command(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

  int dim();
  int phi();
  int simulate();
  int render();
  int boxcount();
  int diagnose();

 private:
  void load() {
    if (o_.config.empty()) throw ConfigError("--config is required for this command");
    cfg_ = load_config(o_.config);
    if (o_.format) cfg_.format = *o_.format;
    if (o_.out) cfg_.out = o_.out;
    if (o_.svg) cfg_.svg = o_.svg;
    if (o_.depth) cfg_.depth = *o_.depth;
    if (o_.s_offset) cfg_.s_offset = *o_.s_offset;
    if (o_.rectangles) cfg_.rectangles_level = o_.rectangles;
    p_.emplace(cfg_.partition());
  }

  // Nonzero exit code when the law is rejected.
  int gate() {
    validation_ = validate(cfg_.law, *p_);
    if (!validation_.accepted) {
      err_ << "height law rejected:\n";
      for (const auto& r : validation_.rejections) err_ << "  " << r << '\n';
      return kExitConfig;
    }
    for (const auto& f : validation_.flags) err_ << "note: " << f << '\n';
    return kExitOk;
  }

  std::uint64_t seed() {
    if (o_.seed) return *o_.seed;
    if (cfg_.seed) return *cfg_.seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err_ << "seed: " << s << " (drawn from entropy)\n";
    cfg_.seed = s;
    return s;
  }

  TreeConfig tree_config() const { return {cfg_.max_depth, cfg_.node_budget}; }

  Json model() const {
    return Json{{"family", cfg_.law.family_name()}, {"partition", to_json(*p_)}};
  }

  void emit(const std::string& text, const std::optional<std::string>& path) {
    if (!path || *path == "-") {
      out_ << text;
      return;
    }
    std::ofstream f(*path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + *path + "'");
    f << text;
  }

  bool csv() const { return cfg_.format == "csv"; }

  std::string svg_for(const GraphApprox& graph, std::uint64_t s) {
    RenderOptions ro;
    ro.width = cfg_.svg_width;
    ro.height = cfg_.svg_height;
    std::optional<std::size_t> level = cfg_.rectangles_level;
    if (!level && cfg_.depth <= 5) level = cfg_.depth;
    if (level) {
      if (*level > cfg_.depth) throw ConfigError("rectangle level exceeds the simulated depth");
      ro.rectangles = graph_points(sample_level(*p_, cfg_.law, *level, s, tree_config()));
    }
    return render_svg(graph, ro);
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  ModelConfig cfg_;
  std::optional<Partition> p_;
  ValidationReport validation_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int Command::dim() {
  load();
  if (int rc = gate()) return rc;
  const RatioMoments mom = moments(cfg_.law, *p_, cfg_.moments);
  const DimensionReport d = solve_dimension(mom, *p_, cfg_.solver);
  std::optional<SensitivityResult> sens;
  if (mom.provenance == Provenance::MonteCarlo) {
    sens = dimension_sensitivity(mom, *p_, cfg_.sensitivity_k, cfg_.solver);
  }
  for (const auto& w : d.warnings) err_ << "warning: " << w << '\n';
  if (csv()) {
    std::string t = "quantity,value\ns," + fmt(d.s) + "\nresidual," + fmt(d.residual) +
                    "\nbracket_lo," + fmt(d.bracket.lo) + "\nbracket_hi," + fmt(d.bracket.hi) +
                    "\niterations," + std::to_string(d.iterations) + "\n";
    if (sens) t += "sensitivity_lo," + fmt(sens->interval.lo) + "\nsensitivity_hi," + fmt(sens->interval.hi) + "\n";
    emit(t, cfg_.out);
    return kExitOk;
  }
  Json j{{"command", "dim"}, {"model", model()}, {"moments", to_json(mom)}, {"dimension", to_json(d)}};
  if (sens) {
    j["sensitivity"] = to_json(*sens);
    j["sensitivity"]["k"] = cfg_.sensitivity_k;
  }
  emit(dump(j), cfg_.out);
  return kExitOk;
}

int Command::phi() {
  load();
  if (int rc = gate()) return rc;
  const RatioMoments mom = moments(cfg_.law, *p_, cfg_.moments);
  const DiffReport r = compute_phi(mom, *p_, cfg_.stats);
  if (csv()) {
    emit("quantity,value\nphi," + fmt(r.phi) + "\nstd_error," + fmt(r.std_error) + "\nclassification," +
             to_string(r.classification) + "\n",
         cfg_.out);
    return kExitOk;
  }
  Json j{{"command", "phi"},
         {"model", model()},
         {"validation", to_json(validation_)},
         {"moments", to_json(mom)},
         {"phi", to_json(r)}};
  emit(dump(j), cfg_.out);
  return kExitOk;
}

int Command::simulate() {
  load();
  if (int rc = gate()) return rc;
  const std::uint64_t s = seed();
  const GraphApprox g = graph_points(sample_level(*p_, cfg_.law, cfg_.depth, s, tree_config()));
  if (csv()) {
    emit(graph_to_csv(g), cfg_.out);
  } else {
    Json j{{"command", "simulate"}, {"model", model()}, {"seed", s}, {"depth", cfg_.depth}, {"points", to_json(g)}};
    emit(dump(j), cfg_.out);
  }
  if (cfg_.svg) emit(svg_for(g, s), cfg_.svg);
  return kExitOk;
}

int Command::render() {
  load();
  if (int rc = gate()) return rc;
  const std::uint64_t s = seed();
  const GraphApprox g = graph_points(sample_level(*p_, cfg_.law, cfg_.depth, s, tree_config()));
  emit(svg_for(g, s), cfg_.svg ? cfg_.svg : cfg_.out);
  return kExitOk;
}

int Command::boxcount() {
  if (o_.unit_square) {
    const Rect square{0.0, 1.0, 0.0, 1.0};
    std::vector<double> scales;
    for (int k = 3; k <= 8; ++k) scales.push_back(std::ldexp(1.0, -k));
    const BoxCountResult r = estimate_dimension(std::span<const Rect>(&square, 1), scales, FitPolicy{0, 3});
    Json j{{"command", "boxcount"}, {"self_test", "unit-square"}, {"estimate", to_json(r)}, {"expected", 2.0}};
    emit(dump(j), o_.out);
    return kExitOk;
  }
  load();
  if (int rc = gate()) return rc;
  const std::uint64_t s = seed();
  std::optional<double> s_theory;
  try {
    s_theory = solve_dimension(moments(cfg_.law, *p_, cfg_.moments), *p_, cfg_.solver).s;
  } catch (const SolverError& e) {
    err_ << "warning: no theoretical dimension: " << e.what() << '\n';
  }
  const RealizationTree tree = sample_tree(*p_, cfg_.law, cfg_.depth, s, tree_config());
  const BoxCountResult r = estimate_dimension(tree, ScaleSchedule{cfg_.scales},
                                              FitPolicy{cfg_.drop_coarsest, cfg_.min_scales}, s_theory);
  if (csv()) {
    std::string t = "scale,count,used\n";
    for (std::size_t i = 0; i < r.scales.size(); ++i) {
      t += fmt(r.scales[i]) + "," + std::to_string(r.counts[i]) + "," + (r.used[i] ? "1" : "0") + "\n";
    }
    emit(t, cfg_.out);
    err_ << "slope " << fmt(r.slope) << "\n";
    return kExitOk;
  }
  Json j{{"command", "boxcount"}, {"model", model()}, {"seed", s}, {"depth", cfg_.depth}, {"estimate", to_json(r)}};
  j["theory"] = Json{{"s", s_theory ? json_number(*s_theory) : Json(nullptr)}};
  emit(dump(j), cfg_.out);
  return kExitOk;
}

int Command::diagnose() {
  load();
  if (int rc = gate()) return rc;
  const std::uint64_t seed_value = seed();
  const RatioMoments mom = moments(cfg_.law, *p_, cfg_.moments);
  const DimensionReport dim = solve_dimension(mom, *p_, cfg_.solver);
  const double s = dim.s + cfg_.s_offset;

  // Exact checks.
  const std::size_t n_exact = std::max<std::size_t>(1, std::min(cfg_.exact_levels, cfg_.n_max));
  std::size_t depth = cfg_.exact_depth ? cfg_.exact_depth : required_tree_depth(*p_, n_exact);
  if (o_.depth) depth = *o_.depth;
  const RealizationTree tree = sample_tree(*p_, cfg_.law, depth, seed_value, tree_config());
  const MartingaleTrace tree_trace = martingale_trace(tree, s, n_exact);
  const StreamedTrace streamed = stream_martingale_trace(*p_, cfg_.law, seed_value, s, n_exact);
  double agreement = 0.0;
  bool same_q = true;
  for (std::size_t n = 0; n <= n_exact; ++n) {
    agreement = std::max(agreement, std::abs(tree_trace.x[n] - streamed.trace.x[n]) / std::max(1.0, tree_trace.x[n]));
    agreement = std::max(agreement, std::abs(tree_trace.y[n] - streamed.trace.y[n]) / std::max(1.0, tree_trace.y[n]));
    same_q = same_q && tree_trace.q_size[n] == streamed.trace.q_size[n];
  }
  const bool agree_ok = agreement <= 1e-9 && same_q;
  const bool y0_ok = tree_trace.y[0] == 1.0 && tree_trace.x[0] == 1.0;

  const StoppingSet q = build_stopping_set(*p_, n_exact);
  const double kraft = partition_identity_check(q, p_->lengths());
  std::vector<double> pk(p_->m());
  for (std::size_t i = 0; i < p_->m(); ++i) pk[i] = mom.mean_a[i] * std::pow(p_->length(i), dim.s - 1.0);
  double pk_sum = 0.0;
  for (double v : pk) pk_sum += v;
  for (double& v : pk) v /= pk_sum;  // exact at the root; guards solver tolerance
  const double identity = partition_identity_check(q, pk);
  const bool identity_ok = kraft < 1e-9 && identity < 1e-9 && std::abs(pk_sum - 1.0) < 1e-9;

  MartingaleConfig mc;
  mc.n_max = cfg_.n_max;
  mc.trees = cfg_.trees;
  mc.seed = seed_value;
  mc.band = cfg_.band;
  mc.sandwich_trees = cfg_.sandwich_trees;
  mc.decay_slack = cfg_.decay_slack;
  const MartingaleDiagnostics diag = martingale_diagnostics(cfg_.law, *p_, s, mc, cfg_.moments);

  const DiffReport phi = compute_phi(mom, *p_, cfg_.stats);
  DriftConfig dc;
  dc.paths = cfg_.drift_paths;
  dc.steps = cfg_.drift_steps;
  dc.seed = seed_value;
  dc.band = cfg_.band;
  const DriftReport drift = drift_probe(cfg_.law, *p_, phi.phi, dc);

  const bool exact_pass = agree_ok && y0_ok && identity_ok && diag.exact_pass();
  const bool stat_pass = diag.statistical_pass() && drift.slope_ok && drift.frequencies_ok;
  const bool pass = exact_pass && stat_pass;

  if (csv()) {
    std::string t = "n,mean_y,se_y,mean_y_sq,y_sq_bound,mean_gap_sq,gap_bound,mean_ok,y_sq_ok,gap_ok\n";
    for (const MartingaleLevel& l : diag.levels) {
      t += std::to_string(l.n) + "," + fmt(l.mean_y) + "," + fmt(l.se_y) + "," + fmt(l.mean_y_sq) + "," +
           fmt(l.y_sq_bound) + "," + fmt(l.mean_gap_sq) + "," + fmt(l.gap_bound) + "," +
           (l.mean_ok ? "1" : "0") + "," + (l.y_sq_ok ? "1" : "0") + "," + (l.gap_ok ? "1" : "0") + "\n";
    }
    emit(t, cfg_.out);
  } else {
    Json j{{"command", "diagnose"},
           {"model", model()},
           {"seed", seed_value},
           {"s_solved", json_number(dim.s)},
           {"s_used", json_number(s)},
           {"exact",
            Json{{"tree_depth", depth},
                 {"levels", n_exact},
                 {"tree_trace", to_json(tree_trace)},
                 {"streamed_agreement", json_number(agreement)},
                 {"streamed_agree", agree_ok},
                 {"y0_is_one", y0_ok},
                 {"kraft_residual", json_number(kraft)},
                 {"weights_residual", json_number(identity)},
                 {"identity_ok", identity_ok},
                 {"sandwich_rigorous_ok", diag.exact_pass()},
                 {"pass", exact_pass}}},
           {"martingale", to_json(diag)},
           {"drift", to_json(drift)},
           {"summary", Json{{"exact_pass", exact_pass}, {"statistical_pass", stat_pass}, {"pass", pass}}}};
    emit(dump(j), cfg_.out);
  }
  err_ << (pass ? "diagnose: all checks passed\n" : "diagnose: some checks FAILED\n");
  return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random box-like self-affine graphs: dimension, differentiability and diagnostics", "boxlike"};
  Options o;
  app.add_option("--config", o.config, "model configuration file (YAML or JSON)");
  app.add_option("--seed", o.seed, "master seed (u64); drawn from entropy and printed when absent");
  app.add_option("--out", o.out, "output file; '-' or absent writes to stdout");
  app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--depth", o.depth, "tree depth n");
  app.add_option("--s-offset", o.s_offset, "diagnose: shift the solved dimension by this amount");
  app.add_option("--svg", o.svg, "simulate/render: SVG output file");
  app.add_option("--rectangles", o.rectangles, "simulate/render: draw the level-k rectangles");
  app.add_flag("--unit-square", o.unit_square, "boxcount: unit-square self-test");
  app.require_subcommand(1);

  const char* names[][2] = {{"dim", "solve the dimension equation"},
                            {"phi", "compute phi and classify differentiability"},
                            {"simulate", "sample one realization and export its graph"},
                            {"boxcount", "estimate the box dimension of one realization"},
                            {"diagnose", "martingale, sandwich and drift diagnostics"},
                            {"render", "write the SVG of one realization"}};
  for (auto& n : names) app.add_subcommand(n[0], n[1])->fallthrough();

  std::vector<const char*> argv{"boxlike"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  Command cmd(o, out, err);
  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "dim") return cmd.dim();
    if (name == "phi") return cmd.phi();
    if (name == "simulate") return cmd.simulate();
    if (name == "boxcount") return cmd.boxcount();
    if (name == "diagnose") return cmd.diagnose();
    return cmd.render();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << '\n';
    return kExitFit;
  } catch (const InsufficientDepthError& e) {
    err << "insufficient depth: " << e.what() << '\n';
    return kExitInsufficientDepth;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace boxlike
