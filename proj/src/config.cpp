#include "boxlike/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "boxlike/error.hpp"

namespace boxlike {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

void allow_keys(const YAML::Node& map, const std::set<std::string>& keys, const std::string& where) {
  if (!map.IsMap()) throw ConfigError(where + " must be a mapping", line_of(map));
  for (const auto& kv : map) {
    const std::string k = kv.first.as<std::string>();
    if (!keys.count(k)) throw ConfigError("unknown key '" + k + "' in " + where, line_of(kv.first));
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& name) {
  if (!n.IsScalar()) throw ConfigError("'" + name + "' must be a scalar", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("'" + name + "' has the wrong type", line_of(n));
  }
}

std::size_t count(const YAML::Node& n, const std::string& name) {
  const long long v = scalar<long long>(n, name);
  if (v < 0) throw ConfigError("'" + name + "' must be non-negative", line_of(n));
  return static_cast<std::size_t>(v);
}

double positive(const YAML::Node& n, const std::string& name) {
  const double v = scalar<double>(n, name);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("'" + name + "' must be positive", line_of(n));
  return v;
}

std::vector<double> numbers(const YAML::Node& n, const std::string& name) {
  if (!n.IsSequence()) throw ConfigError("'" + name + "' must be a list of numbers", line_of(n));
  std::vector<double> out;
  for (const auto& v : n) out.push_back(scalar<double>(v, name));
  return out;
}

template <class F>
void get(const YAML::Node& map, const char* key, F&& apply) {
  if (const YAML::Node n = map[key]) apply(n);
}

std::vector<double> parse_partition(const YAML::Node& n) {
  if (n.IsMap()) {
    allow_keys(n, {"uniform"}, "partition");
    const std::size_t m = count(n["uniform"], "partition.uniform");
    if (m < 2) throw ConfigError("partition.uniform must be at least 2", line_of(n["uniform"]));
    return Partition::uniform(m).breakpoints();
  }
  std::vector<double> b = numbers(n, "partition");
  try {
    Partition{b};
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid partition: ") + e.what(), line_of(n));
  }
  return b;
}

HeightLaw parse_law(const YAML::Node& n, std::size_t m) {
  allow_keys(n, {"family", "y", "alpha", "beta"}, "heightlaw");
  if (!n["family"]) throw ConfigError("heightlaw needs a 'family'", line_of(n));
  const std::string family = scalar<std::string>(n["family"], "heightlaw.family");
  const int line = line_of(n);
  auto need = [&](const char* key) {
    if (!n[key]) throw ConfigError("heightlaw family '" + family + "' needs '" + key + "'", line);
    return n[key];
  };
  try {
    if (family == "deterministic") {
      const YAML::Node y = need("y");
      std::vector<double> v = numbers(y, "heightlaw.y");
      if (v.size() + 1 != m) {
        throw ConfigError("heightlaw.y needs " + std::to_string(m - 1) + " values for " +
                              std::to_string(m) + " intervals",
                          line_of(y));
      }
      return HeightLaw::deterministic(std::move(v));
    }
    if (family == "okamoto") {
      if (m != 3) throw ConfigError("the okamoto family needs three intervals", line);
      return HeightLaw::okamoto(scalar<double>(need("alpha"), "heightlaw.alpha"));
    }
    if (family == "iid_uniform") return HeightLaw::iid_uniform(m);
    if (family == "iid_beta") {
      return HeightLaw::iid_beta(m, positive(need("alpha"), "heightlaw.alpha"),
                                 positive(need("beta"), "heightlaw.beta"));
    }
    if (family == "mirrored_beta") {
      if (m != 3) throw ConfigError("the mirrored_beta family needs three intervals", line);
      return HeightLaw::mirrored_beta(positive(need("alpha"), "heightlaw.alpha"),
                                      positive(need("beta"), "heightlaw.beta"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid heightlaw: ") + e.what(), line);
  }
  throw ConfigError("unknown heightlaw family '" + family + "'", line_of(n["family"]));
}

}  // namespace

ModelConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  if (!root || root.IsNull()) throw ConfigError("configuration is empty", 1);
  allow_keys(root,
             {"partition", "heightlaw", "seed", "depth", "max_depth", "node_budget", "moments",
              "solver", "stats", "boxcount", "diagnose", "render", "output"},
             "the configuration");

  ModelConfig c;
  if (!root["heightlaw"]) throw ConfigError("missing 'heightlaw'", 1);
  const YAML::Node law = root["heightlaw"];
  if (root["partition"]) {
    c.breakpoints = parse_partition(root["partition"]);
  } else if (law.IsMap() && law["family"] && law["family"].IsScalar() &&
             (law["family"].as<std::string>() == "okamoto" ||
              law["family"].as<std::string>() == "mirrored_beta")) {
    c.breakpoints = Partition::uniform(3).breakpoints();
  } else {
    throw ConfigError("missing 'partition'", 1);
  }
  c.law = parse_law(law, c.breakpoints.size() - 1);

  get(root, "seed", [&](const YAML::Node& n) { c.seed = scalar<std::uint64_t>(n, "seed"); });
  get(root, "depth", [&](const YAML::Node& n) { c.depth = count(n, "depth"); });
  get(root, "max_depth", [&](const YAML::Node& n) { c.max_depth = count(n, "max_depth"); });
  get(root, "node_budget", [&](const YAML::Node& n) { c.node_budget = count(n, "node_budget"); });

  get(root, "moments", [&](const YAML::Node& n) {
    allow_keys(n, {"samples", "seed", "force_monte_carlo"}, "moments");
    get(n, "samples", [&](const YAML::Node& v) { c.moments.samples = count(v, "moments.samples"); });
    get(n, "seed", [&](const YAML::Node& v) { c.moments.seed = scalar<std::uint64_t>(v, "moments.seed"); });
    get(n, "force_monte_carlo",
        [&](const YAML::Node& v) { c.moments.force_monte_carlo = scalar<bool>(v, "moments.force_monte_carlo"); });
  });
  get(root, "solver", [&](const YAML::Node& n) {
    allow_keys(n, {"tol", "max_iterations"}, "solver");
    get(n, "tol", [&](const YAML::Node& v) { c.solver.tol = positive(v, "solver.tol"); });
    get(n, "max_iterations",
        [&](const YAML::Node& v) { c.solver.max_iterations = count(v, "solver.max_iterations"); });
  });
  get(root, "stats", [&](const YAML::Node& n) {
    allow_keys(n, {"level", "sensitivity_k"}, "stats");
    get(n, "level", [&](const YAML::Node& v) {
      c.stats.level = scalar<double>(v, "stats.level");
      if (!(c.stats.level > 0.0 && c.stats.level < 1.0)) {
        throw ConfigError("stats.level must lie in (0, 1)", line_of(v));
      }
    });
    get(n, "sensitivity_k", [&](const YAML::Node& v) { c.sensitivity_k = positive(v, "stats.sensitivity_k"); });
  });
  get(root, "boxcount", [&](const YAML::Node& n) {
    allow_keys(n, {"scales", "drop_coarsest", "min_scales"}, "boxcount");
    get(n, "scales", [&](const YAML::Node& v) {
      c.scales = numbers(v, "boxcount.scales");
      for (double d : c.scales) {
        if (!(d > 0.0)) throw ConfigError("boxcount.scales must be positive", line_of(v));
      }
    });
    get(n, "drop_coarsest", [&](const YAML::Node& v) { c.drop_coarsest = count(v, "boxcount.drop_coarsest"); });
    get(n, "min_scales", [&](const YAML::Node& v) { c.min_scales = count(v, "boxcount.min_scales"); });
  });
  get(root, "diagnose", [&](const YAML::Node& n) {
    allow_keys(n,
               {"n_max", "trees", "sandwich_trees", "band", "decay_slack", "s_offset", "drift_paths",
                "drift_steps", "exact_depth", "exact_levels"},
               "diagnose");
    get(n, "n_max", [&](const YAML::Node& v) { c.n_max = count(v, "diagnose.n_max"); });
    get(n, "trees", [&](const YAML::Node& v) { c.trees = count(v, "diagnose.trees"); });
    get(n, "sandwich_trees", [&](const YAML::Node& v) { c.sandwich_trees = count(v, "diagnose.sandwich_trees"); });
    get(n, "band", [&](const YAML::Node& v) { c.band = positive(v, "diagnose.band"); });
    get(n, "decay_slack", [&](const YAML::Node& v) { c.decay_slack = scalar<double>(v, "diagnose.decay_slack"); });
    get(n, "s_offset", [&](const YAML::Node& v) { c.s_offset = scalar<double>(v, "diagnose.s_offset"); });
    get(n, "drift_paths", [&](const YAML::Node& v) { c.drift_paths = count(v, "diagnose.drift_paths"); });
    get(n, "drift_steps", [&](const YAML::Node& v) { c.drift_steps = count(v, "diagnose.drift_steps"); });
    get(n, "exact_depth", [&](const YAML::Node& v) { c.exact_depth = count(v, "diagnose.exact_depth"); });
    get(n, "exact_levels", [&](const YAML::Node& v) { c.exact_levels = count(v, "diagnose.exact_levels"); });
  });
  get(root, "render", [&](const YAML::Node& n) {
    allow_keys(n, {"width", "height", "rectangles"}, "render");
    get(n, "width", [&](const YAML::Node& v) { c.svg_width = static_cast<int>(count(v, "render.width")); });
    get(n, "height", [&](const YAML::Node& v) { c.svg_height = static_cast<int>(count(v, "render.height")); });
    get(n, "rectangles", [&](const YAML::Node& v) { c.rectangles_level = count(v, "render.rectangles"); });
  });
  get(root, "output", [&](const YAML::Node& n) {
    allow_keys(n, {"path", "svg", "format"}, "output");
    get(n, "path", [&](const YAML::Node& v) { c.out = scalar<std::string>(v, "output.path"); });
    get(n, "svg", [&](const YAML::Node& v) { c.svg = scalar<std::string>(v, "output.svg"); });
    get(n, "format", [&](const YAML::Node& v) {
      c.format = scalar<std::string>(v, "output.format");
      if (c.format != "json" && c.format != "csv") {
        throw ConfigError("output.format must be json or csv", line_of(v));
      }
    });
  });
  return c;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace boxlike
