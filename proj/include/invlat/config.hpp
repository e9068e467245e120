#pragma once

// Run configuration: `key = value` lines grouped under `[section]` headers.
// Keys before the first header belong to [run]. `#` starts a comment.
// Unknown sections or keys are errors.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "invlat/ensemble.hpp"
#include "invlat/error.hpp"
#include "invlat/helmholtz.hpp"
#include "invlat/inverse.hpp"
#include "invlat/io.hpp"
#include "invlat/models.hpp"
#include "invlat/rng.hpp"
#include "invlat/waveguide.hpp"

namespace invlat {

enum class Command { Spectrum, Invert, Sample, Distributions, Model, Design, Simulate, Validate };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::Spectrum: return "spectrum";
    case Command::Invert: return "invert";
    case Command::Sample: return "sample";
    case Command::Distributions: return "distributions";
    case Command::Model: return "model";
    case Command::Design: return "design";
    case Command::Simulate: return "simulate";
    case Command::Validate: return "validate";
  }
  return "?";
}

inline Command command_from_string(const std::string& s) {
  for (Command c : {Command::Spectrum, Command::Invert, Command::Sample, Command::Distributions, Command::Model,
                    Command::Design, Command::Simulate, Command::Validate}) {
    if (to_string(c) == s) return c;
  }
  throw InvalidInput("unknown command '" + s +
                     "' (expected spectrum, invert, sample, distributions, model, design, simulate or validate)");
}

struct RunConfig {
  Command command = Command::Spectrum;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  std::filesystem::path out = ".";

  // [input] paths, resolved against the config file's directory
  std::optional<std::filesystem::path> couplings;
  std::optional<std::filesystem::path> spectrum;
  std::optional<std::filesystem::path> geometry;
  std::optional<std::filesystem::path> design;

  // [inverse]
  std::map<std::size_t, double> pins;
  double tolerance = 1e-12;
  int max_iterations = 200;
  int max_restarts = 50;

  // [sample]
  std::size_t samples = 10;
  SurfaceDraw draw{};

  EnsembleSpec ensemble{};
  ModelKind model{};

  // [guide]
  GuideParams guide = GuideParams::standard(1.0);
  TurnPattern pattern = TurnPattern::Meander;
  std::vector<Turn> custom_turns;

  // [grid]
  long cells = 20;
  double arm = 8.0;

  // [simulate]
  bool write_modes = false;
  bool calibrate = true;

  // [validate]
  std::vector<PairShape> shapes{PairShape::U, PairShape::S};
  double d_from = 2.0;
  double d_to = 6.0;
  double d_step = 0.5;

  /// Grid spacing L / cells.
  double h() const { return guide.width / static_cast<double>(cells); }

  std::vector<double> separations() const {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((d_to - d_from) / d_step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(d_from + static_cast<double>(i) * d_step);
    return out;
  }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw InvalidInput(key + ": expected true or false, got '" + v + "'");
}

inline long parse_long(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size()) throw InvalidInput(key + ": '" + v + "' is not an integer");
  return out;
}

inline std::size_t parse_count(const std::string& v, const std::string& key) {
  const long n = parse_long(v, key);
  if (n < 0) throw InvalidInput(key + ": must be non-negative");
  return static_cast<std::size_t>(n);
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || v[0] == '-' || used != v.size()) throw InvalidInput(key + ": '" + v + "' is not an unsigned integer");
  return out;
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// `2:0.5, 4:1.25` -> {2: 0.5, 4: 1.25}.
inline std::map<std::size_t, double> parse_pins(const std::string& v, const std::string& key) {
  std::map<std::size_t, double> out;
  for (const auto& item : split_list(v)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidInput(key + ": expected index:value, got '" + item + "'");
    const std::size_t idx = parse_count(trim(item.substr(0, colon)), key);
    if (!out.emplace(idx, parse_double(item.substr(colon + 1), key)).second) {
      throw InvalidInput(key + ": coupling " + std::to_string(idx) + " pinned twice");
    }
  }
  return out;
}

}  // namespace detail

/// Parses config text. Relative input paths are resolved against
/// `base_dir`. Errors carry the line number.
inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
  RunConfig cfg;
  std::optional<double> width;
  std::map<std::string, double> guide_overrides;
  bool have_command = false;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto path = [&](std::optional<std::filesystem::path>& slot) {
    return [&slot, &base_dir](const std::string& v, const std::string&) {
      const std::filesystem::path p(v);
      slot = p.is_absolute() ? p : base_dir / p;
    };
  };
  auto real = [](double& slot) {
    return [&slot](const std::string& v, const std::string& k) { slot = detail::parse_double(v, k); };
  };
  auto count = [](std::size_t& slot) {
    return [&slot](const std::string& v, const std::string& k) { slot = detail::parse_count(v, k); };
  };
  auto integer = [](int& slot) {
    return [&slot](const std::string& v, const std::string& k) { slot = static_cast<int>(detail::parse_long(v, k)); };
  };
  auto guide_key = [&](const std::string& name) {
    return [&, name](const std::string& v, const std::string& k) { guide_overrides[name] = detail::parse_double(v, k); };
  };

  const std::map<std::string, std::map<std::string, Setter>> table = {
      {"run",
       {{"command",
         [&](const std::string& v, const std::string&) {
           cfg.command = command_from_string(v);
           have_command = true;
         }},
        {"seed", [&](const std::string& v, const std::string& k) { cfg.seed = detail::parse_u64(v, k); }},
        {"threads",
         [&](const std::string& v, const std::string& k) {
           cfg.threads = static_cast<unsigned>(detail::parse_count(v, k));
         }},
        {"out", [&](const std::string& v, const std::string&) { cfg.out = v; }}}},
      {"input",
       {{"couplings", path(cfg.couplings)},
        {"spectrum", path(cfg.spectrum)},
        {"geometry", path(cfg.geometry)},
        {"design", path(cfg.design)}}},
      {"inverse",
       {{"pins", [&](const std::string& v, const std::string& k) { cfg.pins = detail::parse_pins(v, k); }},
        {"tolerance", real(cfg.tolerance)},
        {"max_iterations", integer(cfg.max_iterations)},
        {"max_restarts", integer(cfg.max_restarts)}}},
      {"sample",
       {{"count", count(cfg.samples)},
        {"lower", real(cfg.draw.lower)},
        {"upper", real(cfg.draw.upper)},
        {"attempts", integer(cfg.draw.attempts)},
        {"restarts", integer(cfg.draw.restarts_per_attempt)}}},
      {"ensemble",
       {{"kind", [&](const std::string& v, const std::string&) { cfg.ensemble.kind = ensemble_kind_from_string(v); }},
        {"sites", count(cfg.ensemble.sites)},
        {"sigma", real(cfg.ensemble.sigma)},
        {"trials", count(cfg.ensemble.trials)},
        {"bins", count(cfg.ensemble.bins)},
        {"range_max", real(cfg.ensemble.range_max)},
        {"lower", real(cfg.ensemble.draw.lower)},
        {"upper", real(cfg.ensemble.draw.upper)}}},
      {"model",
       {{"name", [&](const std::string& v, const std::string&) { cfg.model.tag = model_tag_from_string(v); }},
        {"sites", count(cfg.model.sites)},
        {"m", real(cfg.model.m)},
        {"g", real(cfg.model.g)},
        {"c", real(cfg.model.c)}}},
      {"guide",
       {{"width", [&](const std::string& v, const std::string& k) { width = detail::parse_double(v, k); }},
        {"lambda", guide_key("lambda")},
        {"delta0", guide_key("delta0")},
        {"e_b", guide_key("e_b")},
        {"d_min", guide_key("d_min")},
        {"safety", guide_key("safety")},
        {"pattern", [&](const std::string& v, const std::string&) { cfg.pattern = turn_pattern_from_string(v); }},
        {"turns",
         [&](const std::string& v, const std::string&) {
           cfg.custom_turns.clear();
           for (const auto& t : detail::split_list(v)) cfg.custom_turns.push_back(turn_from_string(t));
         }}}},
      {"grid",
       {{"cells", [&](const std::string& v, const std::string& k) { cfg.cells = detail::parse_long(v, k); }},
        {"arm", real(cfg.arm)}}},
      {"simulate",
       {{"modes", [&](const std::string& v, const std::string& k) { cfg.write_modes = detail::parse_bool(v, k); }},
        {"calibrate", [&](const std::string& v, const std::string& k) { cfg.calibrate = detail::parse_bool(v, k); }}}},
      {"validate",
       {{"shapes",
         [&](const std::string& v, const std::string& k) {
           cfg.shapes.clear();
           for (const auto& s : detail::split_list(v)) {
             if (s == "U") {
               cfg.shapes.push_back(PairShape::U);
             } else if (s == "S") {
               cfg.shapes.push_back(PairShape::S);
             } else {
               throw InvalidInput(k + ": shape must be U or S, got '" + s + "'");
             }
           }
         }},
        {"from", real(cfg.d_from)},
        {"to", real(cfg.d_to)},
        {"step", real(cfg.d_step)}}},
  };

  std::istringstream is(text);
  std::string line;
  std::size_t n = 0;
  std::string section = "run";
  std::map<std::string, std::size_t> seen;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    const std::string t = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("unterminated section header '" + t + "'", n);
      section = detail::trim(t.substr(1, t.size() - 2));
      if (!table.contains(section)) throw ConfigError("unknown section [" + section + "]", n);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + t + "'", n);
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    const auto& keys = table.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", n);
    const std::string full = section + "." + key;
    if (seen.contains(full)) throw ConfigError("duplicate key '" + key + "' in [" + section + "]", n);
    seen[full] = n;
    if (value.empty()) throw ConfigError("key '" + key + "' has no value", n);
    try {
      it->second(value, full);
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what(), n);
    }
  }

  if (!have_command) throw ConfigError("missing required key 'command' in [run]");

  // guide defaults scale with the width; explicit values override them
  cfg.guide = GuideParams::standard(width.value_or(1.0));
  for (const auto& [key, v] : guide_overrides) {
    if (key == "lambda") cfg.guide.lambda = v;
    if (key == "delta0") cfg.guide.delta0 = v;
    if (key == "e_b") cfg.guide.e_b = v;
    if (key == "d_min") cfg.guide.d_min = v;
    if (key == "safety") cfg.guide.safety = v;
  }
  try {
    cfg.guide.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("[guide] ") + e.what());
  }
  cfg.ensemble.seed = cfg.seed;

  auto require = [&](bool ok, const std::string& field) {
    if (!ok) throw ConfigError("command '" + to_string(cfg.command) + "' requires " + field);
  };
  switch (cfg.command) {
    case Command::Spectrum: require(cfg.couplings.has_value(), "input.couplings"); break;
    case Command::Invert: require(cfg.spectrum.has_value(), "input.spectrum"); break;
    case Command::Sample: require(cfg.spectrum.has_value(), "input.spectrum"); break;
    case Command::Design: require(cfg.couplings.has_value(), "input.couplings"); break;
    case Command::Simulate: require(cfg.geometry.has_value(), "input.geometry"); break;
    case Command::Distributions:
    case Command::Model:
    case Command::Validate: break;
  }
  if (cfg.pattern == TurnPattern::Custom && cfg.custom_turns.empty()) {
    throw ConfigError("guide.pattern = custom requires guide.turns");
  }
  if (cfg.cells < 8) throw ConfigError("grid.cells must be at least 8");
  if (!(cfg.arm > 0.0)) throw ConfigError("grid.arm must be positive");
  if (cfg.samples < 1) throw ConfigError("sample.count must be at least 1");
  if (cfg.shapes.empty()) throw ConfigError("validate.shapes is empty");
  if (!(cfg.d_step > 0.0) || !(cfg.d_to >= cfg.d_from)) throw ConfigError("validate needs from <= to and step > 0");
  try {
    cfg.ensemble.validate();
    cfg.model.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot open config " + file.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str(), file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

}  // namespace invlat
