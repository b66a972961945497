#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "critnet/damage.hpp"
#include "critnet/generators.hpp"
#include "critnet/io.hpp"
#include "critnet/tasks.hpp"

namespace critnet {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& msg)
      : std::runtime_error(line > 0
                               ? "config: line " + std::to_string(line) + ": " + msg
                               : "config: " + msg),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ExperimentConfig {
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned workers = 1;  // 0 = hardware concurrency
  double scale = 1.0;
  std::string out_dir = "out";

  std::vector<std::string> classes = {"rbn"};
  std::vector<std::uint32_t> sizes = {64, 256, 1024};
  double k_min = 0.25;
  double k_max = 4.0;
  double k_step = 0.125;
  std::uint32_t damage_size = 1;
  std::uint32_t t_measure = 200;
  std::uint32_t window = 1;
  std::uint32_t n_networks = 500;  // base count, scaled at run time
  std::uint32_t n_ics = 20;        // base count, scaled at run time

  double bias = 0.5;
  std::string sign_zero = "negative";
  bool allow_self = true;

  double ks_sig_mult = 2.0;
  double ks_dispersion_threshold = 0.25;

  double sw_p = 0.1;
  std::string sw_dist = "uniform";
  double sw_alpha = 2.0;
  double sw_sigma = 2.0;
  bool sw_ring = false;
  std::uint32_t sw_k_base = 4;

  std::uint32_t metrics_sw_n = 1024;
  std::uint32_t metrics_perco_n = 4096;
  std::uint32_t metrics_reps = 10;
  std::vector<double> metrics_p_list = {0.0,  0.001, 0.003, 0.01,
                                        0.03, 0.1,   0.3,   1.0};

  std::string task_kind = "density";
  std::string task_class = "rbn";
  std::uint32_t task_n = 49;
  double task_k = 2.0;
  std::uint32_t task_n_ics = 50;
  std::uint32_t task_t_run = 0;
  std::uint32_t task_budget = 200;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Ensemble counts after applying the scale multiplier: network count
/// scales linearly (floor 1); the IC count scales linearly but keeps a
/// floor of min(base, 20) so per-network averages stay meaningful.
struct ScaledEnsembles {
  std::uint32_t n_networks = 0;
  std::uint32_t n_ics = 0;
};

inline ScaledEnsembles apply_scale(std::uint32_t base_networks,
                                   std::uint32_t base_ics, double scale) {
  ScaledEnsembles out;
  out.n_networks = static_cast<std::uint32_t>(
      std::max<long>(1, std::lround(base_networks * scale)));
  const auto floor_ics = std::min<std::uint32_t>(base_ics, 20);
  out.n_ics = static_cast<std::uint32_t>(std::max<long>(
      floor_ics, std::lround(base_ics * scale)));
  return out;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "fig3-rbn", "fig3-rtn",    "fig4-d1",       "fig5-d10",
      "fig6-d20", "ks-estimate", "metrics-sweep", "task-eval"};
  return names;
}

inline ExperimentConfig make_preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.preset = name;
  auto fig3 = [&](const std::string& cls) {
    cfg.classes = {cls};
    cfg.sizes = {64, 256, 1024};
    cfg.k_min = 1.0;
    cfg.k_max = 3.0;
    cfg.k_step = 0.125;
    cfg.damage_size = 1;
    cfg.n_networks = 10000;
    cfg.n_ics = 100;
  };
  auto fig_ca = [&](std::uint32_t damage) {
    cfg.classes = {"rbn", "ca-diluted"};
    cfg.sizes = {256, 1024, 4096};
    cfg.k_min = 0.25;
    cfg.k_max = 4.0;
    cfg.k_step = 0.125;
    cfg.damage_size = damage;
    cfg.n_networks = 100;
    cfg.n_ics = 100;
  };
  if (name == "fig3-rbn") fig3("rbn");
  else if (name == "fig3-rtn") fig3("rtn");
  else if (name == "fig4-d1") fig_ca(1);
  else if (name == "fig5-d10") fig_ca(10);
  else if (name == "fig6-d20") fig_ca(20);
  else if (name == "ks-estimate") {
    fig3("rbn");
    cfg.classes = {"rbn", "rtn"};
  } else if (name == "metrics-sweep" || name == "task-eval") {
    // defaults already describe these
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return cfg;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::uint64_t cfg_u64(std::string_view v, std::size_t line) {
  try {
    return parse_u64(v, "value");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, e.what());
  }
}

inline double cfg_double(std::string_view v, std::size_t line) {
  try {
    return parse_double(v, "value");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, e.what());
  }
}

inline bool cfg_bool(std::string_view v, std::size_t line) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(line, "expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<std::string> cfg_string_list(std::string_view v) {
  std::vector<std::string> out;
  for (auto part : split(v, ','))
    if (auto t = trim(part); !t.empty()) out.emplace_back(t);
  return out;
}

}  // namespace detail

/// Applies one `section.key = value` assignment; false when unknown.
inline bool apply_config_key(ExperimentConfig& cfg, std::string_view key,
                             std::string_view value, std::size_t line) {
  using detail::cfg_bool;
  using detail::cfg_double;
  using detail::cfg_u64;
  auto u32 = [&](std::string_view v) {
    return static_cast<std::uint32_t>(cfg_u64(v, line));
  };
  if (key == "run.preset") {
    cfg.preset = std::string(value);
  } else if (key == "run.seed") {
    cfg.seed = cfg_u64(value, line);
    cfg.seed_set = true;
  } else if (key == "run.workers") {
    cfg.workers = u32(value);
  } else if (key == "run.scale") {
    cfg.scale = cfg_double(value, line);
  } else if (key == "run.out") {
    cfg.out_dir = std::string(value);
  } else if (key == "damage.classes") {
    cfg.classes = detail::cfg_string_list(value);
    for (const auto& c : cfg.classes) {
      try {
        net_class_from_string(c);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line, e.what());
      }
    }
  } else if (key == "damage.sizes") {
    cfg.sizes.clear();
    for (const auto& s : detail::cfg_string_list(value))
      cfg.sizes.push_back(u32(s));
  } else if (key == "damage.k_min") {
    cfg.k_min = cfg_double(value, line);
  } else if (key == "damage.k_max") {
    cfg.k_max = cfg_double(value, line);
  } else if (key == "damage.k_step") {
    cfg.k_step = cfg_double(value, line);
  } else if (key == "damage.damage_size") {
    cfg.damage_size = u32(value);
  } else if (key == "damage.t_measure") {
    cfg.t_measure = u32(value);
  } else if (key == "damage.window") {
    cfg.window = u32(value);
  } else if (key == "damage.n_networks") {
    cfg.n_networks = u32(value);
  } else if (key == "damage.n_ics") {
    cfg.n_ics = u32(value);
  } else if (key == "rules.bias") {
    cfg.bias = cfg_double(value, line);
  } else if (key == "rules.sign_zero") {
    if (value != "negative" && value != "positive")
      throw ConfigError(line, "rules.sign_zero must be negative or positive");
    cfg.sign_zero = std::string(value);
  } else if (key == "topology.allow_self") {
    cfg.allow_self = cfg_bool(value, line);
  } else if (key == "ks.sig_mult") {
    cfg.ks_sig_mult = cfg_double(value, line);
  } else if (key == "ks.dispersion_threshold") {
    cfg.ks_dispersion_threshold = cfg_double(value, line);
  } else if (key == "sw.p") {
    cfg.sw_p = cfg_double(value, line);
  } else if (key == "sw.dist") {
    if (value != "uniform" && value != "power-law" && value != "gaussian")
      throw ConfigError(line, "sw.dist must be uniform, power-law, or gaussian");
    cfg.sw_dist = std::string(value);
  } else if (key == "sw.alpha") {
    cfg.sw_alpha = cfg_double(value, line);
  } else if (key == "sw.sigma") {
    cfg.sw_sigma = cfg_double(value, line);
  } else if (key == "sw.ring") {
    cfg.sw_ring = cfg_bool(value, line);
  } else if (key == "sw.k_base") {
    cfg.sw_k_base = u32(value);
  } else if (key == "metrics.sw_n") {
    cfg.metrics_sw_n = u32(value);
  } else if (key == "metrics.perco_n") {
    cfg.metrics_perco_n = u32(value);
  } else if (key == "metrics.reps") {
    cfg.metrics_reps = u32(value);
  } else if (key == "metrics.p_list") {
    cfg.metrics_p_list.clear();
    for (const auto& s : detail::cfg_string_list(value))
      cfg.metrics_p_list.push_back(cfg_double(s, line));
  } else if (key == "task.kind") {
    if (value != "density" && value != "synchronization")
      throw ConfigError(line, "task.kind must be density or synchronization");
    cfg.task_kind = std::string(value);
  } else if (key == "task.class") {
    try {
      net_class_from_string(std::string(value));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, e.what());
    }
    cfg.task_class = std::string(value);
  } else if (key == "task.n") {
    cfg.task_n = u32(value);
  } else if (key == "task.k") {
    cfg.task_k = cfg_double(value, line);
  } else if (key == "task.n_ics") {
    cfg.task_n_ics = u32(value);
  } else if (key == "task.t_run") {
    cfg.task_t_run = u32(value);
  } else if (key == "task.budget") {
    cfg.task_budget = u32(value);
  } else {
    return false;
  }
  return true;
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (!cfg.seed_set) throw ConfigError(0, "missing required key run.seed");
  if (!(cfg.scale > 0.0 && cfg.scale <= 1.0))
    throw ConfigError(0, "run.scale must be in (0, 1]");
  if (cfg.classes.empty()) throw ConfigError(0, "damage.classes is empty");
  if (cfg.sizes.empty()) throw ConfigError(0, "damage.sizes is empty");
  if (cfg.k_step <= 0.0) throw ConfigError(0, "damage.k_step must be > 0");
  if (cfg.k_max < cfg.k_min)
    throw ConfigError(0, "damage.k_max must be >= damage.k_min");
  if (cfg.damage_size < 1) throw ConfigError(0, "damage.damage_size must be >= 1");
  if (cfg.t_measure < 1) throw ConfigError(0, "damage.t_measure must be >= 1");
  if (cfg.window < 1 || cfg.window > cfg.t_measure)
    throw ConfigError(0, "damage.window must be in [1, t_measure]");
  if (cfg.n_networks < 1 || cfg.n_ics < 1)
    throw ConfigError(0, "ensemble counts must be >= 1");
  if (cfg.bias < 0.0 || cfg.bias > 1.0)
    throw ConfigError(0, "rules.bias must be in [0, 1]");
  if (cfg.sw_p < 0.0 || cfg.sw_p > 1.0)
    throw ConfigError(0, "sw.p must be in [0, 1]");
  if (cfg.sw_alpha <= 0.0) throw ConfigError(0, "sw.alpha must be > 0");
  if (cfg.sw_sigma <= 0.0) throw ConfigError(0, "sw.sigma must be > 0");
  if (cfg.metrics_reps < 1) throw ConfigError(0, "metrics.reps must be >= 1");
  for (double p : cfg.metrics_p_list)
    if (p < 0.0 || p > 1.0)
      throw ConfigError(0, "metrics.p_list entries must be in [0, 1]");
  if (cfg.task_budget < 1) throw ConfigError(0, "task.budget must be >= 1");
  if (cfg.task_n_ics < 1) throw ConfigError(0, "task.n_ics must be >= 1");
  if (!cfg.preset.empty()) make_preset_config(cfg.preset);
}

/// Parses `section.key = value` text.  A run.preset assignment seeds the
/// defaults; every other key then overrides.  Unknown keys, malformed
/// lines, and a missing run.seed are errors.
inline ExperimentConfig parse_config(std::string_view text) {
  struct Entry {
    std::string key, value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::size_t line_no = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line_no, "expected key = value");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    entries.push_back({std::string(key), std::string(value), line_no});
  }
  ExperimentConfig cfg;
  for (const auto& e : entries)
    if (e.key == "run.preset") {
      try {
        cfg = make_preset_config(e.value);
      } catch (const std::invalid_argument& err) {
        throw ConfigError(e.line, err.what());
      }
    }
  for (const auto& e : entries)
    if (!apply_config_key(cfg, e.key, e.value, e.line))
      throw ConfigError(e.line, "unknown key: " + e.key);
  validate_config(cfg);
  return cfg;
}

/// Canonical rendering; parse(render(cfg)) == cfg.
inline std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  auto kv = [&](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  auto join_u32 = [](const std::vector<std::uint32_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  auto join_double = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + fmt_double(v[i]);
    return s;
  };
  auto join_str = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  };
  if (!cfg.preset.empty()) kv("run.preset", cfg.preset);
  kv("run.seed", std::to_string(cfg.seed));
  kv("run.workers", std::to_string(cfg.workers));
  kv("run.scale", fmt_double(cfg.scale));
  kv("run.out", cfg.out_dir);
  kv("damage.classes", join_str(cfg.classes));
  kv("damage.sizes", join_u32(cfg.sizes));
  kv("damage.k_min", fmt_double(cfg.k_min));
  kv("damage.k_max", fmt_double(cfg.k_max));
  kv("damage.k_step", fmt_double(cfg.k_step));
  kv("damage.damage_size", std::to_string(cfg.damage_size));
  kv("damage.t_measure", std::to_string(cfg.t_measure));
  kv("damage.window", std::to_string(cfg.window));
  kv("damage.n_networks", std::to_string(cfg.n_networks));
  kv("damage.n_ics", std::to_string(cfg.n_ics));
  kv("rules.bias", fmt_double(cfg.bias));
  kv("rules.sign_zero", cfg.sign_zero);
  kv("topology.allow_self", cfg.allow_self ? "true" : "false");
  kv("ks.sig_mult", fmt_double(cfg.ks_sig_mult));
  kv("ks.dispersion_threshold", fmt_double(cfg.ks_dispersion_threshold));
  kv("sw.p", fmt_double(cfg.sw_p));
  kv("sw.dist", cfg.sw_dist);
  kv("sw.alpha", fmt_double(cfg.sw_alpha));
  kv("sw.sigma", fmt_double(cfg.sw_sigma));
  kv("sw.ring", cfg.sw_ring ? "true" : "false");
  kv("sw.k_base", std::to_string(cfg.sw_k_base));
  kv("metrics.sw_n", std::to_string(cfg.metrics_sw_n));
  kv("metrics.perco_n", std::to_string(cfg.metrics_perco_n));
  kv("metrics.reps", std::to_string(cfg.metrics_reps));
  kv("metrics.p_list", join_double(cfg.metrics_p_list));
  kv("task.kind", cfg.task_kind);
  kv("task.class", cfg.task_class);
  kv("task.n", std::to_string(cfg.task_n));
  kv("task.k", fmt_double(cfg.task_k));
  kv("task.n_ics", std::to_string(cfg.task_n_ics));
  kv("task.t_run", std::to_string(cfg.task_t_run));
  kv("task.budget", std::to_string(cfg.task_budget));
  return out;
}

}  // namespace critnet
