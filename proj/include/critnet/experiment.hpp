#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "critnet/config.hpp"
#include "critnet/damage.hpp"
#include "critnet/generators.hpp"
#include "critnet/io.hpp"
#include "critnet/metrics.hpp"
#include "critnet/tasks.hpp"
#include "critnet/version.hpp"

namespace critnet {

inline std::vector<double> make_k_grid(double k_min, double k_max,
                                       double k_step) {
  if (k_step <= 0) throw std::invalid_argument("k_step must be > 0");
  std::vector<double> grid;
  const auto count =
      static_cast<std::size_t>(std::floor((k_max - k_min) / k_step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) grid.push_back(k_min + i * k_step);
  return grid;
}

inline SignZero sign_zero_from_string(const std::string& s) {
  return s == "positive" ? SignZero::positive : SignZero::negative;
}

inline ShortcutDist shortcut_dist_from_string(const std::string& s) {
  if (s == "uniform") return ShortcutDist::uniform;
  if (s == "power-law") return ShortcutDist::power_law;
  if (s == "gaussian") return ShortcutDist::gaussian;
  throw std::invalid_argument("unknown shortcut distribution: " + s);
}

struct RunResult {
  std::vector<std::string> files;  // paths written, relative to out_dir
};

namespace detail {

inline void write_output_file(const std::filesystem::path& dir,
                              const std::string& name,
                              const std::string& content,
                              RunResult& result) {
  const auto path = dir / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path.string());
  result.files.push_back(name);
}

inline std::string ks_summary_text(const DamageTable& table,
                                   const ExperimentConfig& cfg) {
  std::string out;
  KsOptions opt{cfg.ks_sig_mult, cfg.ks_dispersion_threshold};
  for (const auto& cls : cfg.classes) {
    if (cfg.sizes.size() < 2) {
      out += "class=" + cls + " error=need at least 2 system sizes\n";
      continue;
    }
    const auto est = estimate_ks(table, cls, cfg.damage_size, opt);
    out += "class=" + cls + " damage_size=" + std::to_string(cfg.damage_size) +
           " has_intersection=" + (est.has_intersection ? "true" : "false") +
           " k_s=" + fmt_fixed(est.k_s) + " dispersion=" +
           fmt_fixed(est.dispersion) +
           " n_crossings=" + std::to_string(est.crossings.size()) + "\n";
    for (const auto& c : est.crossings)
      out += "crossing class=" + cls + " n_small=" + std::to_string(c.n_small) +
             " n_large=" + std::to_string(c.n_large) + " k=" + fmt_fixed(c.k) +
             "\n";
  }
  return out;
}

inline std::string manifest_text(const ExperimentConfig& cfg,
                                 const ScaledEnsembles& ens) {
  std::string out = "# critnet " + std::string(kVersion) + "\n";
  out += "# seed " + std::to_string(cfg.seed) + "\n";
  out += "# effective n_networks " + std::to_string(ens.n_networks) + "\n";
  out += "# effective n_ics " + std::to_string(ens.n_ics) + "\n";
  out += render_config(cfg);
  return out;
}

inline RunResult run_damage_pipeline(const ExperimentConfig& cfg,
                                     const std::filesystem::path& out_dir) {
  RunResult result;
  const auto ens = apply_scale(cfg.n_networks, cfg.n_ics, cfg.scale);
  DamageSweepSpec spec;
  for (const auto& c : cfg.classes)
    spec.classes.push_back(net_class_from_string(c));
  spec.n_list = cfg.sizes;
  spec.k_grid = make_k_grid(cfg.k_min, cfg.k_max, cfg.k_step);
  spec.ens.damage_size = cfg.damage_size;
  spec.ens.t_measure = cfg.t_measure;
  spec.ens.window = cfg.window;
  spec.ens.n_networks = ens.n_networks;
  spec.ens.n_ics = ens.n_ics;
  spec.ens.realize.bias = cfg.bias;
  spec.ens.realize.sign_zero = sign_zero_from_string(cfg.sign_zero);
  spec.ens.realize.allow_self = cfg.allow_self;

  RandomStream root(cfg.seed);
  const auto table = damage_sweep(spec, root, cfg.workers);

  std::ostringstream csv;
  write_damage_csv(table, csv);
  write_output_file(out_dir, "damage.csv", csv.str(), result);

  for (const auto& pf : emit_plotdata(table))
    write_output_file(out_dir,
                      "plot_" + pf.class_name + "_N" + std::to_string(pf.n) +
                          ".dat",
                      pf.content, result);

  if (cfg.sizes.size() >= 2)
    write_output_file(out_dir, "ks_summary.txt", ks_summary_text(table, cfg),
                      result);

  if (!table.skipped.empty()) {
    std::string skipped;
    for (const auto& s : table.skipped)
      skipped += s.class_name + " N=" + std::to_string(s.n) +
                 " K=" + fmt_fixed(s.k) + " reason=" + s.reason + "\n";
    write_output_file(out_dir, "skipped_cells.txt", skipped, result);
  }

  write_output_file(out_dir, "manifest.txt", manifest_text(cfg, ens), result);
  return result;
}

inline RunResult run_metrics_pipeline(const ExperimentConfig& cfg,
                                      const std::filesystem::path& out_dir) {
  RunResult result;
  RandomStream root(cfg.seed);

  std::vector<MetricsRow> rows;
  const std::vector<std::string> dists = {"uniform", "power-law", "gaussian"};
  auto sw_root = root.child(0);
  std::uint64_t item = 0;
  for (const auto& dist : dists) {
    for (double p : cfg.metrics_p_list) {
      for (std::uint32_t rep = 0; rep < cfg.metrics_reps; ++rep) {
        auto stream = sw_root.child(item++);
        SmallWorldParams sw;
        sw.p = p;
        sw.dist = shortcut_dist_from_string(dist);
        sw.alpha = cfg.sw_alpha;
        sw.sigma = cfg.sw_sigma;
        sw.ring = cfg.sw_ring;
        sw.k_base = cfg.sw_k_base;
        const auto topo = gen_small_world(
            sw.ring ? cfg.metrics_sw_n : side_of(cfg.metrics_sw_n), sw, stream);
        MetricsRow row;
        row.n = cfg.metrics_sw_n;
        row.k = sw.k_base;
        row.class_name = "small-world-" + dist;
        row.p = p;
        row.alpha = dist == "power-law" ? cfg.sw_alpha
                    : dist == "gaussian" ? cfg.sw_sigma
                                         : 0.0;
        row.report = compute_metrics(topo);
        rows.push_back(std::move(row));
      }
    }
  }
  std::ostringstream csv;
  write_metrics_csv(rows, csv);
  write_output_file(out_dir, "metrics.csv", csv.str(), result);

  auto perco_root = root.child(1);
  const auto grid = make_k_grid(0.25, 4.0, 0.125);
  std::string perco = "N,K,weak_largest_frac,strong_largest_frac,"
                      "mean_components,reps\n";
  item = 0;
  for (double k : grid) {
    double weak = 0.0, strong = 0.0, ncomp = 0.0;
    for (std::uint32_t rep = 0; rep < cfg.metrics_reps; ++rep) {
      auto stream = perco_root.child(item++);
      const auto topo = gen_ca_diluted(side_of(cfg.metrics_perco_n), k, stream);
      const auto comp = components(topo);
      weak += comp.largest_fraction;
      ncomp += comp.n_components;
      strong += strong_components(topo).largest_fraction;
    }
    perco += std::to_string(cfg.metrics_perco_n) + "," + fmt_fixed(k) + "," +
             fmt_fixed(weak / cfg.metrics_reps) + "," +
             fmt_fixed(strong / cfg.metrics_reps) + "," +
             fmt_fixed(ncomp / cfg.metrics_reps) + "," +
             std::to_string(cfg.metrics_reps) + "\n";
  }
  write_output_file(out_dir, "percolation.csv", perco, result);

  const auto ens = apply_scale(cfg.n_networks, cfg.n_ics, cfg.scale);
  write_output_file(out_dir, "manifest.txt", manifest_text(cfg, ens), result);
  return result;
}

inline RunResult run_task_pipeline(const ExperimentConfig& cfg,
                                   const std::filesystem::path& out_dir) {
  RunResult result;
  RandomStream root(cfg.seed);
  const auto cls = net_class_from_string(cfg.task_class);
  RealizeOptions ropt;
  ropt.bias = cfg.bias;
  ropt.allow_self = cfg.allow_self;
  auto net_stream = root.child(0);
  const auto realized =
      realize_network(cls, cfg.task_n, cfg.task_k, net_stream, ropt);

  TaskSpec spec;
  spec.task = task_kind_from_string(cfg.task_kind);
  spec.t_run = cfg.task_t_run;
  spec.n_ics = cfg.task_n_ics;
  auto search_stream = root.child(1);
  const auto best = rule_search(realized.topology, spec, cfg.task_budget,
                                search_stream, cfg.workers);

  TaskRow row;
  row.task = to_string(spec.task);
  row.class_name = cfg.task_class;
  row.n = cfg.task_n;
  row.k = cfg.task_k;
  row.fitness = best.report.fitness;
  row.budget = cfg.task_budget;
  row.seed = cfg.seed;
  std::ostringstream csv;
  write_task_csv({row}, csv);
  write_output_file(out_dir, "tasks.csv", csv.str(), result);

  std::ostringstream breakdown;
  write_density_breakdown(best.report, breakdown);
  write_output_file(out_dir, "task_breakdown.csv", breakdown.str(), result);

  const auto ens = apply_scale(cfg.n_networks, cfg.n_ics, cfg.scale);
  write_output_file(out_dir, "manifest.txt", manifest_text(cfg, ens), result);
  return result;
}

}  // namespace detail

/// Executes the configured experiment and writes its artifact files into
/// the config's output directory.  The pipeline follows the preset family:
/// damage sweeps (the default for explicit configs), the metrics sweep, or
/// the task harness.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const std::filesystem::path out_dir = cfg.out_dir;
  std::filesystem::create_directories(out_dir);
  if (cfg.preset == "metrics-sweep")
    return detail::run_metrics_pipeline(cfg, out_dir);
  if (cfg.preset == "task-eval") return detail::run_task_pipeline(cfg, out_dir);
  return detail::run_damage_pipeline(cfg, out_dir);
}

}  // namespace critnet
