#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "critnet/config.hpp"
#include "critnet/damage.hpp"
#include "critnet/experiment.hpp"
#include "critnet/generators.hpp"
#include "critnet/io.hpp"
#include "critnet/metrics.hpp"
#include "critnet/tasks.hpp"
#include "critnet/version.hpp"

namespace {

std::string read_file_or_throw(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw critnet::ConfigError(0, "cannot read file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file_or_throw(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

struct GenerateArgs {
  std::string cls = "rbn";
  std::uint32_t n = 0;
  double k = 2.0;
  std::uint64_t seed = 0;
  std::string out;
  bool no_self = false;
  bool no_rules = false;
  double bias = 0.5;
  double sw_p = 0.0;
  std::string sw_dist = "uniform";
  double sw_alpha = 2.0;
  double sw_sigma = 2.0;
  bool sw_ring = false;
  std::uint32_t sw_k_base = 4;
};

void run_generate(const GenerateArgs& a) {
  critnet::RandomStream root(a.seed);
  critnet::Topology topo;
  std::optional<critnet::RuleSet> rules;
  if (a.cls == "small-world") {
    critnet::SmallWorldParams sw;
    sw.p = a.sw_p;
    sw.dist = critnet::shortcut_dist_from_string(a.sw_dist);
    sw.alpha = a.sw_alpha;
    sw.sigma = a.sw_sigma;
    sw.ring = a.sw_ring;
    sw.k_base = a.sw_k_base;
    auto topo_stream = root.child(0);
    topo = critnet::gen_small_world(
        sw.ring ? a.n : critnet::side_of(a.n), sw, topo_stream);
    if (!a.no_rules) {
      auto rule_stream = root.child(1);
      rules = critnet::sample_boolean_rules(topo, a.bias, rule_stream);
    }
  } else {
    const auto cls = critnet::net_class_from_string(a.cls);
    critnet::RealizeOptions opt;
    opt.bias = a.bias;
    opt.allow_self = !a.no_self;
    auto realized = critnet::realize_network(cls, a.n, a.k, root, opt);
    topo = std::move(realized.topology);
    if (!a.no_rules) rules = std::move(realized.rules);
  }
  std::ostringstream os;
  if (rules) critnet::write_network(topo, *rules, os);
  else critnet::write_topology(topo, os);
  if (a.out.empty()) std::cout << os.str();
  else write_file_or_throw(a.out, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critnet: damage spreading and topology lab for random "
               "dynamical networks"};
  app.set_version_flag("--version", std::string(critnet::kVersion));
  app.require_subcommand(1);

  // generate
  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "generate a network file");
  cmd_gen->add_option("--class", gen.cls, "network class")
      ->check(CLI::IsMember({"rbn", "rtn", "rbn-exact", "ca-lattice",
                             "ca-diluted", "small-world"}))
      ->required();
  cmd_gen->add_option("--n", gen.n, "number of nodes")->required();
  cmd_gen->add_option("--k", gen.k, "connectivity parameter");
  cmd_gen->add_option("--seed", gen.seed, "master seed")->required();
  cmd_gen->add_option("--out", gen.out, "output file (default: stdout)");
  cmd_gen->add_flag("--no-self", gen.no_self, "forbid self-connections");
  cmd_gen->add_flag("--no-rules", gen.no_rules, "emit topology only");
  cmd_gen->add_option("--bias", gen.bias, "Boolean rule bias");
  cmd_gen->add_option("--sw-p", gen.sw_p, "small-world rewiring probability");
  cmd_gen->add_option("--sw-dist", gen.sw_dist, "shortcut length distribution")
      ->check(CLI::IsMember({"uniform", "power-law", "gaussian"}));
  cmd_gen->add_option("--sw-alpha", gen.sw_alpha, "power-law exponent");
  cmd_gen->add_option("--sw-sigma", gen.sw_sigma, "gaussian width");
  cmd_gen->add_flag("--sw-ring", gen.sw_ring, "1D ring base lattice");
  cmd_gen->add_option("--sw-k-base", gen.sw_k_base, "base lattice degree");
  cmd_gen->callback([&] { run_generate(gen); });

  // run
  std::string run_target;
  std::uint64_t run_seed = 0;
  unsigned run_workers = 0;
  double run_scale = 0.0;
  std::string run_out;
  auto* cmd_run = app.add_subcommand("run", "run a preset or config file");
  cmd_run->add_option("target", run_target, "preset name or config file path")
      ->required();
  auto* opt_seed = cmd_run->add_option("--seed", run_seed, "master seed");
  auto* opt_workers =
      cmd_run->add_option("--workers", run_workers, "worker threads (0 = auto)");
  auto* opt_scale =
      cmd_run->add_option("--scale", run_scale, "ensemble scale multiplier");
  auto* opt_out = cmd_run->add_option("--out", run_out, "output directory");
  cmd_run->callback([&] {
    const auto& names = critnet::preset_names();
    critnet::ExperimentConfig cfg;
    if (std::find(names.begin(), names.end(), run_target) != names.end())
      cfg = critnet::make_preset_config(run_target);
    else
      cfg = critnet::parse_config(read_file_or_throw(run_target));
    if (opt_seed->count()) {
      cfg.seed = run_seed;
      cfg.seed_set = true;
    }
    if (opt_workers->count()) cfg.workers = run_workers;
    if (opt_scale->count()) cfg.scale = run_scale;
    if (opt_out->count()) cfg.out_dir = run_out;
    const auto result = critnet::run_experiment(cfg);
    for (const auto& f : result.files)
      std::cout << "wrote " << (std::filesystem::path(cfg.out_dir) / f).string()
                << '\n';
  });

  // ks
  std::string ks_in, ks_class;
  std::uint32_t ks_damage = 1;
  double ks_sig = 2.0, ks_disp = 0.25;
  auto* cmd_ks =
      app.add_subcommand("ks", "estimate K_s from a damage CSV");
  cmd_ks->add_option("--in", ks_in, "damage CSV path")->required();
  cmd_ks->add_option("--class", ks_class, "network class name")->required();
  cmd_ks->add_option("--damage-size", ks_damage, "damage size filter");
  cmd_ks->add_option("--sig-mult", ks_sig, "significance multiplier");
  cmd_ks->add_option("--dispersion-threshold", ks_disp,
                     "max dispersion for a common intersection");
  cmd_ks->callback([&] {
    std::istringstream is(read_file_or_throw(ks_in));
    const auto table = critnet::read_damage_csv(is);
    const auto est = critnet::estimate_ks(table, ks_class, ks_damage,
                                          {ks_sig, ks_disp});
    std::cout << "class=" << est.class_name << " damage_size=" << ks_damage
              << " has_intersection="
              << (est.has_intersection ? "true" : "false")
              << " k_s=" << critnet::fmt_fixed(est.k_s)
              << " dispersion=" << critnet::fmt_fixed(est.dispersion)
              << " n_crossings=" << est.crossings.size() << '\n';
    for (const auto& c : est.crossings)
      std::cout << "crossing class=" << est.class_name
                << " n_small=" << c.n_small << " n_large=" << c.n_large
                << " k=" << critnet::fmt_fixed(c.k) << '\n';
  });

  // metrics
  std::string metrics_in, metrics_out;
  double metrics_p = 0.0, metrics_alpha = 0.0;
  auto* cmd_metrics =
      app.add_subcommand("metrics", "graph metrics for a network file");
  cmd_metrics->add_option("--in", metrics_in, "network file path")->required();
  cmd_metrics->add_option("--out", metrics_out, "CSV output (default: stdout)");
  cmd_metrics->add_option("--p", metrics_p, "rewiring probability annotation");
  cmd_metrics->add_option("--alpha", metrics_alpha,
                          "distribution parameter annotation");
  cmd_metrics->callback([&] {
    std::istringstream is(read_file_or_throw(metrics_in));
    const auto net = critnet::read_network(is);
    critnet::MetricsRow row;
    row.n = net.topology.n_nodes;
    row.k = net.topology.mean_in_degree();
    row.class_name = critnet::to_string(net.topology.class_tag);
    row.p = metrics_p;
    row.alpha = metrics_alpha;
    row.report = critnet::compute_metrics(net.topology);
    std::ostringstream os;
    critnet::write_metrics_csv({row}, os);
    if (metrics_out.empty()) std::cout << os.str();
    else write_file_or_throw(metrics_out, os.str());
  });

  // tasks
  std::string task_kind = "density", task_class = "rbn", task_out,
              task_breakdown;
  std::uint32_t task_n = 49, task_n_ics = 50, task_t_run = 0, task_budget = 200;
  double task_k = 2.0;
  std::uint64_t task_seed = 0;
  unsigned task_workers = 1;
  auto* cmd_tasks =
      app.add_subcommand("tasks", "rule search on a benchmark task");
  cmd_tasks->add_option("--task", task_kind, "task kind")
      ->check(CLI::IsMember({"density", "synchronization"}));
  cmd_tasks->add_option("--class", task_class, "substrate class")
      ->check(CLI::IsMember({"rbn", "rbn-exact", "ca-lattice", "ca-diluted"}));
  cmd_tasks->add_option("--n", task_n, "number of nodes");
  cmd_tasks->add_option("--k", task_k, "connectivity");
  cmd_tasks->add_option("--n-ics", task_n_ics, "initial conditions per fitness");
  cmd_tasks->add_option("--t-run", task_t_run, "steps per IC (0 = 2N)");
  cmd_tasks->add_option("--budget", task_budget, "fitness evaluations");
  cmd_tasks->add_option("--seed", task_seed, "master seed")->required();
  cmd_tasks->add_option("--workers", task_workers, "worker threads");
  cmd_tasks->add_option("--out", task_out, "task CSV output path");
  cmd_tasks->add_option("--breakdown", task_breakdown,
                        "per-density breakdown CSV path");
  cmd_tasks->callback([&] {
    critnet::RandomStream root(task_seed);
    const auto cls = critnet::net_class_from_string(task_class);
    auto net_stream = root.child(0);
    const auto realized =
        critnet::realize_network(cls, task_n, task_k, net_stream);
    critnet::TaskSpec spec;
    spec.task = critnet::task_kind_from_string(task_kind);
    spec.t_run = task_t_run;
    spec.n_ics = task_n_ics;
    auto search_stream = root.child(1);
    const auto best = critnet::rule_search(realized.topology, spec, task_budget,
                                           search_stream, task_workers);
    std::cout << "task=" << task_kind << " class=" << task_class
              << " N=" << task_n << " K=" << critnet::fmt_fixed(task_k)
              << " fitness=" << critnet::fmt_fixed(best.report.fitness)
              << " evaluations=" << best.evaluations << '\n';
    if (!task_out.empty()) {
      critnet::TaskRow row;
      row.task = task_kind;
      row.class_name = task_class;
      row.n = task_n;
      row.k = task_k;
      row.fitness = best.report.fitness;
      row.budget = task_budget;
      row.seed = task_seed;
      std::ostringstream os;
      critnet::write_task_csv({row}, os);
      write_file_or_throw(task_out, os.str());
    }
    if (!task_breakdown.empty()) {
      std::ostringstream os;
      critnet::write_density_breakdown(best.report, os);
      write_file_or_throw(task_breakdown, os.str());
    }
  });

  // plotdata
  std::string plot_in, plot_dir = ".";
  auto* cmd_plot =
      app.add_subcommand("plotdata", "per-size plot files from a damage CSV");
  cmd_plot->add_option("--in", plot_in, "damage CSV path")->required();
  cmd_plot->add_option("--out-dir", plot_dir, "output directory");
  cmd_plot->callback([&] {
    std::istringstream is(read_file_or_throw(plot_in));
    const auto table = critnet::read_damage_csv(is);
    std::filesystem::create_directories(plot_dir);
    for (const auto& pf : critnet::emit_plotdata(table)) {
      const auto path = std::filesystem::path(plot_dir) /
                        ("plot_" + pf.class_name + "_N" +
                         std::to_string(pf.n) + ".dat");
      write_file_or_throw(path.string(), pf.content);
      std::cout << "wrote " << path.string() << '\n';
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const critnet::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
