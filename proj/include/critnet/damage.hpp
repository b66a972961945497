#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "critnet/dynamics.hpp"
#include "critnet/generators.hpp"
#include "critnet/parallel.hpp"
#include "critnet/rng.hpp"
#include "critnet/rules.hpp"
#include "critnet/state.hpp"
#include "critnet/topology.hpp"

namespace critnet {

enum class NetClass { rbn, rtn, rbn_exact, ca_lattice, ca_diluted };

inline std::string to_string(NetClass c) {
  switch (c) {
    case NetClass::rbn: return "rbn";
    case NetClass::rtn: return "rtn";
    case NetClass::rbn_exact: return "rbn-exact";
    case NetClass::ca_lattice: return "ca-lattice";
    case NetClass::ca_diluted: return "ca-diluted";
  }
  return "?";
}

inline NetClass net_class_from_string(const std::string& s) {
  if (s == "rbn") return NetClass::rbn;
  if (s == "rtn") return NetClass::rtn;
  if (s == "rbn-exact") return NetClass::rbn_exact;
  if (s == "ca-lattice") return NetClass::ca_lattice;
  if (s == "ca-diluted") return NetClass::ca_diluted;
  throw std::invalid_argument("unknown network class: " + s);
}

struct RealizeOptions {
  double bias = 0.5;
  SignZero sign_zero = SignZero::negative;
  bool allow_self = true;
};

struct RealizedNet {
  Topology topology;
  RuleSet rules;
};

/// Fresh topology + rules for one ensemble member.  Children 0 and 1 of
/// `stream` drive wiring and rules respectively; further children are
/// left to the caller for initial conditions.
inline RealizedNet realize_network(NetClass cls, std::uint32_t n, double k,
                                   const RandomStream& stream,
                                   const RealizeOptions& opt = {}) {
  auto topo_stream = stream.child(0);
  auto rule_stream = stream.child(1);
  Topology topo;
  switch (cls) {
    case NetClass::rbn:
    case NetClass::rtn:
      topo = gen_random_avg(n, k, opt.allow_self, topo_stream);
      break;
    case NetClass::rbn_exact:
      topo = gen_rbn_exact(n, static_cast<std::uint32_t>(std::lround(k)),
                           opt.allow_self, topo_stream);
      break;
    case NetClass::ca_lattice:
      topo = gen_ca_lattice(side_of(n));
      break;
    case NetClass::ca_diluted:
      topo = gen_ca_diluted(side_of(n), k, topo_stream);
      break;
  }
  RuleSet rules = cls == NetClass::rtn
                      ? sample_threshold_rules(topo, rule_stream, opt.sign_zero)
                      : sample_boolean_rules(topo, opt.bias, rule_stream);
  return {std::move(topo), std::move(rules)};
}

/// Like node_update, but reads the perturbed copy's inputs as the
/// reference state XOR a difference mask, so the copy is never stored.
inline bool node_update_masked(const Topology& t, const RuleSet& r,
                               const NetworkState& a, const NetworkState& mask,
                               std::uint32_t i) {
  const auto edges = t.in_edges(i);
  if (r.kind == RuleKind::boolean_lut) {
    std::uint64_t row = 0;
    for (std::size_t j = 0; j < edges.size(); ++j)
      row |= static_cast<std::uint64_t>(a.get(edges[j]) ^ mask.get(edges[j])) << j;
    return r.lut_entry(i, row);
  }
  int sum = 0;
  const auto base = t.in_offsets[i];
  for (std::size_t j = 0; j < edges.size(); ++j)
    sum += r.weight_sign(base + j) *
           ((a.get(edges[j]) ^ mask.get(edges[j])) ? 1 : -1);
  if (sum > 0) return true;
  if (sum < 0) return false;
  return r.sign_zero == SignZero::positive;
}

/// Reference/perturbed trajectory pair evolved together.  The reference
/// state advances with full synchronous steps; the perturbed copy exists
/// only as a difference mask, updated by recomputing the out-neighbors of
/// currently differing nodes.  Once the difference set is empty the two
/// trajectories have merged for good.
class DamagePair {
 public:
  DamagePair(const Topology& t, const RuleSet& r, const OutAdjacency& out)
      : t_(&t),
        r_(&r),
        out_(&out),
        a_cur_(t.n_nodes),
        a_next_(t.n_nodes),
        mask_cur_(t.n_nodes),
        mask_next_(t.n_nodes),
        stamp_(t.n_nodes, 0) {}

  void reset(const NetworkState& initial,
             std::span<const NodeId> damage_nodes) {
    if (initial.size() != t_->n_nodes)
      throw std::invalid_argument("damage pair: state size does not match topology");
    a_cur_ = initial;
    for (auto d : diff_) mask_cur_.set(d, false);
    diff_.clear();
    for (auto d : damage_nodes) {
      if (d >= t_->n_nodes)
        throw std::invalid_argument("damage pair: damage node out of range");
      if (mask_cur_.get(d))
        throw std::invalid_argument("damage pair: duplicate damage node");
      mask_cur_.set(d, true);
      diff_.push_back(d);
    }
  }

  std::uint64_t damage() const { return diff_.size(); }
  bool converged() const { return diff_.empty(); }
  const NetworkState& reference() const { return a_cur_; }

  NetworkState perturbed() const {
    NetworkState b = a_cur_;
    for (auto d : diff_) b.flip(d);
    return b;
  }

  void step() {
    step_into(*t_, *r_, a_cur_, a_next_);
    ++epoch_;
    next_diff_.clear();
    for (auto d : diff_) {
      for (auto c : out_->out_edges(d)) {
        if (stamp_[c] == epoch_) continue;
        stamp_[c] = epoch_;
        if (node_update_masked(*t_, *r_, a_cur_, mask_cur_, c) !=
            a_next_.get(c)) {
          mask_next_.set(c, true);
          next_diff_.push_back(c);
        }
      }
    }
    std::swap(a_cur_, a_next_);
    for (auto d : diff_) mask_cur_.set(d, false);
    std::swap(mask_cur_, mask_next_);
    std::swap(diff_, next_diff_);
  }

 private:
  const Topology* t_;
  const RuleSet* r_;
  const OutAdjacency* out_;
  NetworkState a_cur_, a_next_;
  NetworkState mask_cur_, mask_next_;  // XOR of perturbed vs reference
  std::vector<NodeId> diff_, next_diff_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
};

/// Hamming distance between the perturbed and unperturbed trajectories at
/// t = t_measure.
inline std::uint64_t damage_trial(const Topology& t, const RuleSet& r,
                                  const OutAdjacency& out,
                                  const NetworkState& ic,
                                  std::span<const NodeId> damage_nodes,
                                  std::uint64_t t_measure) {
  DamagePair pair(t, r, out);
  pair.reset(ic, damage_nodes);
  for (std::uint64_t s = 0; s < t_measure && !pair.converged(); ++s)
    pair.step();
  return pair.damage();
}

inline std::uint64_t damage_trial(const Topology& t, const RuleSet& r,
                                  const NetworkState& ic,
                                  std::span<const NodeId> damage_nodes,
                                  std::uint64_t t_measure) {
  return damage_trial(t, r, build_out_adjacency(t), ic, damage_nodes, t_measure);
}

/// Damage averaged over the last `window` instants ending at t_measure
/// (window = 1 reproduces the single-instant measurement).
inline double damage_trial_mean(const Topology& t, const RuleSet& r,
                                const OutAdjacency& out, const NetworkState& ic,
                                std::span<const NodeId> damage_nodes,
                                std::uint64_t t_measure, std::uint64_t window) {
  if (window < 1 || window > t_measure)
    throw std::invalid_argument("damage window must be in [1, t_measure]");
  DamagePair pair(t, r, out);
  pair.reset(ic, damage_nodes);
  const std::uint64_t first = t_measure - window + 1;
  double acc = 0.0;
  for (std::uint64_t s = 1; s <= t_measure; ++s) {
    if (pair.converged()) break;
    pair.step();
    if (s >= first) acc += static_cast<double>(pair.damage());
  }
  return acc / static_cast<double>(window);
}

/// Per-step Hamming trace; element 0 is the initial damage size.
inline std::vector<std::uint64_t> damage_timeseries(
    const Topology& t, const RuleSet& r, const NetworkState& ic,
    std::span<const NodeId> damage_nodes, std::uint64_t t_max) {
  const auto out = build_out_adjacency(t);
  DamagePair pair(t, r, out);
  pair.reset(ic, damage_nodes);
  std::vector<std::uint64_t> trace;
  trace.reserve(t_max + 1);
  trace.push_back(pair.damage());
  for (std::uint64_t s = 0; s < t_max; ++s) {
    if (!pair.converged()) pair.step();
    trace.push_back(pair.damage());
  }
  return trace;
}

struct DamageEnsembleSpec {
  std::uint32_t damage_size = 1;
  std::uint32_t t_measure = 200;
  std::uint32_t window = 1;
  std::uint32_t n_networks = 500;
  std::uint32_t n_ics = 20;
  RealizeOptions realize;
};

struct DamageRow {
  std::string class_name;
  std::uint32_t n = 0;
  double k = 0.0;
  std::uint32_t damage_size = 1;
  double mean_damage = 0.0;
  double std_error = 0.0;
  std::uint32_t n_networks = 0;
  std::uint32_t n_ics = 0;
  std::uint32_t t_measure = 0;
  std::uint64_t seed = 0;
};

struct SkippedCell {
  std::string class_name;
  std::uint32_t n = 0;
  double k = 0.0;
  std::string reason;
};

struct DamageTable {
  std::vector<DamageRow> rows;
  std::vector<SkippedCell> skipped;
};

/// Ensemble mean damage for one (class, N, K) cell.  Networks are the
/// independent units: the standard error is computed over per-network
/// means.  Stream children: cell.child(net), then net.child(0) wiring,
/// net.child(1) rules, net.child(2 + ic) per initial condition.
inline DamageRow measure_damage_cell(NetClass cls, std::uint32_t n, double k,
                                     const DamageEnsembleSpec& spec,
                                     const RandomStream& cell_stream,
                                     unsigned workers = 1) {
  if (spec.damage_size < 1 || spec.damage_size > n)
    throw std::invalid_argument("damage_size must be in [1, N]");
  if (spec.t_measure < 1)
    throw std::invalid_argument("t_measure must be >= 1");
  if (spec.n_networks < 1 || spec.n_ics < 1)
    throw std::invalid_argument("ensemble sizes must be >= 1");
  std::vector<double> net_means(spec.n_networks);
  parallel_for(spec.n_networks, workers, [&](std::uint64_t net) {
    auto net_stream = cell_stream.child(net);
    auto realized = realize_network(cls, n, k, net_stream, spec.realize);
    const auto out = build_out_adjacency(realized.topology);
    double acc = 0.0;
    for (std::uint32_t ic = 0; ic < spec.n_ics; ++ic) {
      auto ic_stream = net_stream.child(2 + ic);
      const auto state = random_state(n, ic_stream);
      const auto picks = ic_stream.sample_distinct(n, spec.damage_size);
      std::vector<NodeId> nodes(picks.begin(), picks.end());
      acc += damage_trial_mean(realized.topology, realized.rules, out, state,
                               nodes, spec.t_measure, spec.window);
    }
    net_means[net] = acc / spec.n_ics;
  });
  double mean = 0.0;
  for (auto m : net_means) mean += m;
  mean /= net_means.size();
  double se = 0.0;
  if (net_means.size() >= 2) {
    double ss = 0.0;
    for (auto m : net_means) ss += (m - mean) * (m - mean);
    se = std::sqrt(ss / (net_means.size() - 1)) /
         std::sqrt(double(net_means.size()));
  }
  DamageRow row;
  row.class_name = to_string(cls);
  row.n = n;
  row.k = k;
  row.damage_size = spec.damage_size;
  row.mean_damage = mean;
  row.std_error = se;
  row.n_networks = spec.n_networks;
  row.n_ics = spec.n_ics;
  row.t_measure = spec.t_measure;
  row.seed = cell_stream.master_seed();
  return row;
}

struct DamageSweepSpec {
  std::vector<NetClass> classes;
  std::vector<std::uint32_t> n_list;
  std::vector<double> k_grid;
  DamageEnsembleSpec ens;
};

/// Full (class x N x K) sweep.  Infeasible cells are recorded in
/// `skipped` and do not abort the run.  Stream path: root.child(class
/// index).child(size index * |k_grid| + k index).
inline DamageTable damage_sweep(const DamageSweepSpec& spec,
                                const RandomStream& root,
                                unsigned workers = 1) {
  if (spec.classes.empty() || spec.n_list.empty() || spec.k_grid.empty())
    throw std::invalid_argument("damage_sweep: empty grid");
  DamageTable table;
  for (std::size_t ci = 0; ci < spec.classes.size(); ++ci) {
    auto class_stream = root.child(ci);
    for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
      for (std::size_t ki = 0; ki < spec.k_grid.size(); ++ki) {
        auto cell_stream = class_stream.child(ni * spec.k_grid.size() + ki);
        try {
          table.rows.push_back(measure_damage_cell(
              spec.classes[ci], spec.n_list[ni], spec.k_grid[ki], spec.ens,
              cell_stream, workers));
        } catch (const std::invalid_argument& e) {
          table.skipped.push_back({to_string(spec.classes[ci]),
                                   spec.n_list[ni], spec.k_grid[ki], e.what()});
        }
      }
    }
  }
  return table;
}

struct KsPairCrossing {
  std::uint32_t n_small = 0;
  std::uint32_t n_large = 0;
  double k = 0.0;
};

struct KsOptions {
  double sig_mult = 2.0;  // significance threshold in combined-SE units
  double dispersion_threshold = 0.25;
};

struct KsEstimate {
  std::string class_name;
  bool has_intersection = false;
  double k_s = std::numeric_limits<double>::quiet_NaN();
  double dispersion = std::numeric_limits<double>::quiet_NaN();
  std::vector<KsPairCrossing> crossings;
};

/// Characteristic connectivity from pairwise curve crossings.  For each
/// size pair the difference curve is scanned over points that differ
/// significantly (|delta| > sig_mult x combined SE); a sign change between
/// consecutive significant points marks one crossing, located by linear
/// interpolation on the raw difference curve inside that bracket (the mean
/// over its sign-change segments, so insignificant jitter elsewhere cannot
/// fabricate crossings while the estimate stays local).  K_s is the mean of
/// all crossings, dispersion their standard deviation; the estimate counts
/// as "no common intersection" when no crossing exists or the dispersion
/// exceeds the threshold.
inline KsEstimate estimate_ks(const DamageTable& table,
                              const std::string& class_name,
                              std::uint32_t damage_size,
                              const KsOptions& opt = {}) {
  std::map<std::uint32_t, std::map<double, std::pair<double, double>>> by_n;
  for (const auto& row : table.rows)
    if (row.class_name == class_name && row.damage_size == damage_size)
      by_n[row.n][row.k] = {row.mean_damage, row.std_error};
  if (by_n.size() < 2)
    throw std::invalid_argument("estimate_ks: need at least 2 system sizes");

  const auto& ref = by_n.begin()->second;
  std::vector<double> grid;
  for (const auto& [k, v] : ref) grid.push_back(k);
  for (const auto& [n, curve] : by_n) {
    if (curve.size() != grid.size())
      throw std::invalid_argument("estimate_ks: sizes use different K grids");
    for (double k : grid)
      if (!curve.contains(k))
        throw std::invalid_argument("estimate_ks: sizes use different K grids");
  }

  KsEstimate est;
  est.class_name = class_name;
  std::vector<std::uint32_t> sizes;
  for (const auto& [n, curve] : by_n) sizes.push_back(n);
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    for (std::size_t b = a + 1; b < sizes.size(); ++b) {
      const auto& small = by_n[sizes[a]];
      const auto& large = by_n[sizes[b]];
      std::vector<double> delta(grid.size());
      std::vector<bool> significant(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto [ms, es] = small.at(grid[i]);
        const auto [ml, el] = large.at(grid[i]);
        delta[i] = ms - ml;
        significant[i] = std::abs(delta[i]) > opt.sig_mult *
                                                  std::sqrt(es * es + el * el);
      }
      std::size_t prev = 0;
      bool have_prev = false;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!significant[i]) continue;
        if (have_prev && delta[prev] * delta[i] < 0.0) {
          double acc = 0.0;
          int segments = 0;
          for (std::size_t j = prev; j < i; ++j) {
            if (delta[j] * delta[j + 1] < 0.0) {
              acc += grid[j] + (grid[j + 1] - grid[j]) * delta[j] /
                                   (delta[j] - delta[j + 1]);
              ++segments;
            }
          }
          const double kx =
              segments > 0 ? acc / segments
                           : grid[prev] + (grid[i] - grid[prev]) * delta[prev] /
                                              (delta[prev] - delta[i]);
          est.crossings.push_back({sizes[a], sizes[b], kx});
        }
        have_prev = true;
        prev = i;
      }
    }
  }
  if (est.crossings.empty()) return est;
  double mean = 0.0;
  for (const auto& c : est.crossings) mean += c.k;
  mean /= est.crossings.size();
  double ss = 0.0;
  for (const auto& c : est.crossings) ss += (c.k - mean) * (c.k - mean);
  est.k_s = mean;
  est.dispersion = std::sqrt(ss / est.crossings.size());
  est.has_intersection = est.dispersion <= opt.dispersion_threshold;
  return est;
}

struct DerridaSpec {
  std::uint32_t n_networks = 100;
  std::uint32_t n_states = 20;
  std::uint32_t damage_size = 1;
  RealizeOptions realize;
};

/// One-step damage growth factor r(K): expected Hamming distance after a
/// single synchronous update of a random state and its perturbed twin,
/// divided by the initial damage size.
inline double derrida_rate(NetClass cls, std::uint32_t n, double k,
                           const DerridaSpec& spec,
                           const RandomStream& stream, unsigned workers = 1) {
  if (spec.n_networks < 1 || spec.n_states < 1)
    throw std::invalid_argument("derrida_rate: ensembles must be >= 1");
  std::vector<double> net_means(spec.n_networks);
  parallel_for(spec.n_networks, workers, [&](std::uint64_t net) {
    auto net_stream = stream.child(net);
    auto realized = realize_network(cls, n, k, net_stream, spec.realize);
    NetworkState next_a(n), next_b(n);
    double acc = 0.0;
    for (std::uint32_t s = 0; s < spec.n_states; ++s) {
      auto ic_stream = net_stream.child(2 + s);
      const auto state = random_state(n, ic_stream);
      const auto picks = ic_stream.sample_distinct(n, spec.damage_size);
      std::vector<NodeId> nodes(picks.begin(), picks.end());
      const auto twin = perturb(state, nodes);
      step_into(realized.topology, realized.rules, state, next_a);
      step_into(realized.topology, realized.rules, twin, next_b);
      acc += static_cast<double>(hamming_distance(next_a, next_b));
    }
    net_means[net] = acc / spec.n_states;
  });
  double mean = 0.0;
  for (auto m : net_means) mean += m;
  return mean / net_means.size() / spec.damage_size;
}

/// First K at which the rate curve reaches 1, by linear interpolation
/// between adjacent grid points; empty when the curve never crosses.
inline std::optional<double> derrida_crossing(
    const std::vector<std::pair<double, double>>& k_rate) {
  for (std::size_t i = 1; i < k_rate.size(); ++i) {
    const auto [k0, r0] = k_rate[i - 1];
    const auto [k1, r1] = k_rate[i];
    if (r0 < 1.0 && r1 >= 1.0)
      return k0 + (k1 - k0) * (1.0 - r0) / (r1 - r0);
  }
  return std::nullopt;
}

}  // namespace critnet
