#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "critnet/dynamics.hpp"
#include "critnet/parallel.hpp"
#include "critnet/rng.hpp"
#include "critnet/rules.hpp"
#include "critnet/state.hpp"
#include "critnet/topology.hpp"

namespace critnet {

enum class TaskKind { density, synchronization };

inline std::string to_string(TaskKind k) {
  return k == TaskKind::density ? "density" : "synchronization";
}

inline TaskKind task_kind_from_string(const std::string& s) {
  if (s == "density") return TaskKind::density;
  if (s == "synchronization" || s == "sync") return TaskKind::synchronization;
  throw std::invalid_argument("unknown task: " + s);
}

struct TaskSpec {
  TaskKind task = TaskKind::density;
  std::uint32_t t_run = 0;  // 0 means the 2N default
  std::uint32_t n_ics = 100;
};

struct DensityBucket {
  std::uint32_t ones = 0;
  std::uint32_t n_ics = 0;
  std::uint32_t n_success = 0;
};

struct FitnessReport {
  double fitness = 0.0;  // solved fraction
  std::uint32_t n_ics = 0;
  std::uint32_t n_success = 0;
  std::vector<DensityBucket> buckets;
};

inline std::uint32_t effective_t_run(const TaskSpec& spec, std::uint32_t n) {
  return spec.t_run > 0 ? spec.t_run : 2 * n;
}

/// Initial conditions with ones-count uniform over 0..N, optionally
/// excluding the exact-half count (density task needs a defined majority).
inline std::vector<NetworkState> draw_task_ics(std::uint32_t n,
                                               std::uint32_t count,
                                               bool exclude_half,
                                               const RandomStream& stream) {
  if (n == 0) throw std::invalid_argument("draw_task_ics: n must be > 0");
  std::vector<NetworkState> ics;
  ics.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto ic_stream = stream.child(i);
    std::uint32_t ones;
    do {
      ones = static_cast<std::uint32_t>(ic_stream.next_below(n + 1));
    } while (exclude_half && n % 2 == 0 && ones * 2 == n);
    ics.push_back(random_state_with_ones(n, ones, ic_stream));
  }
  return ics;
}

namespace detail {

inline FitnessReport bucket_report(const std::vector<std::uint32_t>& ones,
                                   const std::vector<char>& counted,
                                   const std::vector<char>& success) {
  FitnessReport rep;
  std::map<std::uint32_t, DensityBucket> buckets;
  for (std::size_t i = 0; i < ones.size(); ++i) {
    if (!counted[i]) continue;
    auto& b = buckets[ones[i]];
    b.ones = ones[i];
    ++b.n_ics;
    ++rep.n_ics;
    if (success[i]) {
      ++b.n_success;
      ++rep.n_success;
    }
  }
  for (auto& [o, b] : buckets) rep.buckets.push_back(b);
  if (rep.n_ics > 0) rep.fitness = double(rep.n_success) / rep.n_ics;
  return rep;
}

}  // namespace detail

/// Density classification on explicit initial conditions: success iff the
/// state after t_run steps is all-ones for a majority-ones IC and
/// all-zeros for a majority-zeros IC.  Exact-half ICs are excluded from
/// the count.
inline FitnessReport eval_density_on(const Topology& t, const RuleSet& r,
                                     std::span<const NetworkState> ics,
                                     std::uint32_t t_run,
                                     unsigned workers = 1) {
  if (r.kind != RuleKind::boolean_lut)
    throw std::invalid_argument("density task requires a Boolean substrate");
  std::vector<std::uint32_t> ones(ics.size());
  std::vector<char> counted(ics.size(), 0), success(ics.size(), 0);
  parallel_for(ics.size(), workers, [&](std::uint64_t i) {
    const auto o = ics[i].count_ones();
    ones[i] = o;
    if (2 * o == t.n_nodes) return;
    counted[i] = 1;
    const auto fin = run_final(t, r, ics[i], t_run);
    success[i] = (2 * o > t.n_nodes) ? fin.is_all_ones() : fin.is_all_zeros();
  });
  return detail::bucket_report(ones, counted, success);
}

inline FitnessReport eval_density(const Topology& t, const RuleSet& r,
                                  const TaskSpec& spec,
                                  const RandomStream& stream,
                                  unsigned workers = 1) {
  const auto ics = draw_task_ics(t.n_nodes, spec.n_ics, true, stream);
  return eval_density_on(t, r, ics, effective_t_run(spec, t.n_nodes), workers);
}

/// Synchronization on explicit initial conditions: success iff the orbit
/// enters the global period-2 cycle all-zeros <-> all-ones within t_run
/// steps.  The cycle must actually exist under the rules.
inline FitnessReport eval_sync_on(const Topology& t, const RuleSet& r,
                                  std::span<const NetworkState> ics,
                                  std::uint32_t t_run, unsigned workers = 1) {
  if (r.kind != RuleKind::boolean_lut)
    throw std::invalid_argument("synchronization task requires a Boolean substrate");
  NetworkState from_zeros(t.n_nodes), from_ones(t.n_nodes);
  step_into(t, r, NetworkState::all_zeros(t.n_nodes), from_zeros);
  step_into(t, r, NetworkState::all_ones(t.n_nodes), from_ones);
  const bool cycle_exists = from_zeros.is_all_ones() && from_ones.is_all_zeros();
  std::vector<std::uint32_t> ones(ics.size());
  std::vector<char> counted(ics.size(), 1), success(ics.size(), 0);
  parallel_for(ics.size(), workers, [&](std::uint64_t i) {
    ones[i] = ics[i].count_ones();
    if (!cycle_exists) return;
    NetworkState cur = ics[i];
    NetworkState buf(t.n_nodes);
    for (std::uint32_t s = 0; s <= t_run; ++s) {
      if (cur.is_all_zeros() || cur.is_all_ones()) {
        success[i] = 1;
        return;
      }
      if (s == t_run) break;
      step_into(t, r, cur, buf);
      std::swap(cur, buf);
    }
  });
  return detail::bucket_report(ones, counted, success);
}

inline FitnessReport eval_sync(const Topology& t, const RuleSet& r,
                               const TaskSpec& spec, const RandomStream& stream,
                               unsigned workers = 1) {
  const auto ics = draw_task_ics(t.n_nodes, spec.n_ics, false, stream);
  return eval_sync_on(t, r, ics, effective_t_run(spec, t.n_nodes), workers);
}

inline FitnessReport eval_task(const Topology& t, const RuleSet& r,
                               const TaskSpec& spec, const RandomStream& stream,
                               unsigned workers = 1) {
  return spec.task == TaskKind::density
             ? eval_density(t, r, spec, stream, workers)
             : eval_sync(t, r, spec, stream, workers);
}

struct SearchResult {
  RuleSet rules;
  FitnessReport report;
  std::uint32_t evaluations = 0;
};

/// Greedy stochastic hill climb over Boolean rule tables: start from a
/// random rule set, flip one random LUT bit per candidate, accept when
/// fitness does not decrease.  All candidates are scored on one fixed IC
/// set so fitness values are comparable.  `budget` counts fitness
/// evaluations including the initial one.
inline SearchResult rule_search(const Topology& t, const TaskSpec& spec,
                                std::uint32_t budget,
                                const RandomStream& stream,
                                unsigned workers = 1) {
  if (budget < 1) throw std::invalid_argument("rule_search: budget must be >= 1");
  auto rules_stream = stream.child(0);
  auto ic_stream = stream.child(1);
  auto mut_stream = stream.child(2);
  const auto ics = draw_task_ics(t.n_nodes, spec.n_ics,
                                 spec.task == TaskKind::density, ic_stream);
  const auto t_run = effective_t_run(spec, t.n_nodes);
  auto eval = [&](const RuleSet& r) {
    return spec.task == TaskKind::density
               ? eval_density_on(t, r, ics, t_run, workers)
               : eval_sync_on(t, r, ics, t_run, workers);
  };
  SearchResult best;
  best.rules = sample_boolean_rules(t, 0.5, rules_stream);
  best.report = eval(best.rules);
  best.evaluations = 1;
  const std::uint64_t total_bits = best.rules.lut_offsets[t.n_nodes];
  while (best.evaluations < budget && best.report.fitness < 1.0 &&
         total_bits > 0) {
    RuleSet candidate = best.rules;
    const auto bit = mut_stream.next_below(total_bits);
    candidate.lut_words[bit >> 6] ^= std::uint64_t{1} << (bit & 63);
    const auto rep = eval(candidate);
    ++best.evaluations;
    if (rep.fitness >= best.report.fitness) {
      best.rules = std::move(candidate);
      best.report = rep;
    }
  }
  return best;
}

}  // namespace critnet
