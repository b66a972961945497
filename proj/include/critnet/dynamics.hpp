#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "critnet/rules.hpp"
#include "critnet/state.hpp"
#include "critnet/topology.hpp"

namespace critnet {

/// Next value of one node under the given rules.  Boolean nodes index
/// their LUT with in-edge position j contributing bit j; threshold nodes
/// sum +/-1 inputs weighted by the edge signs, with sum = 0 resolved by
/// the rule set's sign convention.
inline bool node_update(const Topology& t, const RuleSet& r,
                        const NetworkState& cur, std::uint32_t i) {
  const auto edges = t.in_edges(i);
  if (r.kind == RuleKind::boolean_lut) {
    std::uint64_t row = 0;
    for (std::size_t j = 0; j < edges.size(); ++j)
      row |= std::uint64_t{cur.get(edges[j])} << j;
    return r.lut_entry(i, row);
  }
  int sum = 0;
  const auto base = t.in_offsets[i];
  for (std::size_t j = 0; j < edges.size(); ++j)
    sum += r.weight_sign(base + j) * (cur.get(edges[j]) ? 1 : -1);
  if (sum > 0) return true;
  if (sum < 0) return false;
  return r.sign_zero == SignZero::positive;
}

/// One synchronous update of every node.  `next` must be a distinct state
/// object of the same size.
inline void step_into(const Topology& t, const RuleSet& r,
                      const NetworkState& cur, NetworkState& next) {
  if (&cur == &next)
    throw std::invalid_argument("step_into: next must not alias cur");
  if (cur.size() != t.n_nodes || next.size() != t.n_nodes)
    throw std::invalid_argument("step_into: state size does not match topology");
  for (std::uint32_t i = 0; i < t.n_nodes; ++i)
    next.set(i, node_update(t, r, cur, i));
}

/// State after `steps` synchronous updates.
inline NetworkState run_final(const Topology& t, const RuleSet& r,
                              NetworkState state, std::uint64_t steps) {
  NetworkState buf = state;
  for (std::uint64_t s = 0; s < steps; ++s) {
    step_into(t, r, state, buf);
    std::swap(state, buf);
  }
  return state;
}

/// Full orbit: states[0] is the initial state, states[s] the state after
/// s updates.
struct Trajectory {
  std::vector<NetworkState> states;

  std::uint64_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

inline Trajectory run_trajectory(const Topology& t, const RuleSet& r,
                                 const NetworkState& initial,
                                 std::uint64_t steps) {
  Trajectory traj;
  traj.states.reserve(steps + 1);
  traj.states.push_back(initial);
  for (std::uint64_t s = 0; s < steps; ++s) {
    NetworkState next(t.n_nodes);
    step_into(t, r, traj.states.back(), next);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

struct AttractorOptions {
  std::uint64_t max_steps = 1'000'000;
  std::uint64_t max_stored_states = std::uint64_t{1} << 20;
};

struct AttractorInfo {
  bool found = false;
  std::uint64_t transient = 0;  // steps before the cycle is first entered
  std::uint64_t period = 0;
};

namespace detail {

// Brent cycle detection over the deterministic update map: O(1) memory,
// bounded by opts.max_steps applications.
inline AttractorInfo find_attractor_brent(const Topology& t, const RuleSet& r,
                                          const NetworkState& initial,
                                          const AttractorOptions& opts) {
  AttractorInfo info;
  NetworkState tortoise = initial;
  NetworkState hare(t.n_nodes);
  step_into(t, r, tortoise, hare);
  std::uint64_t power = 1, lam = 1, steps = 1;
  NetworkState buf(t.n_nodes);
  while (!(tortoise == hare)) {
    if (steps >= opts.max_steps) return info;
    if (power == lam) {
      tortoise = hare;
      power *= 2;
      lam = 0;
    }
    step_into(t, r, hare, buf);
    std::swap(hare, buf);
    ++lam;
    ++steps;
  }
  NetworkState a = initial;
  NetworkState b = initial;
  for (std::uint64_t s = 0; s < lam; ++s) {
    step_into(t, r, b, buf);
    std::swap(b, buf);
  }
  std::uint64_t mu = 0;
  while (!(a == b)) {
    step_into(t, r, a, buf);
    std::swap(a, buf);
    step_into(t, r, b, buf);
    std::swap(b, buf);
    ++mu;
  }
  info.found = true;
  info.transient = mu;
  info.period = lam;
  return info;
}

}  // namespace detail

/// Transient length and cycle period of the orbit from `initial`.
/// Visited states are hashed until the storage cap, after which the search
/// restarts with constant-memory cycle detection.
inline AttractorInfo find_attractor(const Topology& t, const RuleSet& r,
                                    const NetworkState& initial,
                                    const AttractorOptions& opts = {}) {
  if (initial.size() != t.n_nodes)
    throw std::invalid_argument("find_attractor: state size does not match topology");
  std::unordered_map<NetworkState, std::uint64_t, NetworkStateHash> seen;
  NetworkState cur = initial;
  NetworkState buf(t.n_nodes);
  for (std::uint64_t step = 0; step <= opts.max_steps; ++step) {
    auto [it, inserted] = seen.try_emplace(cur, step);
    if (!inserted) {
      AttractorInfo info;
      info.found = true;
      info.transient = it->second;
      info.period = step - it->second;
      return info;
    }
    if (seen.size() >= opts.max_stored_states)
      return detail::find_attractor_brent(t, r, initial, opts);
    step_into(t, r, cur, buf);
    std::swap(cur, buf);
  }
  return {};
}

}  // namespace critnet
