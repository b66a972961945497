#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "critnet/topology.hpp"

namespace critnet {

/// Unique-neighbor adjacency of the undirected projection (self-loops
/// dropped, directions merged).
inline std::vector<std::vector<NodeId>> undirected_adjacency(const Topology& t) {
  std::vector<std::vector<NodeId>> adj(t.n_nodes);
  for (std::uint32_t i = 0; i < t.n_nodes; ++i)
    for (auto src : t.in_edges(i)) {
      if (src == i) continue;
      adj[i].push_back(src);
      adj[src].push_back(i);
    }
  for (auto& l : adj) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return adj;
}

struct PathLengthResult {
  double avg_path = 0.0;       // mean over ordered reachable pairs
  double reachable_frac = 0.0; // reachable ordered pairs / N(N-1)
};

/// BFS from every source over the undirected projection.
inline PathLengthResult avg_path_length(const Topology& t) {
  if (t.n_nodes < 2)
    throw std::invalid_argument("avg_path_length: need at least 2 nodes");
  const auto adj = undirected_adjacency(t);
  const std::uint32_t n = t.n_nodes;
  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> queue(n);
  std::uint64_t pair_count = 0;
  double dist_sum = 0.0;
  for (std::uint32_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
    dist[s] = 0;
    std::uint32_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      const auto u = queue[head++];
      for (auto v : adj[u])
        if (dist[v] == std::numeric_limits<std::uint32_t>::max()) {
          dist[v] = dist[u] + 1;
          queue[tail++] = v;
          dist_sum += dist[v];
          ++pair_count;
        }
    }
  }
  PathLengthResult res;
  if (pair_count > 0) res.avg_path = dist_sum / double(pair_count);
  res.reachable_frac = double(pair_count) / (double(n) * (n - 1));
  return res;
}

/// Mean local clustering on the undirected projection; nodes of degree
/// < 2 contribute 0.
inline double clustering_coefficient(const Topology& t) {
  if (t.n_nodes < 3)
    throw std::invalid_argument("clustering_coefficient: need at least 3 nodes");
  const auto adj = undirected_adjacency(t);
  double acc = 0.0;
  for (std::uint32_t i = 0; i < t.n_nodes; ++i) {
    const auto& nb = adj[i];
    const std::size_t d = nb.size();
    if (d < 2) continue;
    std::uint64_t links = 0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a + 1; b < d; ++b)
        if (std::binary_search(adj[nb[a]].begin(), adj[nb[a]].end(), nb[b]))
          ++links;
    acc += 2.0 * double(links) / (double(d) * (d - 1));
  }
  return acc / t.n_nodes;
}

struct ComponentResult {
  std::uint32_t n_components = 0;
  double largest_fraction = 0.0;
};

/// Weakly connected components of the undirected projection.
inline ComponentResult components(const Topology& t) {
  const auto adj = undirected_adjacency(t);
  const std::uint32_t n = t.n_nodes;
  std::vector<bool> seen(n, false);
  std::vector<NodeId> queue;
  ComponentResult res;
  std::uint32_t largest = 0;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++res.n_components;
    std::uint32_t size = 0;
    queue.assign(1, s);
    seen[s] = true;
    while (!queue.empty()) {
      const auto u = queue.back();
      queue.pop_back();
      ++size;
      for (auto v : adj[u])
        if (!seen[v]) {
          seen[v] = true;
          queue.push_back(v);
        }
    }
    largest = std::max(largest, size);
  }
  if (n > 0) res.largest_fraction = double(largest) / n;
  return res;
}

/// Strongly connected components of the directed graph (Kosaraju).
inline ComponentResult strong_components(const Topology& t) {
  const std::uint32_t n = t.n_nodes;
  const auto out = build_out_adjacency(t);
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<bool> seen(n, false);
  std::vector<std::pair<NodeId, std::uint64_t>> stack;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = true;
    stack.emplace_back(s, 0);
    while (!stack.empty()) {
      auto& [u, ei] = stack.back();
      const auto edges = out.out_edges(u);
      if (ei < edges.size()) {
        const auto v = edges[ei++];
        if (!seen[v]) {
          seen[v] = true;
          stack.emplace_back(v, 0);
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }
  std::fill(seen.begin(), seen.end(), false);
  ComponentResult res;
  std::uint32_t largest = 0;
  std::vector<NodeId> queue;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (seen[*it]) continue;
    ++res.n_components;
    std::uint32_t size = 0;
    queue.assign(1, *it);
    seen[*it] = true;
    while (!queue.empty()) {
      const auto u = queue.back();
      queue.pop_back();
      ++size;
      for (auto v : t.in_edges(u))
        if (!seen[v]) {
          seen[v] = true;
          queue.push_back(v);
        }
    }
    largest = std::max(largest, size);
  }
  if (n > 0) res.largest_fraction = double(largest) / n;
  return res;
}

struct WireCost {
  double total = 0.0;
  double mean = 0.0;
  std::vector<std::uint64_t> histogram;  // bin b counts lengths in [b, b+1)
};

/// Toroidal Euclidean length of every directed link.
inline WireCost wire_cost(const Topology& t) {
  if (!t.has_geometry())
    throw std::invalid_argument("wire_cost: topology has no geometry");
  WireCost wc;
  std::uint64_t links = 0;
  for (std::uint32_t i = 0; i < t.n_nodes; ++i)
    for (auto src : t.in_edges(i)) {
      const double d = toroidal_distance(t, i, src);
      wc.total += d;
      ++links;
      const auto bin = static_cast<std::size_t>(d);
      if (wc.histogram.size() <= bin) wc.histogram.resize(bin + 1, 0);
      ++wc.histogram[bin];
    }
  if (links > 0) wc.mean = wc.total / double(links);
  return wc;
}

struct MetricsReport {
  double avg_path = 0.0;
  double reachable_frac = 0.0;
  double clustering = 0.0;
  std::uint32_t n_components = 0;
  double largest_frac = 0.0;
  double total_wire = std::numeric_limits<double>::quiet_NaN();
  double mean_wire = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::uint64_t> degree_histogram;  // by in-degree
};

inline MetricsReport compute_metrics(const Topology& t) {
  MetricsReport rep;
  const auto pl = avg_path_length(t);
  rep.avg_path = pl.avg_path;
  rep.reachable_frac = pl.reachable_frac;
  rep.clustering = clustering_coefficient(t);
  const auto comp = components(t);
  rep.n_components = comp.n_components;
  rep.largest_frac = comp.largest_fraction;
  if (t.has_geometry()) {
    const auto wc = wire_cost(t);
    rep.total_wire = wc.total;
    rep.mean_wire = wc.mean;
  }
  for (std::uint32_t i = 0; i < t.n_nodes; ++i) {
    const auto d = t.in_degree(i);
    if (rep.degree_histogram.size() <= d) rep.degree_histogram.resize(d + 1, 0);
    ++rep.degree_histogram[d];
  }
  return rep;
}

}  // namespace critnet
