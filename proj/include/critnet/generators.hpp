#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "critnet/rng.hpp"
#include "critnet/topology.hpp"

namespace critnet {

enum class TopologyClass {
  rbn_exact_k,
  random_avg_k,
  ca_lattice,
  ca_diluted,
  small_world,
};

enum class ShortcutDist { uniform, power_law, gaussian };

struct SmallWorldParams {
  double p = 0.0;
  ShortcutDist dist = ShortcutDist::uniform;
  double alpha = 2.0;  // power-law exponent, > 0
  double sigma = 2.0;  // gaussian width, > 0
  bool ring = false;   // 1D ring mode instead of the 2D torus
  std::uint32_t k_base = 4;
};

struct TopologySpec {
  TopologyClass cls = TopologyClass::random_avg_k;
  std::uint32_t n_nodes = 0;
  double k_param = 0.0;  // exact K or <K> depending on the class
  bool allow_self = true;
  SmallWorldParams sw;
};

inline std::uint32_t side_of(std::uint32_t n) {
  const auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(double(n))));
  if (static_cast<std::uint64_t>(side) * side != n)
    throw std::invalid_argument("n_nodes must be a perfect square for lattice classes");
  return side;
}

/// Exact-K random wiring: every node gets exactly k distinct in-edges
/// chosen uniformly from the node set.
inline Topology gen_rbn_exact(std::uint32_t n, std::uint32_t k,
                              bool allow_self, RandomStream& stream) {
  const std::uint32_t universe = allow_self ? n : n - 1;
  if (n == 0) throw std::invalid_argument("gen_rbn_exact: n must be > 0");
  if (k > universe)
    throw std::invalid_argument("gen_rbn_exact: k exceeds available sources");
  std::vector<std::vector<std::uint32_t>> lists(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto node_stream = stream.child(i);
    auto picks = node_stream.sample_distinct(universe, k);
    auto& l = lists[i];
    l.reserve(k);
    for (auto v : picks) {
      auto src = static_cast<std::uint32_t>(v);
      if (!allow_self && src >= i) ++src;  // skip slot i
      l.push_back(src);
    }
  }
  return topology_from_lists(n, std::move(lists), ClassTag::rbn_random);
}

/// Average-K random wiring: exactly L = round(n * k_avg) distinct directed
/// links placed uniformly among all admissible (target, source) pairs.
inline Topology gen_random_avg(std::uint32_t n, double k_avg, bool allow_self,
                               RandomStream& stream) {
  if (n == 0) throw std::invalid_argument("gen_random_avg: n must be > 0");
  if (k_avg < 0) throw std::invalid_argument("gen_random_avg: k_avg must be >= 0");
  const std::uint64_t universe =
      static_cast<std::uint64_t>(n) * (allow_self ? n : n - 1);
  const auto links = static_cast<std::uint64_t>(std::llround(double(n) * k_avg));
  if (links > universe)
    throw std::invalid_argument("gen_random_avg: L exceeds admissible pairs");
  auto gen_stream = stream.child(0);
  std::vector<std::vector<std::uint32_t>> lists(n);
  for (auto idx : gen_stream.sample_distinct(universe, links)) {
    std::uint32_t tgt, src;
    if (allow_self) {
      tgt = static_cast<std::uint32_t>(idx / n);
      src = static_cast<std::uint32_t>(idx % n);
    } else {
      tgt = static_cast<std::uint32_t>(idx / (n - 1));
      auto r = static_cast<std::uint32_t>(idx % (n - 1));
      src = r + (r >= tgt ? 1 : 0);
    }
    lists[tgt].push_back(src);
  }
  return topology_from_lists(n, std::move(lists), ClassTag::rbn_random);
}

namespace detail {

// Distinct von Neumann neighbors of node i, ascending.  The side-2 torus
// collapses left/right and up/down neighbors into one node each.
inline std::vector<std::uint32_t> lattice_neighbor_list(std::uint32_t side,
                                                        std::uint32_t i) {
  const std::uint32_t x = i % side, y = i / side;
  std::vector<std::uint32_t> nb = {
      y * side + (x + 1) % side,
      y * side + (x + side - 1) % side,
      ((y + 1) % side) * side + x,
      ((y + side - 1) % side) * side + x,
  };
  std::sort(nb.begin(), nb.end());
  nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  return nb;
}

}  // namespace detail

/// Folded (toroidal) 2D von Neumann lattice: four in-edges per node, no
/// self-connections.
inline Topology gen_ca_lattice(std::uint32_t side) {
  if (side < 2) throw std::invalid_argument("gen_ca_lattice: side must be >= 2");
  const std::uint32_t n = side * side;
  std::vector<std::vector<std::uint32_t>> lists(n);
  for (std::uint32_t i = 0; i < n; ++i)
    lists[i] = detail::lattice_neighbor_list(side, i);
  return topology_from_lists(n, std::move(lists), ClassTag::ca_lattice,
                             GeometryKind::torus2d, side);
}

/// Diluted CA: exactly L = round(N * k_avg) of the directed lattice links,
/// chosen uniformly without replacement from the full von Neumann
/// candidate set.  k_avg = 4 reproduces the full lattice bit-exactly.
inline Topology gen_ca_diluted(std::uint32_t side, double k_avg,
                               RandomStream& stream) {
  if (side < 2) throw std::invalid_argument("gen_ca_diluted: side must be >= 2");
  if (k_avg < 0 || k_avg > 4.0)
    throw std::invalid_argument("gen_ca_diluted: k_avg must be in [0, 4]");
  const std::uint32_t n = side * side;
  std::vector<std::uint32_t> cand_tgt, cand_src;
  for (std::uint32_t i = 0; i < n; ++i)
    for (auto src : detail::lattice_neighbor_list(side, i)) {
      cand_tgt.push_back(i);
      cand_src.push_back(src);
    }
  const auto links = static_cast<std::uint64_t>(std::llround(double(n) * k_avg));
  if (links > cand_tgt.size())
    throw std::invalid_argument("gen_ca_diluted: L exceeds lattice candidate links");
  auto gen_stream = stream.child(0);
  std::vector<std::vector<std::uint32_t>> lists(n);
  for (auto idx : gen_stream.sample_distinct(cand_tgt.size(), links))
    lists[cand_tgt[idx]].push_back(cand_src[idx]);
  return topology_from_lists(n, std::move(lists), ClassTag::ca_diluted,
                             GeometryKind::torus2d, side);
}

namespace detail {

// Cumulative weights over all nonzero coordinate offsets, used to draw
// shortcut targets with a distance-dependent probability.
struct OffsetSampler {
  std::vector<double> cdf;  // over offset index o in [1, n)
  double total = 0.0;

  static double weight(double dist, const SmallWorldParams& sw) {
    switch (sw.dist) {
      case ShortcutDist::uniform: return 1.0;
      case ShortcutDist::power_law: return std::pow(dist, -sw.alpha);
      case ShortcutDist::gaussian:
        return std::exp(-dist * dist / (2.0 * sw.sigma * sw.sigma));
    }
    return 1.0;
  }

  static double offset_distance(std::uint32_t o, std::uint32_t side, bool ring,
                                std::uint32_t n) {
    if (ring) {
      return static_cast<double>(std::min(o, n - o));
    }
    std::uint32_t dx = o % side, dy = o / side;
    dx = std::min(dx, side - dx);
    dy = std::min(dy, side - dy);
    return std::sqrt(double(dx) * dx + double(dy) * dy);
  }

  OffsetSampler(std::uint32_t n, std::uint32_t side,
                const SmallWorldParams& sw) {
    cdf.resize(n - 1);
    double acc = 0.0;
    for (std::uint32_t o = 1; o < n; ++o) {
      acc += weight(offset_distance(o, side, sw.ring, n), sw);
      cdf[o - 1] = acc;
    }
    total = acc;
  }

  // Offset index in [1, n), distributed per the configured weights.
  std::uint32_t draw(RandomStream& stream) const {
    const double r = stream.next_double() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    if (it == cdf.end()) --it;
    return static_cast<std::uint32_t>(it - cdf.begin()) + 1;
  }
};

inline std::uint32_t apply_offset(std::uint32_t j, std::uint32_t o,
                                  std::uint32_t side, bool ring,
                                  std::uint32_t n) {
  if (ring) return (j + o) % n;
  const std::uint32_t x = (j % side + o % side) % side;
  const std::uint32_t y = (j / side + o / side) % side;
  return y * side + x;
}

}  // namespace detail

/// Watts-Strogatz style small world: start from a regular lattice (2D von
/// Neumann torus for k_base = 4, or a 1D ring with k_base/2 neighbors each
/// side), then rewire each link independently with probability p, keeping
/// the source and drawing a new target with the configured shortcut-length
/// distribution.  Total link count is preserved; no self-loops and no
/// duplicate links are created.
inline Topology gen_small_world(std::uint32_t side_or_n,
                                const SmallWorldParams& sw,
                                RandomStream& stream) {
  if (sw.p < 0.0 || sw.p > 1.0)
    throw std::invalid_argument("gen_small_world: p must be in [0, 1]");
  if (sw.dist == ShortcutDist::power_law && sw.alpha <= 0.0)
    throw std::invalid_argument("gen_small_world: alpha must be > 0");
  if (sw.dist == ShortcutDist::gaussian && sw.sigma <= 0.0)
    throw std::invalid_argument("gen_small_world: sigma must be > 0");

  std::uint32_t n, side;
  std::vector<std::vector<std::uint32_t>> lists;
  if (sw.ring) {
    n = side_or_n;
    side = 0;
    if (sw.k_base < 2 || sw.k_base % 2 != 0 || sw.k_base >= n)
      throw std::invalid_argument("gen_small_world: ring k_base must be even, >= 2, < n");
    lists.resize(n);
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t d = 1; d <= sw.k_base / 2; ++d) {
        lists[i].push_back((i + d) % n);
        lists[i].push_back((i + n - d) % n);
      }
  } else {
    side = side_or_n;
    if (side < 2) throw std::invalid_argument("gen_small_world: side must be >= 2");
    if (sw.k_base != 4)
      throw std::invalid_argument("gen_small_world: 2D mode supports k_base = 4");
    n = side * side;
    lists.resize(n);
    for (std::uint32_t i = 0; i < n; ++i)
      lists[i] = detail::lattice_neighbor_list(side, i);
  }

  // Edge snapshot in canonical order; rewiring decisions follow it.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (target, source)
  for (std::uint32_t i = 0; i < n; ++i) {
    std::sort(lists[i].begin(), lists[i].end());
    for (auto src : lists[i]) edges.emplace_back(i, src);
  }

  std::vector<std::unordered_set<std::uint32_t>> in_sets(n);
  for (auto [tgt, src] : edges) in_sets[tgt].insert(src);

  const bool needs_sampler = sw.dist != ShortcutDist::uniform;
  detail::OffsetSampler sampler =
      needs_sampler ? detail::OffsetSampler(n, side, sw)
                    : detail::OffsetSampler(2, 0, SmallWorldParams{.ring = true});

  auto rewire_stream = stream.child(0);
  constexpr int kMaxAttempts = 200;
  for (auto [tgt, src] : edges) {
    if (!rewire_stream.bernoulli(sw.p)) continue;
    in_sets[tgt].erase(src);
    std::uint32_t chosen = tgt;  // fall back to the original on exhaustion
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      std::uint32_t candidate;
      if (needs_sampler) {
        candidate = detail::apply_offset(src, sampler.draw(rewire_stream), side,
                                         sw.ring, n);
      } else {
        auto v = static_cast<std::uint32_t>(rewire_stream.next_below(n - 1));
        candidate = v + (v >= src ? 1 : 0);  // uniform over nodes != src
      }
      if (!in_sets[candidate].contains(src)) {
        chosen = candidate;
        break;
      }
    }
    in_sets[chosen].insert(src);
  }

  std::vector<std::vector<std::uint32_t>> rewired(n);
  for (std::uint32_t i = 0; i < n; ++i)
    rewired[i].assign(in_sets[i].begin(), in_sets[i].end());
  return topology_from_lists(n, std::move(rewired), ClassTag::small_world,
                             sw.ring ? GeometryKind::ring : GeometryKind::torus2d,
                             side);
}

/// Number of admissible directed links for the class described by `spec`.
inline std::uint64_t candidate_link_count(const TopologySpec& spec) {
  const std::uint64_t n = spec.n_nodes;
  switch (spec.cls) {
    case TopologyClass::rbn_exact_k:
    case TopologyClass::random_avg_k:
      return spec.allow_self ? n * n : n * (n - 1);
    case TopologyClass::ca_lattice:
    case TopologyClass::ca_diluted: {
      const std::uint32_t side = side_of(spec.n_nodes);
      return side == 2 ? 2 * n : 4 * n;
    }
    case TopologyClass::small_world:
      return n * (n - 1);
  }
  return 0;
}

inline Topology gen_topology(const TopologySpec& spec, RandomStream& stream) {
  switch (spec.cls) {
    case TopologyClass::rbn_exact_k:
      return gen_rbn_exact(spec.n_nodes,
                           static_cast<std::uint32_t>(std::lround(spec.k_param)),
                           spec.allow_self, stream);
    case TopologyClass::random_avg_k:
      return gen_random_avg(spec.n_nodes, spec.k_param, spec.allow_self, stream);
    case TopologyClass::ca_lattice:
      return gen_ca_lattice(side_of(spec.n_nodes));
    case TopologyClass::ca_diluted:
      return gen_ca_diluted(side_of(spec.n_nodes), spec.k_param, stream);
    case TopologyClass::small_world:
      return gen_small_world(spec.sw.ring ? spec.n_nodes : side_of(spec.n_nodes),
                             spec.sw, stream);
  }
  throw std::invalid_argument("gen_topology: unknown class");
}

}  // namespace critnet
