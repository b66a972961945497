#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "critnet/state.hpp"

namespace critnet {

enum class ClassTag { rbn_random, ca_lattice, ca_diluted, small_world };

inline const char* to_string(ClassTag tag) {
  switch (tag) {
    case ClassTag::rbn_random: return "RBN-random";
    case ClassTag::ca_lattice: return "CA-lattice";
    case ClassTag::ca_diluted: return "CA-diluted";
    case ClassTag::small_world: return "small-world";
  }
  return "?";
}

inline ClassTag class_tag_from_string(const std::string& s) {
  if (s == "RBN-random") return ClassTag::rbn_random;
  if (s == "CA-lattice") return ClassTag::ca_lattice;
  if (s == "CA-diluted") return ClassTag::ca_diluted;
  if (s == "small-world") return ClassTag::small_world;
  throw std::invalid_argument("unknown class tag: " + s);
}

enum class GeometryKind { none, torus2d, ring };

/// Directed network stored as per-node in-edge lists in CSR form.
/// The source list of every node is kept sorted ascending; rule tables and
/// weight vectors are aligned with that canonical order, so topologies
/// round-trip through the sorted text format without re-indexing rules.
struct Topology {
  std::uint32_t n_nodes = 0;
  std::vector<std::uint32_t> in_offsets;  // n_nodes + 1 prefix sums
  std::vector<std::uint32_t> in_sources;  // concatenated, ascending per node
  ClassTag class_tag = ClassTag::rbn_random;
  GeometryKind geometry = GeometryKind::none;
  std::uint32_t side = 0;  // torus side when geometry == torus2d

  std::uint32_t in_degree(NodeId i) const {
    return in_offsets[i + 1] - in_offsets[i];
  }

  std::span<const std::uint32_t> in_edges(NodeId i) const {
    return {in_sources.data() + in_offsets[i], in_degree(i)};
  }

  std::uint64_t link_count() const { return in_sources.size(); }

  double mean_in_degree() const {
    return n_nodes ? static_cast<double>(link_count()) / n_nodes : 0.0;
  }

  std::uint32_t max_in_degree() const {
    std::uint32_t m = 0;
    for (NodeId i = 0; i < n_nodes; ++i) m = std::max(m, in_degree(i));
    return m;
  }

  bool has_geometry() const { return geometry != GeometryKind::none; }

  std::uint32_t x_of(NodeId i) const { return i % side; }
  std::uint32_t y_of(NodeId i) const { return i / side; }
};

/// Toroidal Euclidean distance between two nodes, in lattice units.
inline double toroidal_distance(const Topology& t, NodeId a, NodeId b) {
  switch (t.geometry) {
    case GeometryKind::torus2d: {
      std::uint32_t dx = t.x_of(a) > t.x_of(b) ? t.x_of(a) - t.x_of(b)
                                               : t.x_of(b) - t.x_of(a);
      std::uint32_t dy = t.y_of(a) > t.y_of(b) ? t.y_of(a) - t.y_of(b)
                                               : t.y_of(b) - t.y_of(a);
      dx = std::min(dx, t.side - dx);
      dy = std::min(dy, t.side - dy);
      return std::sqrt(static_cast<double>(dx) * dx +
                       static_cast<double>(dy) * dy);
    }
    case GeometryKind::ring: {
      std::uint32_t d = a > b ? a - b : b - a;
      return static_cast<double>(std::min(d, t.n_nodes - d));
    }
    case GeometryKind::none:
      throw std::invalid_argument("toroidal_distance: topology has no geometry");
  }
  return 0.0;
}

/// Transposed adjacency: for each node, the list of nodes it feeds into.
struct OutAdjacency {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> targets;

  std::span<const std::uint32_t> out_edges(NodeId j) const {
    return {targets.data() + offsets[j], offsets[j + 1] - offsets[j]};
  }
};

inline OutAdjacency build_out_adjacency(const Topology& t) {
  OutAdjacency out;
  out.offsets.assign(t.n_nodes + 1, 0);
  for (auto src : t.in_sources) ++out.offsets[src + 1];
  for (std::uint32_t i = 0; i < t.n_nodes; ++i)
    out.offsets[i + 1] += out.offsets[i];
  out.targets.resize(t.in_sources.size());
  std::vector<std::uint32_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
  for (NodeId tgt = 0; tgt < t.n_nodes; ++tgt)
    for (auto src : t.in_edges(tgt)) out.targets[cursor[src]++] = tgt;
  return out;
}

inline bool lattice_neighbors(std::uint32_t side, NodeId a, NodeId b) {
  const std::uint32_t ax = a % side, ay = a / side;
  const std::uint32_t bx = b % side, by = b / side;
  std::uint32_t dx = ax > bx ? ax - bx : bx - ax;
  std::uint32_t dy = ay > by ? ay - by : by - ay;
  dx = std::min(dx, side - dx);
  dy = std::min(dy, side - dy);
  return dx + dy == 1;
}

/// Check the structural invariants; throws std::invalid_argument on the
/// first violation.
inline void validate(const Topology& t) {
  if (t.in_offsets.size() != t.n_nodes + 1)
    throw std::invalid_argument("topology: offset table size mismatch");
  if (t.in_offsets.front() != 0 || t.in_offsets.back() != t.in_sources.size())
    throw std::invalid_argument("topology: offset bounds mismatch");
  for (NodeId i = 0; i < t.n_nodes; ++i) {
    if (t.in_offsets[i] > t.in_offsets[i + 1])
      throw std::invalid_argument("topology: offsets not monotone");
    auto edges = t.in_edges(i);
    for (std::size_t j = 0; j < edges.size(); ++j) {
      if (edges[j] >= t.n_nodes)
        throw std::invalid_argument("topology: source index out of range");
      if (j > 0 && edges[j] <= edges[j - 1])
        throw std::invalid_argument("topology: in-edges not sorted distinct");
    }
  }
  if (t.geometry == GeometryKind::torus2d &&
      static_cast<std::uint64_t>(t.side) * t.side != t.n_nodes)
    throw std::invalid_argument("topology: side^2 != n_nodes");
  if (t.class_tag == ClassTag::ca_lattice || t.class_tag == ClassTag::ca_diluted) {
    if (t.geometry != GeometryKind::torus2d)
      throw std::invalid_argument("topology: CA classes need torus geometry");
    for (NodeId i = 0; i < t.n_nodes; ++i)
      for (auto src : t.in_edges(i)) {
        if (src == i)
          throw std::invalid_argument("topology: CA self-loop");
        if (!lattice_neighbors(t.side, i, src))
          throw std::invalid_argument("topology: CA edge not a lattice neighbor");
      }
  }
}

/// Build a topology from per-node source lists (sorts and checks them).
inline Topology topology_from_lists(
    std::uint32_t n, std::vector<std::vector<std::uint32_t>> lists,
    ClassTag tag, GeometryKind geom = GeometryKind::none,
    std::uint32_t side = 0) {
  Topology t;
  t.n_nodes = n;
  t.class_tag = tag;
  t.geometry = geom;
  t.side = side;
  t.in_offsets.assign(n + 1, 0);
  std::uint64_t total = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::sort(lists[i].begin(), lists[i].end());
    total += lists[i].size();
    t.in_offsets[i + 1] = static_cast<std::uint32_t>(total);
  }
  t.in_sources.reserve(total);
  for (auto& l : lists)
    t.in_sources.insert(t.in_sources.end(), l.begin(), l.end());
  validate(t);
  return t;
}

}  // namespace critnet
