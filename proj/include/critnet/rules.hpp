#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "critnet/rng.hpp"
#include "critnet/topology.hpp"

namespace critnet {

enum class RuleKind { boolean_lut, threshold };

/// How sgn(0) resolves in threshold updates.
enum class SignZero { negative, positive };

/// Per-node update rules aligned with a topology's in-edge order.
///
/// Boolean nodes carry a lookup table of 2^{K_i} bits; row index is built
/// from the input states with in-edge position j contributing bit j.
/// Threshold nodes carry one weight bit per in-edge (1 = +1, 0 = -1),
/// indexed by the edge's position in the topology CSR.
struct RuleSet {
  RuleKind kind = RuleKind::boolean_lut;
  std::uint32_t n_nodes = 0;

  std::vector<std::uint64_t> lut_offsets;  // bit offset per node, size n+1
  std::vector<std::uint64_t> lut_words;

  std::vector<std::uint64_t> weight_words;  // one bit per CSR edge
  SignZero sign_zero = SignZero::negative;

  bool lut_entry(std::uint32_t node, std::uint64_t row) const {
    const std::uint64_t bit = lut_offsets[node] + row;
    return (lut_words[bit >> 6] >> (bit & 63)) & 1u;
  }

  void set_lut_entry(std::uint32_t node, std::uint64_t row, bool value) {
    const std::uint64_t bit = lut_offsets[node] + row;
    const std::uint64_t mask = std::uint64_t{1} << (bit & 63);
    if (value)
      lut_words[bit >> 6] |= mask;
    else
      lut_words[bit >> 6] &= ~mask;
  }

  std::uint64_t lut_bits(std::uint32_t node) const {
    return lut_offsets[node + 1] - lut_offsets[node];
  }

  int weight_sign(std::uint64_t edge_index) const {
    return ((weight_words[edge_index >> 6] >> (edge_index & 63)) & 1u) ? +1 : -1;
  }

  void set_weight_sign(std::uint64_t edge_index, int sign) {
    const std::uint64_t mask = std::uint64_t{1} << (edge_index & 63);
    if (sign > 0)
      weight_words[edge_index >> 6] |= mask;
    else
      weight_words[edge_index >> 6] &= ~mask;
  }
};

inline constexpr std::uint32_t kMaxLutInputs = 26;

/// Lays out an all-zero LUT rule set matching the topology's in-degrees.
inline RuleSet make_boolean_rules(const Topology& t) {
  RuleSet r;
  r.kind = RuleKind::boolean_lut;
  r.n_nodes = t.n_nodes;
  r.lut_offsets.resize(t.n_nodes + 1);
  std::uint64_t offset = 0;
  for (std::uint32_t i = 0; i < t.n_nodes; ++i) {
    const auto k = t.in_degree(i);
    if (k > kMaxLutInputs)
      throw std::invalid_argument("boolean rules: in-degree exceeds LUT limit");
    r.lut_offsets[i] = offset;
    offset += std::uint64_t{1} << k;
  }
  r.lut_offsets[t.n_nodes] = offset;
  r.lut_words.assign((offset + 63) / 64, 0);
  return r;
}

/// Lays out an all-(-1) threshold rule set (one weight bit per edge).
inline RuleSet make_threshold_rules(const Topology& t,
                                    SignZero sign_zero = SignZero::negative) {
  RuleSet r;
  r.kind = RuleKind::threshold;
  r.n_nodes = t.n_nodes;
  r.sign_zero = sign_zero;
  r.weight_words.assign((t.link_count() + 63) / 64, 0);
  return r;
}

/// Each LUT entry is an independent coin with P(1) = bias.
inline RuleSet sample_boolean_rules(const Topology& t, double bias,
                                    RandomStream& stream) {
  if (bias < 0.0 || bias > 1.0)
    throw std::invalid_argument("sample_boolean_rules: bias must be in [0, 1]");
  RuleSet r = make_boolean_rules(t);
  for (std::uint32_t i = 0; i < t.n_nodes; ++i) {
    auto node_stream = stream.child(i);
    const std::uint64_t rows = r.lut_bits(i);
    for (std::uint64_t row = 0; row < rows; ++row)
      if (node_stream.bernoulli(bias)) r.set_lut_entry(i, row, true);
  }
  return r;
}

/// Each in-edge weight is +1 or -1 with equal probability.
inline RuleSet sample_threshold_rules(const Topology& t, RandomStream& stream,
                                      SignZero sign_zero = SignZero::negative) {
  RuleSet r = make_threshold_rules(t, sign_zero);
  for (std::uint32_t i = 0; i < t.n_nodes; ++i) {
    auto node_stream = stream.child(i);
    const auto begin = t.in_offsets[i];
    const auto end = t.in_offsets[i + 1];
    for (auto e = begin; e < end; ++e)
      if (node_stream.bernoulli(0.5)) r.set_weight_sign(e, +1);
  }
  return r;
}

inline void validate_rules(const Topology& t, const RuleSet& r) {
  if (r.n_nodes != t.n_nodes)
    throw std::invalid_argument("rule set does not match topology size");
  if (r.kind == RuleKind::boolean_lut) {
    if (r.lut_offsets.size() != t.n_nodes + 1)
      throw std::invalid_argument("rule set LUT offsets malformed");
    for (std::uint32_t i = 0; i < t.n_nodes; ++i)
      if (r.lut_bits(i) != (std::uint64_t{1} << t.in_degree(i)))
        throw std::invalid_argument("rule set LUT size does not match in-degree");
    if (r.lut_words.size() != (r.lut_offsets[t.n_nodes] + 63) / 64)
      throw std::invalid_argument("rule set LUT words malformed");
  } else {
    if (r.weight_words.size() != (t.link_count() + 63) / 64)
      throw std::invalid_argument("rule set weight words malformed");
  }
}

}  // namespace critnet
