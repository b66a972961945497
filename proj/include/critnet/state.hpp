#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "critnet/rng.hpp"

namespace critnet {

using NodeId = std::uint32_t;

/// Fixed-length vector of binary node states, bit-packed 64 per word.
/// Boolean networks read the bits as {0,1}; threshold (spin) networks map
/// bit 1 -> spin +1 and bit 0 -> spin -1, so Hamming distances are
/// comparable across both variants.  Unused high bits of the last word are
/// kept zero, which makes equality, hashing and popcounts word-wise.
class NetworkState {
public:
  NetworkState() = default;
  explicit NetworkState(std::uint32_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static NetworkState all_zeros(std::uint32_t n) { return NetworkState(n); }

  static NetworkState all_ones(std::uint32_t n) {
    NetworkState s(n);
    for (auto& w : s.words_) w = ~0ULL;
    s.mask_tail();
    return s;
  }

  std::uint32_t size() const { return n_; }

  bool get(std::uint32_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1ULL;
  }

  void set(std::uint32_t i, bool v) {
    const std::uint64_t bit = 1ULL << (i & 63);
    if (v)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }

  void flip(std::uint32_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  std::uint32_t count_ones() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return static_cast<std::uint32_t>(c);
  }

  bool is_all_zeros() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  bool is_all_ones() const { return count_ones() == n_; }

  bool operator==(const NetworkState& other) const = default;

  std::string to_string() const {
    std::string s(n_, '0');
    for (std::uint32_t i = 0; i < n_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  /// Parse from a 0/1 string, index 0 first.
  static NetworkState from_string(const std::string& bits) {
    NetworkState s(static_cast<std::uint32_t>(bits.size()));
    for (std::uint32_t i = 0; i < s.n_; ++i) {
      if (bits[i] == '1')
        s.set(i, true);
      else if (bits[i] != '0')
        throw std::invalid_argument("NetworkState: bits must be 0/1");
    }
    return s;
  }

  void mask_tail() {
    if (n_ & 63) words_.back() &= (1ULL << (n_ & 63)) - 1;
  }

private:
  std::uint32_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct NetworkStateHash {
  std::size_t operator()(const NetworkState& s) const {
    std::uint64_t h = 0x2545f4914f6cdd1dULL ^ s.size();
    for (auto w : s.words()) h = mix64(h ^ w);
    return static_cast<std::size_t>(h);
  }
};

/// Number of positions where the two states differ.
inline std::uint32_t hamming_distance(const NetworkState& a,
                                      const NetworkState& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("hamming_distance: length mismatch");
  const auto wa = a.words();
  const auto wb = b.words();
  std::uint64_t d = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) d += std::popcount(wa[i] ^ wb[i]);
  return static_cast<std::uint32_t>(d);
}

/// Copy of `state` with exactly the given nodes flipped.  The nodes must be
/// distinct and in range; the input is left untouched.
inline NetworkState perturb(const NetworkState& state,
                            std::span<const NodeId> nodes) {
  NetworkState out = state;
  for (NodeId i : nodes) {
    if (i >= state.size())
      throw std::invalid_argument("perturb: node out of range");
    if (out.get(i) != state.get(i))
      throw std::invalid_argument("perturb: duplicate node");
    out.flip(i);
  }
  return out;
}

/// Uniform random state: each bit independently 0/1 with probability 1/2.
inline NetworkState random_state(std::uint32_t n, RandomStream& stream) {
  if (n == 0) throw std::invalid_argument("random_state: n must be > 0");
  NetworkState s(n);
  for (auto& w : s.words()) w = stream.next_u64();
  s.mask_tail();
  return s;
}

/// Random state with exactly `ones` bits set.
inline NetworkState random_state_with_ones(std::uint32_t n, std::uint32_t ones,
                                           RandomStream& stream) {
  if (ones > n)
    throw std::invalid_argument("random_state_with_ones: ones > n");
  NetworkState s(n);
  for (auto v : stream.sample_distinct(n, ones))
    s.set(static_cast<std::uint32_t>(v), true);
  return s;
}

}  // namespace critnet
