#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace critnet {

// 64-bit finalizer (Stafford variant 13 of the splitmix64 mixer).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// Deterministic, hierarchically splittable random stream.
///
/// A stream is identified by a 64-bit key derived from the master seed and
/// the path of child indices taken from the root; every draw is a pure
/// function of (key, draw counter).  Streams with different paths are
/// decorrelated by the mixer, and child derivation does not depend on how
/// many values the parent has produced, so ensembles can be fanned out to
/// workers in any order without coupling their sequences.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t master_seed)
      : master_seed_(master_seed),
        key_(mix64(master_seed ^ 0x9e3779b97f4a7c15ULL)) {}

  /// Derive the sub-stream for one branch of the path (experiment, grid
  /// cell, replicate, ...).  Independent of this stream's draw position.
  RandomStream child(std::uint64_t index) const {
    RandomStream s(*this);
    s.key_ = mix64(key_ + 0x9e3779b97f4a7c15ULL * (index + 1));
    s.counter_ = 0;
    return s;
  }

  std::uint64_t master_seed() const { return master_seed_; }

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ ^ counter_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  /// Uniform integer in [0, bound).  Lemire's multiply-shift with rejection;
  /// exact and deterministic for a given stream position.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be > 0");
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// `count` distinct values from [0, universe), uniform over subsets
  /// (Floyd's algorithm).  Order of the result is the insertion order and
  /// is deterministic for a given stream.
  std::vector<std::uint64_t> sample_distinct(std::uint64_t universe,
                                             std::uint64_t count) {
    if (count > universe)
      throw std::invalid_argument("sample_distinct: count exceeds universe");
    std::vector<std::uint64_t> out;
    out.reserve(count);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(count * 2);
    for (std::uint64_t j = universe - count; j < universe; ++j) {
      std::uint64_t t = next_below(j + 1);
      if (seen.contains(t)) t = j;
      seen.insert(t);
      out.push_back(t);
    }
    return out;
  }

private:
  std::uint64_t master_seed_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace critnet
