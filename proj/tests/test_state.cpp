#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "critnet/rng.hpp"
#include "critnet/state.hpp"
#include "support/naive.hpp"

using critnet::NetworkState;
using critnet::NodeId;
using critnet::RandomStream;

TEST_CASE("hamming distance on known pairs", "[state]") {
  REQUIRE(critnet::hamming_distance(NetworkState::from_string("0000"),
                                    NetworkState::from_string("0000")) == 0);
  REQUIRE(critnet::hamming_distance(NetworkState::from_string("0101"),
                                    NetworkState::from_string("0011")) == 2);
  auto zeros = NetworkState::all_zeros(1024);
  auto ones = NetworkState::all_ones(1024);
  REQUIRE(critnet::hamming_distance(zeros, ones) == 1024);
  REQUIRE_THROWS_AS(critnet::hamming_distance(zeros, NetworkState::all_zeros(8)),
                    std::invalid_argument);
}

TEST_CASE("hamming distance is a metric", "[state]") {
  RandomStream rng(90210);
  for (int trial = 0; trial < 1000; ++trial) {
    auto n = static_cast<std::uint32_t>(1 + rng.next_below(130));
    auto a = critnet::random_state(n, rng);
    auto b = critnet::random_state(n, rng);
    auto c = critnet::random_state(n, rng);
    auto dab = critnet::hamming_distance(a, b);
    auto dba = critnet::hamming_distance(b, a);
    auto dac = critnet::hamming_distance(a, c);
    auto dcb = critnet::hamming_distance(c, b);
    REQUIRE(critnet::hamming_distance(a, a) == 0);
    REQUIRE(dab == dba);
    REQUIRE(dab <= dac + dcb);
    if (dab == 0) REQUIRE(a == b);
  }
}

TEST_CASE("perturb flips exactly the named nodes", "[state]") {
  auto s = NetworkState::from_string("0000");
  std::vector<NodeId> one{1};
  auto p = critnet::perturb(s, one);
  REQUIRE(p == NetworkState::from_string("0100"));
  REQUIRE(s == NetworkState::from_string("0000"));

  RandomStream rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    auto n = static_cast<std::uint32_t>(2 + rng.next_below(120));
    auto base = critnet::random_state(n, rng);
    auto count = 1 + rng.next_below(n);
    auto picks = rng.sample_distinct(n, count);
    std::vector<NodeId> nodes(picks.begin(), picks.end());
    auto flipped = critnet::perturb(base, nodes);
    REQUIRE(critnet::hamming_distance(base, flipped) == nodes.size());
    REQUIRE(critnet::perturb(flipped, nodes) == base);
  }
}

TEST_CASE("perturb rejects bad damage sets", "[state]") {
  auto s = NetworkState::all_zeros(8);
  std::vector<NodeId> out_of_range{8};
  std::vector<NodeId> duplicate{2, 2};
  REQUIRE_THROWS_AS(critnet::perturb(s, out_of_range), std::invalid_argument);
  REQUIRE_THROWS_AS(critnet::perturb(s, duplicate), std::invalid_argument);
}

TEST_CASE("random_state is deterministic and unbiased", "[state]") {
  RandomStream a(11);
  RandomStream b(11);
  REQUIRE(critnet::random_state(257, a) == critnet::random_state(257, b));

  RandomStream rng(13);
  std::uint64_t ones = 0;
  const int draws = 2000;
  const std::uint32_t n = 1024;
  for (int i = 0; i < draws; ++i) ones += critnet::random_state(n, rng).count_ones();
  double density = static_cast<double>(ones) / (static_cast<double>(draws) * n);
  REQUIRE_THAT(density, Catch::Matchers::WithinAbs(0.5, 0.01));
}

TEST_CASE("random_state_with_ones hits the exact count", "[state]") {
  RandomStream rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    auto n = static_cast<std::uint32_t>(1 + rng.next_below(100));
    auto k = static_cast<std::uint32_t>(rng.next_below(n + 1));
    auto s = critnet::random_state_with_ones(n, k, rng);
    REQUIRE(s.size() == n);
    REQUIRE(s.count_ones() == k);
  }
  REQUIRE_THROWS_AS(critnet::random_state_with_ones(4, 5, rng), std::invalid_argument);
}

TEST_CASE("packed state matches a plain bit vector", "[state]") {
  RandomStream rng(3141);
  for (int trial = 0; trial < 1000; ++trial) {
    auto n = static_cast<std::uint32_t>(1 + rng.next_below(64));
    NetworkState s(n);
    std::vector<int> model(n, 0);
    for (int op = 0; op < 40; ++op) {
      auto i = static_cast<std::uint32_t>(rng.next_below(n));
      switch (rng.next_below(3)) {
        case 0:
          s.set(i, true);
          model[i] = 1;
          break;
        case 1:
          s.set(i, false);
          model[i] = 0;
          break;
        default:
          s.flip(i);
          model[i] = 1 - model[i];
          break;
      }
      REQUIRE(s.get(i) == (model[i] != 0));
    }
    REQUIRE(naive::to_bits(s) == model);
    std::uint64_t want_ones = 0;
    for (int v : model) want_ones += v;
    REQUIRE(s.count_ones() == want_ones);
    REQUIRE(s == naive::from_bits(model));
  }
}

TEST_CASE("string round-trip preserves every bit", "[state]") {
  RandomStream rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto n = static_cast<std::uint32_t>(1 + rng.next_below(150));
    auto s = critnet::random_state(n, rng);
    REQUIRE(NetworkState::from_string(s.to_string()) == s);
  }
  REQUIRE_THROWS_AS(NetworkState::from_string("01x"), std::invalid_argument);
}

TEST_CASE("all_ones keeps the tail clean", "[state]") {
  for (std::uint32_t n : {1u, 63u, 64u, 65u, 127u, 129u}) {
    auto s = NetworkState::all_ones(n);
    REQUIRE(s.count_ones() == n);
    REQUIRE(s.is_all_ones());
    s.flip(n - 1);
    REQUIRE(s.count_ones() == n - 1);
    REQUIRE_FALSE(s.is_all_ones());
  }
  REQUIRE(NetworkState::all_zeros(77).is_all_zeros());
}

TEST_CASE("equal states hash equal", "[state]") {
  RandomStream rng(5150);
  critnet::NetworkStateHash h;
  for (int trial = 0; trial < 100; ++trial) {
    auto n = static_cast<std::uint32_t>(1 + rng.next_below(200));
    auto a = critnet::random_state(n, rng);
    auto b = a;
    REQUIRE(h(a) == h(b));
    b.flip(static_cast<std::uint32_t>(rng.next_below(n)));
    REQUIRE(a != b);
  }
}
