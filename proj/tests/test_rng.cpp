#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "critnet/rng.hpp"

using critnet::RandomStream;

TEST_CASE("same seed and path give identical draws", "[rng]") {
  RandomStream a(12345);
  RandomStream b(12345);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

  auto c1 = RandomStream(7).child(3).child(9);
  auto c2 = RandomStream(7).child(3).child(9);
  for (int i = 0; i < 100; ++i) REQUIRE(c1.next_u64() == c2.next_u64());
}

TEST_CASE("different seeds or children diverge", "[rng]") {
  RandomStream a(1);
  RandomStream b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  REQUIRE(same == 0);

  RandomStream root(99);
  auto ca = root.child(0);
  auto cb = root.child(1);
  REQUIRE(ca.next_u64() != cb.next_u64());
}

TEST_CASE("children are unaffected by parent draws", "[rng]") {
  RandomStream root(555);
  auto before = root.child(4);
  std::vector<std::uint64_t> ref;
  for (int i = 0; i < 16; ++i) ref.push_back(before.next_u64());

  RandomStream root2(555);
  root2.next_u64();
  root2.next_u64();
  auto after = root2.child(4);
  for (int i = 0; i < 16; ++i) REQUIRE(after.next_u64() == ref[i]);
}

TEST_CASE("next_below stays in range", "[rng]") {
  RandomStream s(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uint64_t bound = 1 + s.next_u64() % 1000;
    REQUIRE(s.next_below(bound) < bound);
  }
  for (int i = 0; i < 50; ++i) REQUIRE(s.next_below(1) == 0);
  REQUIRE_THROWS_AS(s.next_below(0), std::invalid_argument);
}

TEST_CASE("next_double lies in [0,1) and is roughly uniform", "[rng]") {
  RandomStream s(2024);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double v = s.next_double();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  REQUIRE_THAT(sum / n, Catch::Matchers::WithinAbs(0.5, 0.01));
}

TEST_CASE("bernoulli edge probabilities", "[rng]") {
  RandomStream s(8);
  for (int i = 0; i < 200; ++i) {
    REQUIRE_FALSE(s.bernoulli(0.0));
    REQUIRE(s.bernoulli(1.0));
  }
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += s.bernoulli(0.25) ? 1 : 0;
  REQUIRE_THAT(static_cast<double>(ones) / n, Catch::Matchers::WithinAbs(0.25, 0.01));
}

TEST_CASE("sample_distinct draws distinct in-range values", "[rng]") {
  RandomStream s(404);
  for (int trial = 0; trial < 500; ++trial) {
    std::uint64_t universe = 2 + s.next_u64() % 200;
    std::uint64_t count = 1 + s.next_u64() % universe;
    auto got = s.sample_distinct(universe, count);
    REQUIRE(got.size() == count);
    std::set<std::uint64_t> uniq(got.begin(), got.end());
    REQUIRE(uniq.size() == count);
    for (auto v : got) REQUIRE(v < universe);
  }
  REQUIRE_THROWS_AS(s.sample_distinct(3, 4), std::invalid_argument);

  auto all = s.sample_distinct(100, 100);
  std::sort(all.begin(), all.end());
  for (std::uint64_t i = 0; i < 100; ++i) REQUIRE(all[i] == i);
}

TEST_CASE("master_seed survives child derivation", "[rng]") {
  RandomStream root(777);
  REQUIRE(root.master_seed() == 777);
  REQUIRE(root.child(12).child(0).master_seed() == 777);
}
