#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "critnet/generators.hpp"
#include "critnet/io.hpp"
#include "critnet/rng.hpp"

using critnet::RandomStream;
using critnet::ShortcutDist;
using critnet::SmallWorldParams;
using critnet::Topology;
using critnet::TopologyClass;
using critnet::TopologySpec;

namespace {

std::string serialize(const Topology& t) {
  std::ostringstream os;
  critnet::write_topology(t, os);
  return os.str();
}

}  // namespace

TEST_CASE("exact-K wiring gives every node K inputs", "[generators]") {
  RandomStream rng(1);
  auto topo = critnet::gen_rbn_exact(8, 3, true, rng);
  REQUIRE(topo.n_nodes == 8);
  REQUIRE(topo.link_count() == 24);
  for (std::uint32_t i = 0; i < 8; ++i) REQUIRE(topo.in_degree(i) == 3);

  auto empty = critnet::gen_rbn_exact(5, 0, true, rng);
  REQUIRE(empty.link_count() == 0);
  REQUIRE_THROWS_AS(critnet::gen_rbn_exact(4, 4, false, rng), std::invalid_argument);
  REQUIRE_NOTHROW(critnet::gen_rbn_exact(4, 4, true, rng));
}

TEST_CASE("no-self wiring never produces self-loops", "[generators]") {
  RandomStream rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    auto trial_stream = rng.child(trial);
    auto n = static_cast<std::uint32_t>(4 + rng.next_below(18));
    auto k = static_cast<std::uint32_t>(rng.next_below(n));
    auto exact_stream = trial_stream.child(0);
    auto exact = critnet::gen_rbn_exact(n, k, false, exact_stream);
    for (std::uint32_t i = 0; i < n; ++i)
      for (auto src : exact.in_edges(i)) REQUIRE(src != i);
    auto avg_stream = trial_stream.child(1);
    auto avg = critnet::gen_random_avg(n, 0.5 + rng.next_double() * 2.0, false, avg_stream);
    for (std::uint32_t i = 0; i < n; ++i)
      for (auto src : avg.in_edges(i)) REQUIRE(src != i);
  }
}

TEST_CASE("average-K wiring places exactly round(N*K) links", "[generators]") {
  RandomStream rng(3);
  auto topo = critnet::gen_random_avg(100, 2.0, true, rng);
  REQUIRE(topo.link_count() == 200);
  auto none = critnet::gen_random_avg(50, 0.0, true, rng);
  REQUIRE(none.link_count() == 0);
  REQUIRE_THROWS_AS(critnet::gen_random_avg(4, 5.0, false, rng), std::invalid_argument);

  for (int trial = 0; trial < 1000; ++trial) {
    auto n = static_cast<std::uint32_t>(2 + rng.next_below(60));
    bool self = rng.bernoulli(0.5);
    double k_cap = self ? n : n - 1;
    double k = rng.next_double() * k_cap;
    auto t = critnet::gen_random_avg(n, k, self, rng);
    REQUIRE(t.link_count() ==
            static_cast<std::uint64_t>(std::llround(double(n) * k)));
  }
}

TEST_CASE("random in-degrees follow the sampling distribution", "[generators]") {
  const std::uint32_t n = 256;
  const std::uint64_t links = 512;
  const int networks = 2000;
  RandomStream rng(414243);
  std::vector<std::uint64_t> counts(9, 0);  // 0..7 and 8+
  for (int net = 0; net < networks; ++net) {
    auto net_stream = rng.child(net);
    auto topo = critnet::gen_random_avg(n, 2.0, true, net_stream);
    for (std::uint32_t i = 0; i < n; ++i)
      ++counts[std::min<std::uint32_t>(topo.in_degree(i), 8)];
  }
  // In-degree of one node is hypergeometric: L draws from n^2 pairs, n of
  // which hit the node.
  auto ln_choose = [](double a, double b) {
    return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1);
  };
  const double total = double(networks) * n;
  double chi2 = 0.0;
  double tail_p = 1.0;
  for (int d = 0; d < 8; ++d) {
    const double lp = ln_choose(n, d) + ln_choose(double(n) * n - n, double(links) - d) -
                      ln_choose(double(n) * n, links);
    const double p = std::exp(lp);
    tail_p -= p;
    const double expected = total * p;
    chi2 += (counts[d] - expected) * (counts[d] - expected) / expected;
  }
  const double expected_tail = total * tail_p;
  chi2 += (counts[8] - expected_tail) * (counts[8] - expected_tail) / expected_tail;
  REQUIRE(chi2 < 30.0);  // df = 8, far beyond the 99.9th percentile
}

TEST_CASE("full lattice wiring is the four-neighbor torus", "[generators]") {
  auto topo = critnet::gen_ca_lattice(4);
  REQUIRE(topo.n_nodes == 16);
  REQUIRE(topo.link_count() == 64);
  REQUIRE_THAT(topo.mean_in_degree(), Catch::Matchers::WithinAbs(4.0, 1e-12));
  for (std::uint32_t i = 0; i < 16; ++i) {
    REQUIRE(topo.in_degree(i) == 4);
    for (auto src : topo.in_edges(i)) {
      REQUIRE(src != i);
      REQUIRE(critnet::lattice_neighbors(4, i, src));
    }
  }
  auto corner = topo.in_edges(0);
  REQUIRE(std::vector<std::uint32_t>(corner.begin(), corner.end()) ==
          std::vector<std::uint32_t>{1, 3, 4, 12});
  REQUIRE_THROWS_AS(critnet::gen_ca_lattice(1), std::invalid_argument);
}

TEST_CASE("diluted lattice keeps exactly round(N*K) lattice links", "[generators]") {
  auto stream = RandomStream(77).child(0);
  auto topo = critnet::gen_ca_diluted(32, 2.4, stream);
  REQUIRE(topo.n_nodes == 1024);
  REQUIRE(topo.link_count() == 2458);
  for (std::uint32_t i = 0; i < topo.n_nodes; ++i)
    for (auto src : topo.in_edges(i)) REQUIRE(critnet::lattice_neighbors(32, i, src));

  auto s2 = RandomStream(78).child(0);
  REQUIRE_THROWS_AS(critnet::gen_ca_diluted(4, 4.5, s2), std::invalid_argument);
}

TEST_CASE("dilution at K=4 reproduces the full lattice exactly", "[generators]") {
  for (std::uint32_t side : {3u, 4u, 7u}) {
    auto stream = RandomStream(5).child(0);
    auto diluted = critnet::gen_ca_diluted(side, 4.0, stream);
    auto full = critnet::gen_ca_lattice(side);
    REQUIRE(diluted.in_offsets == full.in_offsets);
    REQUIRE(diluted.in_sources == full.in_sources);
  }
  // The side-2 torus has only two distinct neighbors per node.
  auto stream2 = RandomStream(5).child(0);
  auto tiny = critnet::gen_ca_diluted(2, 2.0, stream2);
  auto tiny_full = critnet::gen_ca_lattice(2);
  REQUIRE(tiny.in_sources == tiny_full.in_sources);
}

TEST_CASE("candidate link counts per class", "[generators]") {
  TopologySpec spec;
  spec.cls = TopologyClass::rbn_exact_k;
  spec.n_nodes = 8;
  spec.allow_self = true;
  REQUIRE(critnet::candidate_link_count(spec) == 64);
  spec.allow_self = false;
  REQUIRE(critnet::candidate_link_count(spec) == 56);
  spec.cls = TopologyClass::ca_diluted;
  spec.n_nodes = 16;
  REQUIRE(critnet::candidate_link_count(spec) == 64);
  spec.n_nodes = 4;  // side 2 collapses opposite neighbors
  REQUIRE(critnet::candidate_link_count(spec) == 8);
}

TEST_CASE("side_of accepts only perfect squares", "[generators]") {
  REQUIRE(critnet::side_of(1024) == 32);
  REQUIRE_THROWS_AS(critnet::side_of(1000), std::invalid_argument);
}

TEST_CASE("small world at p=0 is the base lattice", "[generators]") {
  SmallWorldParams sw;
  sw.p = 0.0;
  auto stream = RandomStream(10).child(0);
  auto topo = critnet::gen_small_world(8, sw, stream);
  auto base = critnet::gen_ca_lattice(8);
  REQUIRE(topo.in_offsets == base.in_offsets);
  REQUIRE(topo.in_sources == base.in_sources);
  REQUIRE(topo.class_tag == critnet::ClassTag::small_world);

  sw.ring = true;
  sw.k_base = 4;
  auto rstream = RandomStream(11).child(0);
  auto ring = critnet::gen_small_world(16, sw, rstream);
  REQUIRE(ring.geometry == critnet::GeometryKind::ring);
  for (std::uint32_t i = 0; i < 16; ++i) {
    std::vector<std::uint32_t> want{(i + 14) % 16, (i + 15) % 16, (i + 1) % 16,
                                    (i + 2) % 16};
    std::sort(want.begin(), want.end());
    auto got = ring.in_edges(i);
    REQUIRE(std::vector<std::uint32_t>(got.begin(), got.end()) == want);
  }
}

TEST_CASE("rewiring preserves the link count", "[generators]") {
  RandomStream root(12);
  std::uint64_t item = 0;
  for (double p : {0.01, 0.1, 0.5, 1.0}) {
    for (auto dist : {ShortcutDist::uniform, ShortcutDist::power_law,
                      ShortcutDist::gaussian}) {
      for (int rep = 0; rep < 5; ++rep) {
        SmallWorldParams sw;
        sw.p = p;
        sw.dist = dist;
        auto stream = root.child(item++);
        auto topo = critnet::gen_small_world(8, sw, stream);
        REQUIRE(topo.link_count() == 4 * 64);
        for (std::uint32_t i = 0; i < topo.n_nodes; ++i)
          for (auto src : topo.in_edges(i)) REQUIRE(src != i);
      }
    }
  }
}

TEST_CASE("small world parameter validation", "[generators]") {
  auto stream = RandomStream(13).child(0);
  SmallWorldParams sw;
  sw.p = -0.1;
  REQUIRE_THROWS_AS(critnet::gen_small_world(8, sw, stream), std::invalid_argument);
  sw.p = 0.5;
  sw.dist = ShortcutDist::power_law;
  sw.alpha = 0.0;
  REQUIRE_THROWS_AS(critnet::gen_small_world(8, sw, stream), std::invalid_argument);
  sw.dist = ShortcutDist::gaussian;
  sw.sigma = -1.0;
  REQUIRE_THROWS_AS(critnet::gen_small_world(8, sw, stream), std::invalid_argument);
  sw = SmallWorldParams{};
  sw.ring = true;
  sw.k_base = 3;
  REQUIRE_THROWS_AS(critnet::gen_small_world(8, sw, stream), std::invalid_argument);
  sw.ring = false;
  sw.k_base = 6;
  REQUIRE_THROWS_AS(critnet::gen_small_world(8, sw, stream), std::invalid_argument);
}

TEST_CASE("power-law shortcuts reproduce the target exponent", "[generators]") {
  const std::uint32_t side = 64;
  const std::uint32_t n = side * side;
  SmallWorldParams sw;
  sw.p = 1.0;
  sw.dist = ShortcutDist::power_law;
  sw.alpha = 2.0;
  auto stream = RandomStream(1900).child(0);
  auto topo = critnet::gen_small_world(side, sw, stream);

  const int kBins = 10;  // lengths [1,2) .. [10,11)
  std::vector<double> drawn(kBins, 0.0), cand(kBins, 0.0), cand_len(kBins, 0.0);
  for (std::uint32_t i = 0; i < n; ++i)
    for (auto src : topo.in_edges(i)) {
      const double d = critnet::toroidal_distance(topo, i, src);
      const int bin = static_cast<int>(d) - 1;
      if (bin >= 0 && bin < kBins) drawn[bin] += 1.0;
    }
  for (std::uint32_t o = 1; o < n; ++o) {
    const double d =
        critnet::detail::OffsetSampler::offset_distance(o, side, false, n);
    const int bin = static_cast<int>(d) - 1;
    if (bin >= 0 && bin < kBins) {
      cand[bin] += 1.0;
      cand_len[bin] += d;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int b = 0; b < kBins; ++b) {
    REQUIRE(drawn[b] > 0.0);
    const double x = std::log(cand_len[b] / cand[b]);
    const double y = std::log(drawn[b] / cand[b]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (kBins * sxy - sx * sy) / (kBins * sxx - sx * sx);
  REQUIRE_THAT(slope, Catch::Matchers::WithinAbs(-2.0, 0.2));
}

TEST_CASE("gaussian shortcuts stay shorter than uniform ones", "[generators]") {
  const std::uint32_t side = 32;
  auto mean_len = [&](ShortcutDist dist) {
    SmallWorldParams sw;
    sw.p = 1.0;
    sw.dist = dist;
    sw.sigma = 2.0;
    auto stream = RandomStream(2020).child(0);
    auto topo = critnet::gen_small_world(side, sw, stream);
    double total = 0.0;
    for (std::uint32_t i = 0; i < topo.n_nodes; ++i)
      for (auto src : topo.in_edges(i))
        total += critnet::toroidal_distance(topo, i, src);
    return total / double(topo.link_count());
  };
  REQUIRE(mean_len(ShortcutDist::gaussian) < 0.5 * mean_len(ShortcutDist::uniform));
}

TEST_CASE("generation is deterministic per seed", "[generators]") {
  for (int seed = 0; seed < 20; ++seed) {
    auto s1 = RandomStream(seed).child(0);
    auto s2 = RandomStream(seed).child(0);
    REQUIRE(serialize(critnet::gen_rbn_exact(12, 3, false, s1)) ==
            serialize(critnet::gen_rbn_exact(12, 3, false, s2)));
    REQUIRE(serialize(critnet::gen_random_avg(30, 2.5, true, s1)) ==
            serialize(critnet::gen_random_avg(30, 2.5, true, s2)));
    REQUIRE(serialize(critnet::gen_ca_diluted(5, 1.7, s1)) ==
            serialize(critnet::gen_ca_diluted(5, 1.7, s2)));
    SmallWorldParams sw;
    sw.p = 0.3;
    REQUIRE(serialize(critnet::gen_small_world(5, sw, s1)) ==
            serialize(critnet::gen_small_world(5, sw, s2)));
  }
}

TEST_CASE("gen_topology dispatches on the class", "[generators]") {
  TopologySpec spec;
  spec.cls = TopologyClass::ca_diluted;
  spec.n_nodes = 36;
  spec.k_param = 2.0;
  auto s1 = RandomStream(31).child(0);
  auto s2 = RandomStream(31).child(0);
  auto a = critnet::gen_topology(spec, s1);
  auto b = critnet::gen_ca_diluted(6, 2.0, s2);
  REQUIRE(serialize(a) == serialize(b));

  spec.cls = TopologyClass::small_world;
  spec.sw.ring = true;
  spec.sw.k_base = 2;
  spec.n_nodes = 10;
  auto s3 = RandomStream(32).child(0);
  auto ring = critnet::gen_topology(spec, s3);
  REQUIRE(ring.n_nodes == 10);
  REQUIRE(ring.geometry == critnet::GeometryKind::ring);
}
