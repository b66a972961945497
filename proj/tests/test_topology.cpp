#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "critnet/generators.hpp"
#include "critnet/io.hpp"
#include "critnet/rng.hpp"
#include "critnet/topology.hpp"

using critnet::ClassTag;
using critnet::GeometryKind;
using critnet::RandomStream;
using critnet::Topology;

TEST_CASE("topology_from_lists sorts sources and counts links", "[topology]") {
  std::vector<std::vector<std::uint32_t>> in{{2, 1}, {}, {0}};
  auto topo = critnet::topology_from_lists(3, in, ClassTag::rbn_random);
  REQUIRE(topo.n_nodes == 3);
  REQUIRE(topo.link_count() == 3);
  auto edges0 = topo.in_edges(0);
  REQUIRE(edges0.size() == 2);
  REQUIRE(edges0[0] == 1);
  REQUIRE(edges0[1] == 2);
  REQUIRE(topo.in_degree(1) == 0);
  REQUIRE_THAT(topo.mean_in_degree(), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("topology_from_lists rejects bad input", "[topology]") {
  REQUIRE_THROWS_AS(critnet::topology_from_lists(1, {{3}}, ClassTag::rbn_random),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(critnet::topology_from_lists(1, {{0, 0}}, ClassTag::rbn_random),
                    std::invalid_argument);
}

TEST_CASE("out adjacency transposes the in-edge list", "[topology]") {
  RandomStream rng(808);
  for (int trial = 0; trial < 200; ++trial) {
    auto n = static_cast<std::uint32_t>(4 + rng.next_below(38));
    double k = 0.5 + rng.next_double() * 3.0;
    auto topo = critnet::gen_random_avg(n, k, true, rng);
    auto out = critnet::build_out_adjacency(topo);
    std::uint64_t total = 0;
    for (std::uint32_t src = 0; src < n; ++src) {
      for (auto tgt : out.out_edges(src)) {
        auto in = topo.in_edges(tgt);
        REQUIRE(std::find(in.begin(), in.end(), src) != in.end());
        ++total;
      }
    }
    REQUIRE(total == topo.link_count());
  }
}

TEST_CASE("toroidal distance wraps both axes", "[topology]") {
  auto topo = critnet::gen_ca_lattice(8);
  REQUIRE(topo.has_geometry());
  REQUIRE(topo.side == 8);
  REQUIRE_THAT(critnet::toroidal_distance(topo, 0, 1), Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(critnet::toroidal_distance(topo, 0, 7), Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(critnet::toroidal_distance(topo, 0, 8), Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(critnet::toroidal_distance(topo, 0, 56), Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(critnet::toroidal_distance(topo, 0, 9),
               Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));
  REQUIRE_THAT(critnet::toroidal_distance(topo, 0, 36),
               Catch::Matchers::WithinAbs(std::sqrt(32.0), 1e-12));
}

TEST_CASE("ring geometry measures arc distance", "[topology]") {
  std::vector<std::vector<std::uint32_t>> in(8);
  for (std::uint32_t i = 0; i < 8; ++i) {
    in[i].push_back((i + 7) % 8);
    in[i].push_back((i + 1) % 8);
  }
  auto topo = critnet::topology_from_lists(8, in, ClassTag::small_world,
                                           GeometryKind::ring);
  REQUIRE_THAT(critnet::toroidal_distance(topo, 0, 3), Catch::Matchers::WithinAbs(3.0, 1e-12));
  REQUIRE_THAT(critnet::toroidal_distance(topo, 0, 5), Catch::Matchers::WithinAbs(3.0, 1e-12));
  REQUIRE_THAT(critnet::toroidal_distance(topo, 7, 0), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("topology serialization round-trips byte for byte", "[topology]") {
  RandomStream rng(112);
  for (int trial = 0; trial < 100; ++trial) {
    auto n = static_cast<std::uint32_t>(2 + rng.next_below(30));
    auto topo = critnet::gen_random_avg(n, 1.5, true, rng);
    std::ostringstream first;
    critnet::write_topology(topo, first);
    std::istringstream back(first.str());
    auto loaded = critnet::read_network(back);
    REQUIRE_FALSE(loaded.rules.has_value());
    std::ostringstream second;
    critnet::write_topology(loaded.topology, second);
    REQUIRE(first.str() == second.str());
    REQUIRE(loaded.topology.n_nodes == topo.n_nodes);
    REQUIRE(loaded.topology.in_sources == topo.in_sources);
    REQUIRE(loaded.topology.in_offsets == topo.in_offsets);
  }
}

TEST_CASE("lattice serialization restores geometry", "[topology]") {
  auto stream = RandomStream(9).child(0);
  auto topo = critnet::gen_ca_diluted(6, 2.5, stream);
  std::ostringstream out;
  critnet::write_topology(topo, out);
  std::istringstream in(out.str());
  auto loaded = critnet::read_network(in);
  REQUIRE(loaded.topology.geometry == GeometryKind::torus2d);
  REQUIRE(loaded.topology.side == 6);
  REQUIRE(loaded.topology.class_tag == topo.class_tag);
}

TEST_CASE("read_network rejects malformed input", "[topology]") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return critnet::read_network(in);
  };
  REQUIRE_THROWS_AS(parse("bogus header\n"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse("critnet-topology v2 N=2 class=RBN-random\n"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(parse("critnet-topology v1 N=2 class=RBN-random extra=1\n"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(parse("critnet-topology v1 N=2 class=RBN-random\n1\t5\n"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(parse("critnet-topology v1 N=2 class=RBN-random\n1\t0\n0\t1\n"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(parse("critnet-topology v1 N=2 class=RBN-random\n0\t1\n0\t1\n"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(parse("critnet-topology v1 N=2 class=nonsense\n"),
                    std::invalid_argument);
  REQUIRE_NOTHROW(parse("critnet-topology v1 N=2 class=RBN-random\n0\t1\n1\t0\n"));
}

TEST_CASE("validate rejects lattice tags with wrong size", "[topology]") {
  auto topo = critnet::gen_ca_lattice(4);
  topo.side = 3;
  REQUIRE_THROWS_AS(critnet::validate(topo), std::invalid_argument);
}

TEST_CASE("validate rejects CA edges off the lattice", "[topology]") {
  auto topo = critnet::gen_ca_lattice(4);
  topo.in_sources[0] = 10;  // not a von Neumann neighbor of node 0
  std::sort(topo.in_sources.begin(), topo.in_sources.begin() + 4);
  REQUIRE_THROWS_AS(critnet::validate(topo), std::invalid_argument);
}
