// Path length, clustering, and wiring cost of a 32x32 lattice as shortcuts
// are introduced with different length distributions.
#include <iostream>

#include "critnet/generators.hpp"
#include "critnet/io.hpp"
#include "critnet/metrics.hpp"
#include "critnet/rng.hpp"

int main() {
  using namespace critnet;
  RandomStream root(7);
  std::uint64_t item = 0;
  std::cout << "dist      p     avg_path clustering mean_wire\n";
  for (double p : {0.0, 0.1, 0.5}) {
    for (auto dist : {ShortcutDist::uniform, ShortcutDist::power_law,
                      ShortcutDist::gaussian}) {
      SmallWorldParams sw;
      sw.p = p;
      sw.dist = dist;
      sw.alpha = 4.0;
      sw.sigma = 2.0;
      auto stream = root.child(item++);
      const auto topo = gen_small_world(32, sw, stream);
      const auto path = avg_path_length(topo);
      const auto wc = wire_cost(topo);
      const char* name = dist == ShortcutDist::uniform     ? "uniform "
                         : dist == ShortcutDist::power_law ? "pow(a=4)"
                                                           : "gauss(2)";
      std::cout << name << ' ' << fmt_fixed(p, 2) << ' '
                << fmt_fixed(path.avg_path, 3) << ' '
                << fmt_fixed(clustering_coefficient(topo), 4) << ' '
                << fmt_fixed(wc.mean, 3) << '\n';
      if (p == 0.0) break;  // all distributions coincide at p = 0
    }
  }
  return 0;
}
