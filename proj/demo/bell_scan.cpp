// Walks the ladder rung state across x = g/(2a^2) and prints which kind of
// correlation survives at each point.

#include "mpsbell/mpsbell.hpp"

#include <cstdio>

int main() {
  using namespace mpsbell;
  const ModelFamily ladder = ladder_family(1.0);
  std::printf("%6s %10s %10s %10s  %s\n", "x", "B", "C", "D", "regime");
  for (double x : make_grid(-2.0, 2.0, 0.25)) {
    const PairState ps = pair_state(ladder, ladder_g(x, 1.0), kRung, ChainLength::infinite());
    const CorrelationReport r = classify(TwoQubitState(ps.rho));
    const char *regime = r.nonlocal ? "nonlocal" : r.entangled ? "entangled, local" : r.discordant ? "discord only" : "classical";
    std::printf("%6.2f %10.6f %10.6f %10.6f  %s%s\n", x, r.bcf, r.concurrence, r.discord, regime,
                ps.fallback ? " (level crossing, finite ring)" : "");
  }
}
