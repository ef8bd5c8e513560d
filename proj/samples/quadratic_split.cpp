// Splits a random quadratic into a cheap-to-condition h and an expensive g,
// solves it with the three-loop scheme and with plain FGM, and prints the
// oracle counts of each.
#include <cstdio>

#include "osplit/bench/baselines.hpp"
#include "osplit/problems/quadratic.hpp"

int main() {
  using namespace osplit;

  QuadraticSpec spec;
  spec.n = 60;
  spec.L_h = 1.0;
  spec.L_g = 100.0;
  spec.mu = 1e-2;
  Rng rng(42);
  const QuadraticInstance q = make_quadratic(spec, rng);

  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  cfg.target_value = q.f_star + cfg.epsilon;

  const RunReport ms = solve(*q.problem, cfg, make_inner_solver(InnerKind::apg));
  const RunReport fgm = baseline_fgm(*q.problem, cfg);

  for (const RunReport* r : {&ms, &fgm}) {
    const OracleTally t = r->total();
    std::printf("%-7s gap=%.3e  grad h calls=%-6lld  g units=%lld\n", r == &ms ? "ms-apg" : "fgm",
                q.gap(r->x), static_cast<long long>(t.h_grad_calls), static_cast<long long>(t.g_basic_units));
  }
  return 0;
}
