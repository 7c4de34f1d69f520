// Builds levels 2..4, prints how much of |f|^2 escapes Q_n, then audits a few
// shifted lattices against the assembled exceptional set.

#include <cstdio>
#include <memory>
#include <vector>

#include "annpair/annpair.hpp"

int main() {
  using namespace annpair;
  const auto bump = std::make_shared<const Bump>(build_bump());
  std::printf("bump: C1 = %.6f, table to |xi| <= %g\n", bump->decay_constant(), bump->table_limit());

  std::vector<CounterexampleInstance> levels;
  for (int n = 2; n <= 4; ++n) {
    const auto res = choose_N(n, bump);
    const auto& r = res.report;
    std::printf("n=%d  d=%-3d N=%-6lld |S_n|=%.6f  off+tail / total = %.4f  (n * ratio = %.3f)\n", n, r.d,
                static_cast<long long>(r.N), build_S_n(res.params).measure(), r.ratio, n * r.ratio);
    levels.push_back(build_instance(res.params, bump));
  }

  const auto g = assemble_global(levels);
  for (const auto& p : g.placements) {
    std::printf("Q_%d placed at %lld: density at r=%.0f is %.4f (<= 1/n^2 = %.4f)\n", p.n,
                static_cast<long long>(p.offset), p.edge_radius, p.edge_density, 1.0 / (p.n * p.n));
  }
  for (std::uint64_t j = 1; j <= 4; ++j) {
    const double alpha = dense_sequence(j);
    const auto a = bm_hypothesis_audit(alpha, g.Q, 0.2, 24);
    std::printf("alpha=%.4f: %d/25 blocks pass, tail from j=%d %s\n", alpha, a.passed, a.tail_from,
                a.tail_pass ? "passes" : "fails");
  }
  return 0;
}
