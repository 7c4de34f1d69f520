#pragma once

// Glues levels into one pair (S, Q). S is the union of the S_n; each Q_n block
// is pushed right by a whole offset M_n, and f_n moves with it.
//
// Offset rule (default): M_n = ceil(max(previous right edge + N_n, n² · Σ_{k<=n} |Q_k|)).
// Blocks stay disjoint and |Q ∩ (-r, r)| / r <= 1/n² at r = M_n + N_n.
// The alternative places Q_n at 2 N_n, which keeps the thinness radius 1/|x|
// comparable to the cell size but gives up the 1/n² density bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "annpair/counterexample.hpp"
#include "annpair/interval_set.hpp"
#include "annpair/set_predicates.hpp"

namespace annpair {

enum class Placement { density_rule, double_scale };

struct LevelPlacement {
  int n = 0;
  std::int64_t N = 0;
  std::int64_t offset = 0;     // M_n
  double block_lo = 0.0;       // hull of Q_n + M_n
  double block_hi = 0.0;
  double q_measure = 0.0;      // |Q_n|
  double cumulative = 0.0;     // Σ_{k<=n} |Q_k|
  double edge_radius = 0.0;    // M_n + N_n
  double edge_density = 0.0;   // |Q ∩ (-r, r)| / r at the edge radius
  double density_bound = 0.0;  // 1/n² + |Q_n|/M_n
};

struct GlobalAssembly {
  std::vector<CounterexampleInstance> levels;  // translated: Q_n and f carry M_n
  IntervalSet S;
  BlockUnion Q;
  std::vector<LevelPlacement> placements;
  Placement rule = Placement::density_rule;
};

[[nodiscard]] inline CounterexampleInstance translate_instance(const CounterexampleInstance& inst,
                                                               std::int64_t offset) {
  CounterexampleInstance out = inst;
  const std::int64_t delta = offset - static_cast<std::int64_t>(inst.offset);
  out.Q_n = inst.Q_n.shifted_by_periods(delta * inst.params.N);
  out.f = inst.f.translated(static_cast<double>(delta));
  out.offset = static_cast<double>(offset);
  return out;
}

[[nodiscard]] inline GlobalAssembly assemble_global(const std::vector<CounterexampleInstance>& levels,
                                                    Placement rule = Placement::density_rule) {
  if (levels.empty()) throw std::invalid_argument("assemble_global: no levels");
  GlobalAssembly out;
  out.rule = rule;
  double right = 0.0;
  double cumulative = 0.0;
  std::vector<PeriodicIntervalSet> blocks;
  for (const auto& base : levels) {
    if (base.offset != 0.0) throw std::invalid_argument("assemble_global: levels must be untranslated");
    const auto& p = base.params;
    const double N = static_cast<double>(p.N);
    const double q_measure = base.Q_n.measure();
    std::int64_t offset = 0;
    if (rule == Placement::density_rule) {
      const double need = std::max(right + N, sqr(static_cast<double>(p.n)) * (cumulative + q_measure));
      offset = static_cast<std::int64_t>(std::ceil(need));
    } else {
      offset = 2 * p.N;
      if (static_cast<double>(offset) - N < right) {
        throw std::domain_error("assemble_global: Q_n + 2N_n overlaps the previous block at n = " +
                                std::to_string(p.n));
      }
    }
    auto moved = translate_instance(base, offset);
    const auto hull = moved.Q_n.hull();
    cumulative += q_measure;
    LevelPlacement lp;
    lp.n = p.n;
    lp.N = p.N;
    lp.offset = offset;
    lp.block_lo = hull ? hull->lo() : static_cast<double>(offset);
    lp.block_hi = hull ? hull->hi() : static_cast<double>(offset);
    lp.q_measure = q_measure;
    lp.cumulative = cumulative;
    lp.edge_radius = static_cast<double>(offset) + N;
    lp.density_bound = 1.0 / sqr(static_cast<double>(p.n)) + q_measure / static_cast<double>(offset);
    out.placements.push_back(lp);
    right = static_cast<double>(offset) + N;
    blocks.push_back(moved.Q_n);
    out.S = unite(out.S, base.S_n.materialize());
    out.levels.push_back(std::move(moved));
  }
  out.Q = BlockUnion(std::move(blocks));
  for (auto& lp : out.placements) {
    lp.edge_density = out.Q.measure_in(Interval(-lp.edge_radius, lp.edge_radius)) / lp.edge_radius;
  }
  return out;
}

/// Thinness probes for one block: every cell midpoint and cell edge of the
/// translated Q_n, capped to `max_probes` evenly spaced cells.
[[nodiscard]] inline std::vector<double> block_probes(const PeriodicIntervalSet& q, std::int64_t max_probes = 4096) {
  std::vector<double> out;
  if (q.empty()) return out;
  const std::int64_t copies = q.copy_count();
  const std::int64_t stride = std::max<std::int64_t>(1, copies / std::max<std::int64_t>(1, max_probes));
  const auto& piece = q.pattern().parts().front();
  for (std::int64_t j = q.index_lo(); j <= q.index_hi(); j += stride) {
    const double lo = q.copy_lo(j, piece);
    const double hi = q.copy_hi(j, piece);
    out.push_back(0.5 * (lo + hi));
    out.push_back(lo);
  }
  return out;
}

struct BlockThinness {
  int n = 0;
  ThinnessResult result;
  double c_measured = 0.0;  // n · worst ratio
};

/// Per-block ε-thin audit with ε = c / n.
[[nodiscard]] inline std::vector<BlockThinness> blockwise_thinness(const GlobalAssembly& g, double c,
                                                                   std::int64_t max_probes = 4096) {
  std::vector<BlockThinness> out;
  for (const auto& lvl : g.levels) {
    const auto probes = block_probes(lvl.Q_n, max_probes);
    BlockThinness bt;
    bt.n = lvl.params.n;
    bt.result = epsilon_thin_check(g.Q, c / lvl.params.n, probes);
    bt.c_measured = bt.result.worst_ratio * lvl.params.n;
    out.push_back(bt);
  }
  return out;
}

}  // namespace annpair
