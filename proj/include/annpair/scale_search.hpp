#pragma once

// Picks the period scale N for one level: large enough that the certified tail
// past [-N, N] and the in-window mass off Q_n together stay under C/n of the
// total. Doubling finds a bracket, bisection then trims it, so the accepted N
// is close to the smallest admissible one rather than up to twice too large.

#include <cstdint>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "annpair/bump.hpp"
#include "annpair/concentration.hpp"
#include "annpair/counterexample.hpp"

namespace annpair {

struct ScaleSearchOptions {
  double target_c = 3.0;                   // target ratio is target_c / n
  std::int64_t n_cap = std::int64_t{1} << 24;
  ConcentrationOptions concentration{};
  int bisection_steps = 6;                 // stop once the bracket is below N/2^steps
};

struct ScaleProbe {
  std::int64_t N;
  double tail;
  double off;
  double total;
  bool accepted;
};

struct ScaleSearchResult {
  CounterexampleParams params;
  ConcentrationReport report;
  double target_ratio = 0.0;
  std::vector<ScaleProbe> probes;  // every N evaluated, in order
};

class ScaleSearchError : public std::runtime_error {
 public:
  ScaleSearchError(int n, std::int64_t last_N, double last_ratio, const std::string& what)
      : std::runtime_error(what), n_(n), last_N_(last_N), last_ratio_(last_ratio) {}
  [[nodiscard]] int level() const noexcept { return n_; }
  [[nodiscard]] std::int64_t last_scale() const noexcept { return last_N_; }
  [[nodiscard]] double last_ratio() const noexcept { return last_ratio_; }

 private:
  int n_;
  std::int64_t last_N_;
  double last_ratio_;
};

/// Accept N when tail <= target·total/2 and tail + off <= target·total.
[[nodiscard]] inline ScaleSearchResult choose_N(int n, std::shared_ptr<const Bump> bump,
                                                const ScaleSearchOptions& opt = {}) {
  if (!(opt.target_c > 0.0)) throw std::invalid_argument("choose_N: target_c must be positive");
  const DegreeChoice deg = choose_degree(n);
  const std::int64_t L = CounterexampleParams::compression(n, deg.d);
  if (opt.n_cap < L) {
    throw ScaleSearchError(n, L, 0.0, "choose_N: n_cap " + std::to_string(opt.n_cap) + " below L = " +
                                          std::to_string(L) + " at n = " + std::to_string(n));
  }

  ScaleSearchResult res;
  res.target_ratio = opt.target_c / n;
  auto probe = [&](std::int64_t N, ConcentrationReport& out) {
    const auto p = CounterexampleParams::make(deg, N);
    out = concentration_ratio(p, bump, opt.concentration);
    const double budget = res.target_ratio * out.total_mass;
    const bool ok = out.tail_bound <= 0.5 * budget && out.tail_bound + out.mass_off_Q_in_window <= budget;
    res.probes.push_back({N, out.tail_bound, out.mass_off_Q_in_window, out.total_mass, ok});
    return ok;
  };

  ConcentrationReport rep;
  std::int64_t lo = 0;  // largest rejected N, 0 if none yet
  std::int64_t hi = L;
  while (!probe(hi, rep)) {
    lo = hi;
    if (hi > opt.n_cap / 2) {
      std::ostringstream msg;
      msg << "choose_N: no admissible N <= cap " << opt.n_cap << " at n = " << n << " (last N = " << hi
          << ", ratio = " << rep.ratio << ", target = " << res.target_ratio << ")";
      throw ScaleSearchError(n, hi, rep.ratio, msg.str());
    }
    hi *= 2;
  }
  ConcentrationReport best = rep;
  if (lo > 0) {
    const std::int64_t resolution = std::max<std::int64_t>(1, lo >> opt.bisection_steps);
    while (hi - lo > resolution) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (probe(mid, rep)) {
        hi = mid;
        best = rep;
      } else {
        lo = mid;
      }
    }
  }
  res.params = CounterexampleParams::make(deg, hi);
  res.report = best;
  return res;
}

}  // namespace annpair
