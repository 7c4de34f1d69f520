#pragma once

// Counting points of the shifted lattice Z + α against a set q.
//
// Everything is exact: an endpoint a is split as floor(a) + frac(a) (both exact
// in binary floating point), and k + α >= a is decided by comparing (k, α)
// with (floor(a), frac(a)) lexicographically. Nothing ever rounds k + α.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "annpair/interval_set.hpp"
#include "annpair/numeric.hpp"

namespace annpair {

namespace detail {

struct SplitReal {
  std::int64_t whole;
  double frac;  // in [0, 1), exact
};

inline SplitReal split(double a) {
  if (!std::isfinite(a) || std::abs(a) > 9.0e15) throw std::out_of_range("lattice counting: endpoint out of range");
  const double w = std::floor(a);
  return {static_cast<std::int64_t>(w), a - w};
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("lattice counting: alpha must lie in [0, 1)");
}

/// First k with k + α >= a.
inline std::int64_t first_at_or_above(double alpha, const SplitReal& a) {
  return a.whole + (alpha < a.frac ? 1 : 0);
}

/// Last k with k + α < b.
inline std::int64_t last_below(double alpha, const SplitReal& b) {
  return b.whole - (alpha < b.frac ? 0 : 1);
}

}  // namespace detail

/// #{k ∈ Z : a <= k + α < b}.
[[nodiscard]] inline std::int64_t lattice_count(double alpha, double a, double b) {
  detail::check_alpha(alpha);
  if (!(a < b)) return 0;
  const auto sa = detail::split(a);
  const auto sb = detail::split(b);
  return std::max<std::int64_t>(0, detail::last_below(alpha, sb) - detail::first_at_or_above(alpha, sa) + 1);
}

/// Exact test of k + α ∈ q without forming k + α in floating point. Any piece
/// holding the exact value lies within a relative 2^-40 of its rounding.
template <IntervalSource Q>
[[nodiscard]] bool lattice_point_in(const Q& q, std::int64_t k, double alpha) {
  const double x = static_cast<double>(k) + alpha;
  const double slack = std::max(1.0, std::abs(x)) * 0x1p-40;
  bool hit = false;
  q.for_each_in(Interval(x - slack, x + slack), [&](double lo, double hi) {
    if (hit) return;
    const auto sl = detail::split(lo);
    const auto sh = detail::split(hi);
    const bool above = k > sl.whole || (k == sl.whole && alpha >= sl.frac);
    const bool below = k < sh.whole || (k == sh.whole && alpha < sh.frac);
    hit = above && below;
  });
  return hit;
}

/// #{k : k + α ∈ w \ q}. Walks whichever is smaller: q's pieces inside w, or
/// the lattice points of w.
template <IntervalSource Q>
[[nodiscard]] std::int64_t lattice_count_outside(const Q& q, double alpha, const Interval& w) {
  detail::check_alpha(alpha);
  const std::int64_t total = lattice_count(alpha, w.lo(), w.hi());
  if (total == 0) return 0;
  if (q.pieces_in(w) <= total) {
    std::int64_t inside = 0;
    q.for_each_in(w, [&](double lo, double hi) { inside += lattice_count(alpha, lo, hi); });
    return total - inside;
  }
  const std::int64_t first = detail::first_at_or_above(alpha, detail::split(w.lo()));
  std::int64_t out = 0;
  for (std::int64_t k = first; k < first + total; ++k) {
    if (!lattice_point_in(q, k, alpha)) ++out;
  }
  return out;
}

/// G(α, r) = #[(α + Z) ∩ q^c ∩ (0, r)] / r.
template <IntervalSource Q>
[[nodiscard]] double lattice_density_G(double alpha, double r, const Q& q) {
  if (!(r > 0.0)) throw std::invalid_argument("lattice_density_G: r must be positive");
  std::int64_t c = lattice_count_outside(q, alpha, Interval(0.0, r));
  // The count above used [0, r); the open interval drops k + α = 0.
  if (alpha == 0.0 && !q.contains(0.0)) --c;
  return static_cast<double>(c) / r;
}

/// G(·, r)·r as a step function of α on [0, 1): value steps[i].count on
/// [steps[i].alpha, steps[i+1].alpha). It counts [0, r), i.e. agrees with the
/// open-interval count except at the single point α = 0.
class LatticeCountProfile {
 public:
  struct Step {
    double alpha;
    std::int64_t count;
  };

  LatticeCountProfile(std::vector<Step> steps, double r) : steps_(std::move(steps)), r_(r) {
    if (steps_.empty() || steps_.front().alpha != 0.0) {
      throw std::invalid_argument("LatticeCountProfile: first step must start at 0");
    }
  }

  [[nodiscard]] const std::vector<Step>& steps() const noexcept { return steps_; }
  [[nodiscard]] double radius() const noexcept { return r_; }

  [[nodiscard]] std::int64_t count_at(double alpha) const {
    detail::check_alpha(alpha);
    auto it = std::upper_bound(steps_.begin(), steps_.end(), alpha,
                               [](double v, const Step& s) { return v < s.alpha; });
    return std::prev(it)->count;
  }

  [[nodiscard]] double G(double alpha) const { return static_cast<double>(count_at(alpha)) / r_; }

  /// ∫_0^1 G(α, r) dα, exact up to summation rounding.
  [[nodiscard]] double integral() const {
    CompensatedSum s;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const double end = i + 1 < steps_.size() ? steps_[i + 1].alpha : 1.0;
      s += static_cast<double>(steps_[i].count) * (end - steps_[i].alpha);
    }
    return s.value() / r_;
  }

  /// {α : G(α, r) > level}.
  [[nodiscard]] IntervalSet superlevel(double level) const {
    IntervalSet out;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const double end = i + 1 < steps_.size() ? steps_[i + 1].alpha : 1.0;
      if (static_cast<double>(steps_[i].count) / r_ > level) out.append_sorted(steps_[i].alpha, end);
    }
    return out;
  }

  [[nodiscard]] std::int64_t min_count() const {
    std::int64_t m = std::numeric_limits<std::int64_t>::max();
    for (const auto& s : steps_) m = std::min(m, s.count);
    return m;
  }
  [[nodiscard]] std::int64_t max_count() const {
    std::int64_t m = std::numeric_limits<std::int64_t>::min();
    for (const auto& s : steps_) m = std::max(m, s.count);
    return m;
  }

 private:
  std::vector<Step> steps_;
  double r_;
};

/// Count(α) = #{k : k + α ∈ [0, r) \ q} for all α at once. Each endpoint e of
/// a piece contributes ±[α < frac(e)]; the profile is the suffix sum of those
/// events over sorted fractional parts.
template <IntervalSource Q>
[[nodiscard]] LatticeCountProfile lattice_count_profile(const Q& q, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("lattice_count_profile: r must be positive");
  const auto sr = detail::split(r);
  std::int64_t base = sr.whole;  // floor(r) + [α < frac(r)], lower end 0 adds nothing
  std::vector<std::pair<double, std::int64_t>> events;
  // Periodic sets repeat the same fractional parts many times over; merging
  // equal fracs whenever the buffer fills keeps memory at the distinct count.
  std::size_t compact_at = std::size_t{1} << 22;
  auto compact = [&] {
    std::sort(events.begin(), events.end());
    std::size_t w = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (w > 0 && events[w - 1].first == events[i].first) {
        events[w - 1].second += events[i].second;
      } else {
        events[w++] = events[i];
      }
    }
    events.resize(w);
    compact_at = std::max(compact_at, 2 * w);
  };
  if (sr.frac > 0.0) events.emplace_back(sr.frac, +1);
  q.for_each_in(Interval(0.0, r), [&](double lo, double hi) {
    const auto a = detail::split(lo);
    const auto b = detail::split(hi);
    // lattice_count on [lo, hi) = (B - A) + [α < fb] - [α < fa]; subtract it.
    base -= b.whole - a.whole;
    if (b.frac > 0.0) events.emplace_back(b.frac, -1);
    if (a.frac > 0.0) events.emplace_back(a.frac, +1);
    if (events.size() >= compact_at) compact();
  });
  compact();
  // Value on [0, first event) includes every event; each event switches off at its frac.
  std::int64_t value = base;
  for (const auto& e : events) value += e.second;
  std::vector<LatticeCountProfile::Step> steps{{0.0, value}};
  for (std::size_t i = 0; i < events.size();) {
    const double f = events[i].first;
    while (i < events.size() && events[i].first == f) value -= events[i++].second;
    if (steps.back().count != value) steps.push_back({f, value});
  }
  return LatticeCountProfile(std::move(steps), r);
}

struct AveragedIdentity {
  double lhs;  // ∫_0^1 G(α, r) dα
  double rhs;  // |q^c ∩ (0, r)| / r
};

class IdentityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <IntervalSource Q>
[[nodiscard]] AveragedIdentity averaged_G_identity(const Q& q, double r, double tol = 1e-12) {
  const auto profile = lattice_count_profile(q, r);
  AveragedIdentity out;
  out.lhs = profile.integral();
  // Sum the represented pieces directly: a periodic set's measure_in shortcut
  // uses the pattern length, which differs from its rounded copies by ulps.
  CompensatedSum covered;
  q.for_each_in(Interval(0.0, r), [&](double lo, double hi) { covered += hi - lo; });
  out.rhs = (r - covered.value()) / r;
  if (!(std::abs(out.lhs - out.rhs) <= tol)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "averaged_G_identity: lhs %.17g != rhs %.17g", out.lhs, out.rhs);
    throw IdentityViolation(buf);
  }
  return out;
}

/// E_r = {α ∈ [0, 1) : G(α, r) > 1 - σ/4}.
template <IntervalSource Q>
[[nodiscard]] IntervalSet e_r_set(const Q& q, double r, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("e_r_set: sigma must lie in (0, 1)");
  return lattice_count_profile(q, r).superlevel(1.0 - sigma / 4.0);
}

struct BlockCertificate {
  double alpha = 0.0;
  int block_index = 0;
  std::int64_t count = 0;  // #[(Z + α) ∩ (B_j \ q)]
  double threshold = 0.0;  // (1 - σ/2) |B_j|
  bool pass = false;
};

/// B_j = [2^j, 2^{j+1}); pass iff the lattice keeps more than (1 - σ/2) 2^j points there.
template <IntervalSource Q>
[[nodiscard]] BlockCertificate block_certificate(double alpha, int j, const Q& q, double sigma) {
  if (j < 0 || j > 52) throw std::invalid_argument("block_certificate: j must lie in 0..52");
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("block_certificate: sigma must lie in (0, 1)");
  const double lo = std::ldexp(1.0, j);
  BlockCertificate c;
  c.alpha = alpha;
  c.block_index = j;
  c.count = lattice_count_outside(q, alpha, Interval(lo, 2.0 * lo));
  c.threshold = (1.0 - sigma / 2.0) * lo;
  c.pass = static_cast<double>(c.count) > c.threshold;
  return c;
}

struct BmAudit {
  double alpha = 0.0;
  std::vector<BlockCertificate> certificates;  // j = 0..j_max
  int passed = 0;
  int largest_passing = -1;
  int tail_from = 0;         // first block of the audited tail range
  bool tail_pass = false;    // every block in tail_from..j_max passed
};

/// First block lying wholly past a bounded q (every later block is untouched
/// by q), or (j_max+1)/2 when q is empty or reaches beyond 2^j_max.
template <IntervalSource Q>
[[nodiscard]] int default_tail_from(const Q& q, int j_max) {
  const auto h = q.hull();
  if (!h || !(h->hi() > 1.0)) return (j_max + 1) / 2;
  const int j = static_cast<int>(std::ceil(std::log2(h->hi())));
  return j <= j_max ? j : (j_max + 1) / 2;
}

/// Certificates for j = 0..j_max. Only this finite prefix is ever certified.
template <IntervalSource Q>
[[nodiscard]] BmAudit bm_hypothesis_audit(double alpha, const Q& q, double sigma, int j_max, int tail_from = -1) {
  if (j_max < 0 || j_max > 52) throw std::invalid_argument("bm_hypothesis_audit: j_max must lie in 0..52");
  BmAudit a;
  a.alpha = alpha;
  a.tail_from = tail_from < 0 ? default_tail_from(q, j_max) : std::min(tail_from, j_max);
  a.tail_pass = true;
  for (int j = 0; j <= j_max; ++j) {
    auto c = block_certificate(alpha, j, q, sigma);
    if (c.pass) {
      ++a.passed;
      a.largest_passing = j;
    } else if (j >= a.tail_from) {
      a.tail_pass = false;
    }
    a.certificates.push_back(c);
  }
  return a;
}

/// Binary radical inverse of j: 1 -> 1/2, 2 -> 1/4, 3 -> 3/4, ...
[[nodiscard]] inline double dense_sequence(std::uint64_t j) {
  if (j == 0) throw std::invalid_argument("dense_sequence: j must be >= 1");
  double v = 0.0;
  double bit = 0.5;
  while (j != 0) {
    if (j & 1U) v += bit;
    bit *= 0.5;
    j >>= 1U;
  }
  return v;
}

struct LambdaAssembly {
  std::vector<double> alphas;                  // accepted α, in order
  std::vector<double> skipped;                 // α rejected by the audit
  std::vector<std::vector<double>> per_alpha;  // Γ_α ∩ window
  std::vector<double> lambda;                  // merged, sorted
  Interval window{0.0, 1.0};
  int j_max = 0;
  int tail_from = 0;
};

struct LambdaOptions {
  std::uint64_t sample_budget = 1024;  // dense-sequence terms tried before giving up
  int tail_from = -1;                  // audited tail range start, default_tail_from when negative
};

class InsufficientAlphas : public std::runtime_error {
 public:
  InsufficientAlphas(const std::string& what, std::size_t accepted, std::size_t skipped)
      : std::runtime_error(what), accepted_(accepted), skipped_(skipped) {}
  [[nodiscard]] std::size_t accepted() const noexcept { return accepted_; }
  [[nodiscard]] std::size_t skipped() const noexcept { return skipped_; }

 private:
  std::size_t accepted_;
  std::size_t skipped_;
};

/// Λ = ∪_j Γ_{α_j} with Γ_α = (Z + α) ∩ q^c, over the first `count` dense α
/// whose audit tail passes. Points are emitted only when the exact membership
/// test says they miss q, and the result is re-checked point by point.
template <IntervalSource Q>
[[nodiscard]] LambdaAssembly assemble_lambda(const Q& q, double sigma, int count, const Interval& window,
                                             int audit_j_max, const LambdaOptions& opt = {}) {
  if (count < 1) throw std::invalid_argument("assemble_lambda: count must be >= 1");
  LambdaAssembly out;
  out.window = window;
  out.j_max = audit_j_max;
  for (std::uint64_t j = 1; j <= opt.sample_budget && static_cast<int>(out.alphas.size()) < count; ++j) {
    const double alpha = dense_sequence(j);
    const auto audit = bm_hypothesis_audit(alpha, q, sigma, audit_j_max, opt.tail_from);
    out.tail_from = audit.tail_from;
    if (!audit.tail_pass) {
      out.skipped.push_back(alpha);
      continue;
    }
    std::vector<double> gamma;
    const auto first = detail::first_at_or_above(alpha, detail::split(window.lo()));
    const auto last = detail::last_below(alpha, detail::split(window.hi()));
    for (std::int64_t k = first; k <= last; ++k) {
      if (!lattice_point_in(q, k, alpha)) gamma.push_back(static_cast<double>(k) + alpha);
    }
    out.alphas.push_back(alpha);
    out.lambda.insert(out.lambda.end(), gamma.begin(), gamma.end());
    out.per_alpha.push_back(std::move(gamma));
  }
  if (static_cast<int>(out.alphas.size()) < count) {
    throw InsufficientAlphas("assemble_lambda: only " + std::to_string(out.alphas.size()) + " of " +
                                 std::to_string(count) + " alphas passed within budget (" +
                                 std::to_string(out.skipped.size()) + " skipped)",
                             out.alphas.size(), out.skipped.size());
  }
  std::sort(out.lambda.begin(), out.lambda.end());
  if (std::adjacent_find(out.lambda.begin(), out.lambda.end()) != out.lambda.end()) {
    throw std::logic_error("assemble_lambda: duplicate points in Λ");
  }
  for (double x : out.lambda) {
    if (q.contains(x)) throw std::logic_error("assemble_lambda: emitted point lies in q");
  }
  return out;
}

}  // namespace annpair
