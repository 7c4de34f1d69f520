#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "annpair/interval_set.hpp"

namespace annpair {

struct DensitySample {
  double radius;
  double ratio;  // |q ∩ (-r, r)| / r
};

/// |q ∩ (-r, r)| / r for each radius. A set passes a density-zero audit when
/// the tail of this profile sits below the caller's tolerance.
template <IntervalSource Q>
[[nodiscard]] std::vector<DensitySample> density_profile(const Q& q, std::span<const double> radii) {
  std::vector<DensitySample> out;
  out.reserve(radii.size());
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("density_profile: radii must be positive and finite");
    }
    out.push_back({r, q.measure_in(Interval(-r, r)) / r});
  }
  return out;
}

struct ThinnessResult {
  bool pass = true;
  double eps = 0.0;
  double worst_probe = 0.0;
  double worst_ratio = 0.0;   // max over probes of |q ∩ [x-ρ, x+ρ]| / (2ρ)
  double max_violation = 0.0; // worst_ratio / eps; pass iff <= 1
};

[[nodiscard]] inline double thinness_radius(double x) noexcept {
  const double ax = std::abs(x);
  return ax <= 1.0 ? 1.0 : 1.0 / ax;
}

/// Checks |q ∩ [x-ρ(x), x+ρ(x)]| <= 2 eps ρ(x) with ρ(x) = min(1, 1/|x|) at every probe.
template <IntervalSource Q>
[[nodiscard]] ThinnessResult epsilon_thin_check(const Q& q, double eps, std::span<const double> probes) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon_thin_check: eps must be positive");
  ThinnessResult res;
  res.eps = eps;
  res.worst_ratio = -1.0;
  for (double x : probes) {
    const double rho = thinness_radius(x);
    const double ratio = q.measure_in(Interval(x - rho, x + rho)) / (2.0 * rho);
    if (ratio > res.worst_ratio) {
      res.worst_ratio = ratio;
      res.worst_probe = x;
    }
  }
  res.worst_ratio = std::max(res.worst_ratio, 0.0);
  res.max_violation = res.worst_ratio / eps;
  res.pass = res.worst_ratio <= eps;
  return res;
}

/// True iff s misses gap + k*period for every k whose translate meets window.
template <IntervalSource S>
[[nodiscard]] bool periodic_gap_check(const S& s, const Interval& gap, double period, const Interval& window) {
  if (!(period > 0.0)) throw std::invalid_argument("periodic_gap_check: period must be positive");
  // Translates meeting the window can reach one gap length past either end.
  const Interval reach(window.lo() - gap.length() - period, window.hi() + gap.length() + period);
  bool ok = true;
  s.for_each_in(reach, [&](double lo, double hi) {
    if (!ok) return;
    const double k_first = std::floor((lo - gap.hi()) / period) - 1.0;
    const double k_last = std::ceil((hi - gap.lo()) / period) + 1.0;
    if (k_last - k_first > 4.0e6) {
      // A piece spanning millions of periods certainly covers some translate.
      ok = false;
      return;
    }
    for (double k = k_first; k <= k_last; k += 1.0) {
      const double g_lo = gap.lo() + k * period;
      const double g_hi = gap.hi() + k * period;
      if (!(g_lo < window.hi() && window.lo() < g_hi)) continue;
      if (std::max(lo, g_lo) < std::min(hi, g_hi)) {
        ok = false;
        return;
      }
    }
  });
  return ok;
}

/// Piecewise-constant w(t) on [0, 1): w is constant on [breakpoints[i].t, breakpoints[i+1].t),
/// the last step running to 1.
class MultiplicityProfile {
 public:
  struct Step {
    double t;
    std::int64_t w;
  };

  MultiplicityProfile() : steps_{{0.0, 0}} {}
  explicit MultiplicityProfile(std::vector<Step> steps) : steps_(std::move(steps)) {
    if (steps_.empty() || steps_.front().t != 0.0) {
      throw std::invalid_argument("MultiplicityProfile: first step must start at 0");
    }
  }

  [[nodiscard]] const std::vector<Step>& steps() const noexcept { return steps_; }

  [[nodiscard]] std::int64_t at(double t) const {
    if (t < 0.0 || t >= 1.0) throw std::out_of_range("MultiplicityProfile::at: t outside [0,1)");
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double v, const Step& s) { return v < s.t; });
    return std::prev(it)->w;
  }

  [[nodiscard]] double integral() const noexcept {
    CompensatedSum s;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const double end = i + 1 < steps_.size() ? steps_[i + 1].t : 1.0;
      s += static_cast<double>(steps_[i].w) * (end - steps_[i].t);
    }
    return s.value();
  }

  /// proj(S) = {w >= 1}.
  [[nodiscard]] IntervalSet support() const {
    IntervalSet out;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const double end = i + 1 < steps_.size() ? steps_[i + 1].t : 1.0;
      if (steps_[i].w >= 1) out.append_sorted(steps_[i].t, end);
    }
    return out;
  }

 private:
  std::vector<Step> steps_;
};

/// w(t) = #{k in Z : t + k in s} on [0, 1).
template <IntervalSource S>
[[nodiscard]] MultiplicityProfile projection_and_multiplicity(const S& s) {
  const auto h = s.hull();
  if (!h) return MultiplicityProfile{};
  if (!std::isfinite(h->lo()) || !std::isfinite(h->hi())) {
    throw std::invalid_argument("projection_and_multiplicity: set must be bounded");
  }
  std::vector<std::pair<double, int>> events;
  s.for_each_in(*h, [&](double lo, double hi) {
    for (double k = std::floor(lo); k < hi; k += 1.0) {
      const double a = std::max(lo, k) - k;
      const double b = hi >= k + 1.0 ? 1.0 : hi - k;
      if (a < b) {
        events.emplace_back(a, +1);
        events.emplace_back(b, -1);
      }
    }
  });
  std::sort(events.begin(), events.end());
  std::vector<MultiplicityProfile::Step> steps{{0.0, 0}};
  std::int64_t w = 0;
  for (std::size_t i = 0; i < events.size();) {
    const double t = events[i].first;
    while (i < events.size() && events[i].first == t) w += events[i++].second;
    if (t >= 1.0) break;
    if (steps.back().t == t) {
      steps.back().w = w;
    } else if (steps.back().w != w) {
      steps.push_back({t, w});
    }
  }
  // Collapse a leading step that was overwritten to match its predecessor.
  std::vector<MultiplicityProfile::Step> merged;
  for (const auto& st : steps) {
    if (!merged.empty() && merged.back().w == st.w) continue;
    merged.push_back(st);
  }
  return MultiplicityProfile(std::move(merged));
}

/// σ = |gap| / period after rescaling the period to 1; offset records where the
/// gap starts in rescaled units so it can be moved to [0, σ].
struct GapNormalization {
  double sigma;
  double offset;
};

template <IntervalSource S>
[[nodiscard]] GapNormalization sigma_from_gap(const S& s, double period, const Interval& gap) {
  const auto h = s.hull();
  if (h) {
    const Interval window(h->lo() - period, h->hi() + period);
    if (!periodic_gap_check(s, gap, period, window)) {
      throw std::domain_error("sigma_from_gap: set meets a translate of the gap");
    }
  }
  const double offset = gap.lo() / period - std::floor(gap.lo() / period);
  return {gap.length() / period, offset};
}

}  // namespace annpair
