#pragma once

// Finite and periodic unions of half-open real intervals.
//
// Endpoints are plain doubles compared exactly; two intervals merge only when
// one starts exactly where the other ends. Every set type here models the
// IntervalSource concept so the predicates and lattice counters further up
// can work on any of them without expanding periodic data.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "annpair/numeric.hpp"

namespace annpair {

/// Half-open interval [lo, hi) with lo < hi.
class Interval {
 public:
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) {
      throw std::invalid_argument("Interval requires lo < hi, got [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + ")");
    }
  }

  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] double length() const noexcept { return hi_ - lo_; }
  [[nodiscard]] bool contains(double x) const noexcept { return lo_ <= x && x < hi_; }
  [[nodiscard]] bool meets(const Interval& o) const noexcept { return lo_ < o.hi_ && o.lo_ < hi_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_;
  double hi_;
};

/// Canonical finite union: sorted, pairwise disjoint, non-adjacent.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> parts) : IntervalSet(std::vector<Interval>(parts)) {}
  explicit IntervalSet(std::vector<Interval> parts) {
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.lo() < b.lo(); });
    for (const auto& p : parts) append_sorted(p.lo(), p.hi());
  }

  /// Builds from raw (lo, hi) pairs, silently dropping empty ones.
  static IntervalSet from_pairs(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<Interval> parts;
    parts.reserve(pairs.size());
    for (const auto& [lo, hi] : pairs) {
      if (lo < hi) parts.emplace_back(lo, hi);
    }
    return IntervalSet(std::move(parts));
  }

  /// Appends [lo, hi) whose lo is >= every stored lo. Empty input is ignored;
  /// overlapping or touching input is merged into the last interval.
  void append_sorted(double lo, double hi) {
    if (!(lo < hi)) return;
    if (!parts_.empty()) {
      const Interval& back = parts_.back();
      if (lo < back.lo()) throw std::logic_error("IntervalSet::append_sorted: input not sorted");
      if (lo <= back.hi()) {
        if (hi > back.hi()) parts_.back() = Interval(back.lo(), hi);
        return;
      }
    }
    parts_.emplace_back(lo, hi);
  }

  [[nodiscard]] const std::vector<Interval>& parts() const noexcept { return parts_; }
  [[nodiscard]] bool empty() const noexcept { return parts_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return parts_.size(); }

  [[nodiscard]] double measure() const noexcept {
    CompensatedSum s;
    for (const auto& p : parts_) s += p.length();
    return s.value();
  }

  [[nodiscard]] bool contains(double x) const noexcept {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                               [](double v, const Interval& p) { return v < p.lo(); });
    if (it == parts_.begin()) return false;
    return std::prev(it)->contains(x);
  }

  [[nodiscard]] std::optional<Interval> hull() const {
    if (parts_.empty()) return std::nullopt;
    return Interval(parts_.front().lo(), parts_.back().hi());
  }

  /// Calls fn(lo, hi) for each nonempty piece of this set inside w, ascending.
  template <class Fn>
  void for_each_in(const Interval& w, Fn&& fn) const {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), w.lo(),
                               [](double v, const Interval& p) { return v < p.lo(); });
    if (it != parts_.begin()) --it;
    for (; it != parts_.end() && it->lo() < w.hi(); ++it) {
      const double lo = std::max(it->lo(), w.lo());
      const double hi = std::min(it->hi(), w.hi());
      if (lo < hi) fn(lo, hi);
    }
  }

  [[nodiscard]] std::int64_t pieces_in(const Interval& w) const {
    std::int64_t n = 0;
    for_each_in(w, [&](double, double) { ++n; });
    return n;
  }

  [[nodiscard]] IntervalSet clip(const Interval& w) const {
    IntervalSet out;
    for_each_in(w, [&](double lo, double hi) { out.append_sorted(lo, hi); });
    return out;
  }

  [[nodiscard]] double measure_in(const Interval& w) const {
    CompensatedSum s;
    for_each_in(w, [&](double lo, double hi) { s += hi - lo; });
    return s.value();
  }

  [[nodiscard]] IntervalSet translated(double shift) const {
    IntervalSet out;
    for (const auto& p : parts_) out.append_sorted(p.lo() + shift, p.hi() + shift);
    return out;
  }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> parts_;
};

/// A pattern inside [0, period) repeated at j * period for index_lo <= j <= index_hi.
///
/// Copy j of a pattern piece [a, b) is [j*period + a, j*period + b), except that
/// b == period maps to (j+1)*period so full-period patterns tile exactly.
class PeriodicIntervalSet {
 public:
  PeriodicIntervalSet(IntervalSet pattern, double period, std::int64_t index_lo,
                      std::int64_t index_hi)
      : pattern_(std::move(pattern)), period_(period), index_lo_(index_lo), index_hi_(index_hi) {
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw std::invalid_argument("PeriodicIntervalSet: period must be positive and finite");
    }
    if (index_lo > index_hi) {
      throw std::invalid_argument("PeriodicIntervalSet: index_lo > index_hi");
    }
    if (!pattern_.empty() &&
        (pattern_.parts().front().lo() < 0.0 || pattern_.parts().back().hi() > period)) {
      throw std::invalid_argument("PeriodicIntervalSet: pattern must lie in [0, period)");
    }
  }

  [[nodiscard]] const IntervalSet& pattern() const noexcept { return pattern_; }
  [[nodiscard]] double period() const noexcept { return period_; }
  [[nodiscard]] std::int64_t index_lo() const noexcept { return index_lo_; }
  [[nodiscard]] std::int64_t index_hi() const noexcept { return index_hi_; }
  [[nodiscard]] std::int64_t copy_count() const noexcept { return index_hi_ - index_lo_ + 1; }
  [[nodiscard]] bool empty() const noexcept { return pattern_.empty(); }

  [[nodiscard]] double copy_lo(std::int64_t j, const Interval& piece) const noexcept {
    return static_cast<double>(j) * period_ + piece.lo();
  }
  [[nodiscard]] double copy_hi(std::int64_t j, const Interval& piece) const noexcept {
    if (piece.hi() == period_) return static_cast<double>(j + 1) * period_;
    return static_cast<double>(j) * period_ + piece.hi();
  }

  /// Count of copies times the pattern measure; nothing is expanded.
  [[nodiscard]] double measure() const noexcept {
    return static_cast<double>(copy_count()) * pattern_.measure();
  }

  [[nodiscard]] std::optional<Interval> hull() const {
    if (pattern_.empty()) return std::nullopt;
    return Interval(copy_lo(index_lo_, pattern_.parts().front()),
                    copy_hi(index_hi_, pattern_.parts().back()));
  }

  [[nodiscard]] bool contains(double x) const noexcept {
    if (pattern_.empty() || !std::isfinite(x)) return false;
    const auto [first, last] = candidate_range(x, x);
    for (std::int64_t j = first; j <= last; ++j) {
      for (const auto& piece : pattern_.parts()) {
        if (copy_lo(j, piece) <= x && x < copy_hi(j, piece)) return true;
      }
    }
    return false;
  }

  template <class Fn>
  void for_each_in(const Interval& w, Fn&& fn) const {
    if (pattern_.empty()) return;
    const auto [first, last] = candidate_range(w.lo(), w.hi());
    for (std::int64_t j = first; j <= last; ++j) {
      for (const auto& piece : pattern_.parts()) {
        const double lo = std::max(copy_lo(j, piece), w.lo());
        const double hi = std::min(copy_hi(j, piece), w.hi());
        if (lo < hi) fn(lo, hi);
      }
    }
  }

  [[nodiscard]] std::int64_t pieces_in(const Interval& w) const {
    if (pattern_.empty()) return 0;
    const auto [first, last] = candidate_range(w.lo(), w.hi());
    if (last < first) return 0;
    return (last - first + 1) * static_cast<std::int64_t>(pattern_.size());
  }

  [[nodiscard]] IntervalSet clip(const Interval& w) const {
    IntervalSet out;
    for_each_in(w, [&](double lo, double hi) { out.append_sorted(lo, hi); });
    return out;
  }

  /// |this ∩ w|: copies strictly inside w contribute the pattern measure each,
  /// only the boundary copies are clipped explicitly.
  [[nodiscard]] double measure_in(const Interval& w) const {
    if (pattern_.empty()) return 0.0;
    const auto [first, last] = candidate_range(w.lo(), w.hi());
    if (last < first) return 0.0;
    // Interior copies: j*period >= w.lo and (j+1)*period <= w.hi, with a one-copy margin.
    std::int64_t inner_lo = clamp_index(std::ceil(w.lo() / period_) + 1.0);
    std::int64_t inner_hi = clamp_index(std::floor(w.hi() / period_) - 2.0);
    inner_lo = std::max(inner_lo, first);
    inner_hi = std::min(inner_hi, last);
    CompensatedSum s;
    auto clip_copies = [&](std::int64_t a, std::int64_t b) {
      for (std::int64_t j = a; j <= b; ++j) {
        for (const auto& piece : pattern_.parts()) {
          const double lo = std::max(copy_lo(j, piece), w.lo());
          const double hi = std::min(copy_hi(j, piece), w.hi());
          if (lo < hi) s += hi - lo;
        }
      }
    };
    if (inner_lo > inner_hi) {
      clip_copies(first, last);
    } else {
      clip_copies(first, inner_lo - 1);
      s += static_cast<double>(inner_hi - inner_lo + 1) * pattern_.measure();
      clip_copies(inner_hi + 1, last);
    }
    return s.value();
  }

  /// Shift by a whole number of periods; endpoints stay on the same grid.
  [[nodiscard]] PeriodicIntervalSet shifted_by_periods(std::int64_t k) const {
    return PeriodicIntervalSet(pattern_, period_, index_lo_ + k, index_hi_ + k);
  }

  [[nodiscard]] IntervalSet materialize() const {
    IntervalSet out;
    for (std::int64_t j = index_lo_; j <= index_hi_; ++j) {
      for (const auto& piece : pattern_.parts()) out.append_sorted(copy_lo(j, piece), copy_hi(j, piece));
    }
    return out;
  }

  friend bool operator==(const PeriodicIntervalSet&, const PeriodicIntervalSet&) = default;

 private:
  [[nodiscard]] std::int64_t clamp_index(double j) const noexcept {
    const double lo = static_cast<double>(index_lo_) - 1.0;
    const double hi = static_cast<double>(index_hi_) + 1.0;
    if (!(j >= lo)) return index_lo_ - 1;
    if (!(j <= hi)) return index_hi_ + 1;
    return static_cast<std::int64_t>(j);
  }

  /// Copy indices that can meet [a, b] after rounding, clamped to the index range.
  [[nodiscard]] std::pair<std::int64_t, std::int64_t> candidate_range(double a, double b) const noexcept {
    const std::int64_t first = std::max(index_lo_, clamp_index(std::floor(a / period_) - 1.0));
    const std::int64_t last = std::min(index_hi_, clamp_index(std::floor(b / period_) + 1.0));
    return {first, last};
  }

  IntervalSet pattern_;
  double period_;
  std::int64_t index_lo_;
  std::int64_t index_hi_;
};

/// Union of periodic blocks with pairwise disjoint hulls, e.g. the translated
/// blocks making up the global exceptional set.
class BlockUnion {
 public:
  BlockUnion() = default;
  explicit BlockUnion(std::vector<PeriodicIntervalSet> blocks) : blocks_(std::move(blocks)) {
    std::erase_if(blocks_, [](const PeriodicIntervalSet& b) { return b.empty(); });
    std::sort(blocks_.begin(), blocks_.end(), [](const auto& a, const auto& b) {
      return a.hull()->lo() < b.hull()->lo();
    });
    for (std::size_t i = 1; i < blocks_.size(); ++i) {
      if (blocks_[i].hull()->lo() < blocks_[i - 1].hull()->hi()) {
        throw std::invalid_argument("BlockUnion: block hulls overlap");
      }
    }
  }

  [[nodiscard]] const std::vector<PeriodicIntervalSet>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] bool empty() const noexcept { return blocks_.empty(); }

  [[nodiscard]] double measure() const noexcept {
    CompensatedSum s;
    for (const auto& b : blocks_) s += b.measure();
    return s.value();
  }
  [[nodiscard]] double measure_in(const Interval& w) const {
    CompensatedSum s;
    for (const auto& b : blocks_) {
      if (b.hull()->meets(w)) s += b.measure_in(w);
    }
    return s.value();
  }
  [[nodiscard]] bool contains(double x) const noexcept {
    return std::any_of(blocks_.begin(), blocks_.end(),
                       [x](const PeriodicIntervalSet& b) { return b.contains(x); });
  }
  [[nodiscard]] std::optional<Interval> hull() const {
    if (blocks_.empty()) return std::nullopt;
    return Interval(blocks_.front().hull()->lo(), blocks_.back().hull()->hi());
  }
  template <class Fn>
  void for_each_in(const Interval& w, Fn&& fn) const {
    for (const auto& b : blocks_) {
      if (b.hull()->meets(w)) b.for_each_in(w, fn);
    }
  }
  [[nodiscard]] std::int64_t pieces_in(const Interval& w) const {
    std::int64_t n = 0;
    for (const auto& b : blocks_) {
      if (b.hull()->meets(w)) n += b.pieces_in(w);
    }
    return n;
  }
  [[nodiscard]] IntervalSet clip(const Interval& w) const {
    IntervalSet out;
    for_each_in(w, [&](double lo, double hi) { out.append_sorted(lo, hi); });
    return out;
  }

  friend bool operator==(const BlockUnion&, const BlockUnion&) = default;

 private:
  std::vector<PeriodicIntervalSet> blocks_;
};

template <class S>
concept IntervalSource = requires(const S& s, const Interval& w, double x) {
  { s.measure() } -> std::convertible_to<double>;
  { s.measure_in(w) } -> std::convertible_to<double>;
  { s.contains(x) } -> std::convertible_to<bool>;
  { s.hull() } -> std::same_as<std::optional<Interval>>;
  { s.pieces_in(w) } -> std::convertible_to<std::int64_t>;
  { s.clip(w) } -> std::same_as<IntervalSet>;
  s.for_each_in(w, [](double, double) {});
};

/// Type-erased holder for whichever set representation a file or caller supplies.
class AnySet {
 public:
  using Storage = std::variant<IntervalSet, PeriodicIntervalSet, BlockUnion>;

  AnySet() : v_(IntervalSet{}) {}
  AnySet(IntervalSet s) : v_(std::move(s)) {}
  AnySet(PeriodicIntervalSet s) : v_(std::move(s)) {}
  AnySet(BlockUnion s) : v_(std::move(s)) {}

  [[nodiscard]] const Storage& storage() const noexcept { return v_; }

  [[nodiscard]] double measure() const {
    return std::visit([](const auto& s) { return s.measure(); }, v_);
  }
  [[nodiscard]] double measure_in(const Interval& w) const {
    return std::visit([&](const auto& s) { return s.measure_in(w); }, v_);
  }
  [[nodiscard]] bool contains(double x) const {
    return std::visit([&](const auto& s) { return s.contains(x); }, v_);
  }
  [[nodiscard]] std::optional<Interval> hull() const {
    return std::visit([](const auto& s) { return s.hull(); }, v_);
  }
  [[nodiscard]] std::int64_t pieces_in(const Interval& w) const {
    return std::visit([&](const auto& s) -> std::int64_t { return s.pieces_in(w); }, v_);
  }
  [[nodiscard]] IntervalSet clip(const Interval& w) const {
    return std::visit([&](const auto& s) { return s.clip(w); }, v_);
  }
  template <class Fn>
  void for_each_in(const Interval& w, Fn&& fn) const {
    std::visit([&](const auto& s) { s.for_each_in(w, fn); }, v_);
  }

 private:
  Storage v_;
};

static_assert(IntervalSource<IntervalSet>);
static_assert(IntervalSource<PeriodicIntervalSet>);
static_assert(IntervalSource<BlockUnion>);
static_assert(IntervalSource<AnySet>);

// ---------------------------------------------------------------------------
// Set algebra

[[nodiscard]] inline IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet out;
  auto ia = a.parts().begin();
  auto ib = b.parts().begin();
  while (ia != a.parts().end() || ib != b.parts().end()) {
    const bool take_a =
        ib == b.parts().end() || (ia != a.parts().end() && ia->lo() <= ib->lo());
    const Interval& p = take_a ? *ia++ : *ib++;
    out.append_sorted(p.lo(), p.hi());
  }
  return out;
}

/// Exact intersection. For periodic operands only copies meeting b are visited.
template <IntervalSource A>
[[nodiscard]] IntervalSet intersect(const A& a, const IntervalSet& b) {
  IntervalSet out;
  for (const auto& w : b.parts()) {
    a.for_each_in(w, [&](double lo, double hi) { out.append_sorted(lo, hi); });
  }
  return out;
}

/// window \ a.
template <IntervalSource A>
[[nodiscard]] IntervalSet complement_within(const A& a, const Interval& window) {
  IntervalSet out;
  double cursor = window.lo();
  a.for_each_in(window, [&](double lo, double hi) {
    out.append_sorted(cursor, lo);
    cursor = std::max(cursor, hi);
  });
  out.append_sorted(cursor, window.hi());
  return out;
}

template <IntervalSource A>
[[nodiscard]] double measure(const A& a) {
  return a.measure();
}

}  // namespace annpair
