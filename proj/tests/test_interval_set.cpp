#include <random>
#include <vector>

#include "catch_amalgamated.hpp"

#include "annpair/interval_set.hpp"
#include "annpair/set_predicates.hpp"
#include "oracles.hpp"

using namespace annpair;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

IntervalSet from(const oracle::Pieces& p) {
  std::vector<Interval> v;
  for (auto [a, b] : p) v.emplace_back(a, b);
  return IntervalSet(v);
}

}  // namespace

TEST_CASE("interval rejects empty or reversed bounds") {
  CHECK_THROWS_AS(Interval(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Interval(2.0, 1.0), std::invalid_argument);
  const Interval i(0.0, 1.0);
  CHECK(i.contains(0.0));
  CHECK_FALSE(i.contains(1.0));
}

TEST_CASE("union merges touching and overlapping pieces") {
  const auto a = unite(IntervalSet{Interval(0, 1)}, IntervalSet{Interval(1, 2)});
  REQUIRE(a.size() == 1);
  CHECK(a.measure() == 2.0);

  CHECK(unite(IntervalSet{Interval(0, 1)}, IntervalSet{}) == IntervalSet{Interval(0, 1)});

  const auto b = unite(IntervalSet{Interval(0, 2)}, IntervalSet{Interval(1, 3)});
  REQUIRE(b.size() == 1);
  CHECK(b.measure() == 3.0);
  for (int i = -10; i <= 40; ++i) {
    const double x = i / 10.0;
    CHECK(b.contains(x) == ((0 <= x && x < 2) || (1 <= x && x < 3)));
  }
}

TEST_CASE("canonical form is idempotent and unsorted input is sorted") {
  const IntervalSet s{Interval(3, 4), Interval(0, 1), Interval(0.5, 2)};
  REQUIRE(s.size() == 2);
  CHECK(s.parts()[0].lo() == 0.0);
  CHECK(s.parts()[0].hi() == 2.0);
  CHECK(IntervalSet(s.parts()) == s);
  IntervalSet t;
  t.append_sorted(0, 1);
  CHECK_THROWS(t.append_sorted(-1, 0.5));
}

TEST_CASE("intersection with plain and periodic operands") {
  CHECK(intersect(IntervalSet{Interval(0, 2)}, IntervalSet{Interval(1, 3)}) == IntervalSet{Interval(1, 2)});
  CHECK(intersect(IntervalSet{Interval(0, 2)}, IntervalSet{}).empty());

  const PeriodicIntervalSet p(IntervalSet{Interval(0, 0.1)}, 1.0, 0, 9);
  const auto got = intersect(p, IntervalSet{Interval(0, 3)});
  CHECK(got == (IntervalSet{Interval(0, 0.1), Interval(1, 1.1), Interval(2, 2.1)}));
}

TEST_CASE("complement within a window") {
  CHECK(complement_within(IntervalSet{Interval(1, 2)}, Interval(0, 3)) ==
        (IntervalSet{Interval(0, 1), Interval(2, 3)}));
  CHECK(complement_within(IntervalSet{}, Interval(0, 1)) == IntervalSet{Interval(0, 1)});
  CHECK(complement_within(IntervalSet{Interval(0, 3)}, Interval(1, 2)).empty());
}

TEST_CASE("measure identities on random dyadic sets") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = from(oracle::random_dyadic_pieces(rng, 20, 16.0, 8));
    const auto b = from(oracle::random_dyadic_pieces(rng, 20, 16.0, 8));
    // Inclusion-exclusion, exact on dyadic endpoints.
    CHECK(unite(a, b).measure() + intersect(a, b).measure() == a.measure() + b.measure());
    const Interval w(-1.0, 12.5);
    CHECK(a.measure_in(w) + complement_within(a, w).measure() == w.length());
  }
}

TEST_CASE("periodic set agrees with brute-force repetition") {
  const oracle::Pieces pattern{{0.05, 0.15}, {0.5, 0.75}};
  const PeriodicIntervalSet p(from(pattern), 1.0, -7, 12);
  const auto brute = oracle::periodic_union(pattern, 1.0, -7, 12);
  CHECK_THAT(p.measure(), WithinAbs(oracle::total_length(brute), 1e-12));
  CHECK(p.materialize() == from(brute));
  for (const Interval w : {Interval(-3.3, 4.6), Interval(-100, 100), Interval(11.6, 11.7), Interval(0.15, 0.5)}) {
    oracle::Pieces clipped;
    for (auto [a, b] : brute) {
      const double lo = std::max(a, w.lo()), hi = std::min(b, w.hi());
      if (lo < hi) clipped.emplace_back(lo, hi);
    }
    CHECK(p.clip(w) == from(clipped));
    CHECK_THAT(p.measure_in(w), WithinAbs(oracle::total_length(clipped), 1e-12));
  }
  for (int i = -800; i < 1400; ++i) {
    const double x = i / 64.0 + 1.0 / 1024.0;
    CHECK(p.contains(x) == oracle::in_pieces(brute, x));
  }
}

TEST_CASE("periodic measure counts copies") {
  const PeriodicIntervalSet p(IntervalSet{Interval(0.25, 0.45)}, 1.0, 0, 9);
  CHECK_THAT(p.measure(), WithinRel(2.0, 1e-15));
  CHECK_THAT(p.materialize().measure(), WithinRel(2.0, 1e-15));
  CHECK(measure(IntervalSet{}) == 0.0);
}

TEST_CASE("full-period pattern tiles without gaps") {
  const PeriodicIntervalSet p(IntervalSet{Interval(0.0, 0.1)}, 0.1, -5, 4);
  const auto m = p.materialize();
  REQUIRE(m.size() == 1);
  CHECK(m.parts()[0].lo() == -0.5);
}

TEST_CASE("block union rejects overlapping blocks") {
  const PeriodicIntervalSet a(IntervalSet{Interval(0, 0.5)}, 1.0, 0, 3);
  const PeriodicIntervalSet b(IntervalSet{Interval(0, 0.5)}, 1.0, 3, 5);
  CHECK_THROWS_AS(BlockUnion({a, b}), std::invalid_argument);
  const BlockUnion u({a, a.shifted_by_periods(10)});
  CHECK(u.measure() == 4.0);
  CHECK(u.contains(10.25));
  CHECK_FALSE(u.contains(9.75));
}

TEST_CASE("density profile") {
  const std::vector<double> r10{10.0};
  CHECK(density_profile(IntervalSet{Interval(0, 1)}, r10)[0].ratio == 0.1);
  CHECK(density_profile(IntervalSet{}, r10)[0].ratio == 0.0);
  const std::vector<double> bad{0.0};
  CHECK_THROWS_AS(density_profile(IntervalSet{}, bad), std::invalid_argument);
}

TEST_CASE("epsilon-thin check") {
  const std::vector<double> probes{0.0, 3.0, -7.5};
  CHECK(epsilon_thin_check(IntervalSet{}, 0.01, probes).pass);
  const auto r = epsilon_thin_check(IntervalSet{Interval(-1, 1)}, 0.4, std::vector<double>{0.0});
  CHECK_FALSE(r.pass);
  CHECK(r.worst_ratio == 1.0);
  CHECK_THAT(r.max_violation, WithinRel(2.5, 1e-15));
}

TEST_CASE("periodic gap check") {
  const Interval gap(0.4, 0.6);
  CHECK_FALSE(periodic_gap_check(IntervalSet{Interval(0.5, 0.7)}, gap, 1.0, Interval(-5, 5)));
  CHECK(periodic_gap_check(IntervalSet{}, gap, 1.0, Interval(-5, 5)));
  const PeriodicIntervalSet s(IntervalSet{Interval(0.0, 1.0 / 56)}, 112.0, -3, 3);
  CHECK(periodic_gap_check(s, gap, 1.0, Interval(-400, 400)));
  CHECK_FALSE(periodic_gap_check(s.shifted_by_periods(0), Interval(0.0, 0.01), 1.0, Interval(-400, 400)));
}

TEST_CASE("projection and multiplicity") {
  const IntervalSet s{Interval(0.2, 0.4), Interval(1.2, 1.3), Interval(2.5, 2.6)};
  const auto w = projection_and_multiplicity(s);
  CHECK(w.at(0.25) == 2);
  CHECK(w.at(0.35) == 1);
  CHECK(w.at(0.55) == 1);
  CHECK(w.at(0.45) == 0);
  CHECK(w.at(0.0) == 0);
  CHECK_THAT(w.integral(), WithinAbs(s.measure(), 1e-12));
  // Oracle: count translates directly.
  for (int i = 0; i < 1000; ++i) {
    const double t = (i + 0.5) / 1000.0;
    int count = 0;
    for (int k = -3; k <= 3; ++k) count += s.contains(t + k) ? 1 : 0;
    CHECK(w.at(t) == count);
  }
  CHECK(projection_and_multiplicity(IntervalSet{Interval(0, 1)}).at(0.7) == 1);
  CHECK(projection_and_multiplicity(IntervalSet{}).at(0.7) == 0);
  const auto sup = w.support();
  REQUIRE(sup.size() == 2);
  CHECK_THAT(sup.parts()[0].lo(), WithinAbs(0.2, 1e-15));
  CHECK_THAT(sup.parts()[0].hi(), WithinAbs(0.4, 1e-15));
  CHECK_THAT(sup.parts()[1].lo(), WithinAbs(0.5, 1e-15));
  CHECK_THAT(sup.parts()[1].hi(), WithinAbs(0.6, 1e-15));
}

TEST_CASE("multiplicity integral matches measure on random sets") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = from(oracle::random_dyadic_pieces(rng, 15, 9.0, 10));
    CHECK_THAT(projection_and_multiplicity(s).integral(), WithinAbs(s.measure(), 1e-12));
  }
}

TEST_CASE("sigma from gap") {
  const Interval gap(0.4, 0.6);
  const IntervalSet s{Interval(0.0, 0.1)};
  CHECK_THAT(sigma_from_gap(s, 1.0, gap).sigma, WithinRel(0.2, 1e-15));
  CHECK_THAT(sigma_from_gap(s, 2.0, gap).sigma, WithinRel(0.1, 1e-15));
  CHECK_THROWS_AS(sigma_from_gap(IntervalSet{Interval(0.5, 0.7)}, 1.0, gap), std::domain_error);
}
