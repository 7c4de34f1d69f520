#pragma once

// One level of the counterexample to strong annihilation:
//   S_n = ∪_{|j|<=d} [jN, jN + 1/L),   L = 2^n (2d+1)
//   Q_n = ∪_{|j|<N²} [(j + 1/2 - 1/n)/N, (j + 1/2 + 1/n)/N)
//   f(t) = P(Nt) φ̂(t),  φ(t) = ψ(L t),  φ̂(t) = ψ̂(t/L) / L
// with P the shifted Fejér kernel of order m = d + 1.

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "annpair/bump.hpp"
#include "annpair/interval_set.hpp"
#include "annpair/trig_poly.hpp"

namespace annpair {

struct CounterexampleParams {
  int n = 0;
  int m = 0;           // Fejér order
  int d = 0;           // polynomial degree, m - 1
  std::int64_t N = 0;  // period scale
  std::int64_t L = 0;  // compression factor 2^n (2d+1)

  [[nodiscard]] static std::int64_t compression(int n, int d) {
    if (n < 0 || n > 40) throw std::invalid_argument("CounterexampleParams: n out of range");
    return (std::int64_t{1} << n) * (2 * static_cast<std::int64_t>(d) + 1);
  }

  /// Params for level n at scale N, with d taken from the Fejér degree choice.
  [[nodiscard]] static CounterexampleParams make(const DegreeChoice& deg, std::int64_t N) {
    CounterexampleParams p;
    p.n = deg.n;
    p.m = deg.m;
    p.d = deg.d;
    p.L = compression(deg.n, deg.d);
    p.N = N;
    p.validate();
    return p;
  }

  [[nodiscard]] static CounterexampleParams make(int n, std::int64_t N) {
    return make(choose_degree(n), N);
  }

  void validate() const {
    if (n < 2) throw std::invalid_argument("CounterexampleParams: n must be >= 2");
    if (m != d + 1 || d < 0) throw std::invalid_argument("CounterexampleParams: m must equal d + 1");
    if (L != compression(n, d)) throw std::invalid_argument("CounterexampleParams: L != 2^n (2d+1)");
    if (N < L) throw std::invalid_argument("CounterexampleParams: N must be >= L");
  }

  friend bool operator==(const CounterexampleParams&, const CounterexampleParams&) = default;
};

/// S_n as a periodic set: pattern [0, 1/L) with period N, copies j = -d..d.
[[nodiscard]] inline PeriodicIntervalSet build_S_n(const CounterexampleParams& p) {
  p.validate();
  const double len = 1.0 / static_cast<double>(p.L);
  return PeriodicIntervalSet(IntervalSet{Interval(0.0, len)}, static_cast<double>(p.N), -p.d, p.d);
}

/// Q_n: one cell of width 2/(nN) centered in each period 1/N, copies j = -N²+1..N²-1.
/// For n = 2 the cell fills the whole period.
[[nodiscard]] inline PeriodicIntervalSet build_Q_n(const CounterexampleParams& p) {
  p.validate();
  const double period = 1.0 / static_cast<double>(p.N);
  const double half = 1.0 / p.n;
  const double lo = std::max(0.0, 0.5 - half) * period;
  const double hi = 0.5 + half >= 1.0 ? period : (0.5 + half) * period;
  const std::int64_t span = p.N * p.N - 1;
  return PeriodicIntervalSet(IntervalSet{Interval(lo, hi)}, period, -span, span);
}

struct FValue {
  double value;     // P(N(t - offset)) · A((t - offset)/L) / L
  bool bound_only;  // the bump factor came from the decay envelope
};

/// f(t) = P_N(t) φ̂(t), reported as the real amplitude P_N(t) A(t/L)/L; the
/// discarded factor e^{-iπt/L} has modulus one, so |f| is exact.
class SpectralFunction {
 public:
  SpectralFunction(const CounterexampleParams& p, std::shared_ptr<const Bump> bump, double offset = 0.0)
      : poly_(shifted_fejer(p.m), p.N), bump_(std::move(bump)), L_(static_cast<double>(p.L)), offset_(offset) {
    if (!bump_) throw std::invalid_argument("SpectralFunction: null bump");
  }

  [[nodiscard]] FValue eval(double t) const noexcept {
    const double s = t - offset_;
    const auto h = bump_->hat(s / L_);
    return {poly_.eval(s) * h.value / L_, h.bound_only};
  }

  [[nodiscard]] const ScaledTrigPoly& poly() const noexcept { return poly_; }
  [[nodiscard]] const Bump& bump() const noexcept { return *bump_; }
  [[nodiscard]] const std::shared_ptr<const Bump>& bump_ptr() const noexcept { return bump_; }
  [[nodiscard]] double compression() const noexcept { return L_; }
  [[nodiscard]] double offset() const noexcept { return offset_; }
  [[nodiscard]] std::int64_t scale() const noexcept { return poly_.scale(); }
  [[nodiscard]] int degree() const noexcept { return poly_.base().degree(); }
  /// ‖P‖_∞ = m for the shifted Fejér kernel.
  [[nodiscard]] double sup_poly() const noexcept { return static_cast<double>(degree() + 1); }

  [[nodiscard]] SpectralFunction translated(double shift) const {
    SpectralFunction out = *this;
    out.offset_ += shift;
    return out;
  }

 private:
  ScaledTrigPoly poly_;
  std::shared_ptr<const Bump> bump_;
  double L_;
  double offset_;
};

struct CounterexampleInstance {
  CounterexampleParams params;
  PeriodicIntervalSet S_n;
  PeriodicIntervalSet Q_n;
  SpectralFunction f;
  double offset = 0.0;  // translation applied at global assembly (Q_n and f only)
};

[[nodiscard]] inline CounterexampleInstance build_instance(const CounterexampleParams& p,
                                                           std::shared_ptr<const Bump> bump) {
  return CounterexampleInstance{p, build_S_n(p), build_Q_n(p), SpectralFunction(p, std::move(bump)), 0.0};
}

[[nodiscard]] inline FValue eval_f(const CounterexampleInstance& inst, double t) noexcept {
  return inst.f.eval(t);
}

}  // namespace annpair
