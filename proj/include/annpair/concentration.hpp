#pragma once

// L² functionals of the spectral function f over sets, the closed-form tail
// bound past the window, and the concentration report for one level.
//
// Two independent integrators:
//  * direct: composite 4-point Gauss-Legendre on panels no wider than the
//    caller's grid step, which must resolve the top frequency N d of |f|².
//  * modulation: |P(u)|² = Σ_l b_l e^{2πilu} is integrated against v^p,
//    v = u - 1/2, in closed form once per pattern; the slowly varying envelope
//    |φ̂|² is then interpolated quadratically on each period cell, so the
//    per-cell work is two table lookups regardless of d.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "annpair/bump.hpp"
#include "annpair/counterexample.hpp"
#include "annpair/interval_set.hpp"
#include "annpair/numeric.hpp"

namespace annpair {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Integrator { automatic, direct, modulation };

[[nodiscard]] inline const char* to_string(Integrator i) noexcept {
  switch (i) {
    case Integrator::automatic: return "automatic";
    case Integrator::direct: return "direct";
    case Integrator::modulation: return "modulation";
  }
  return "?";
}

/// Coarsest panel width the direct integrator accepts: 1 / (16 N (d+1)).
[[nodiscard]] inline double max_grid_step(const SpectralFunction& f) noexcept {
  return 1.0 / (16.0 * static_cast<double>(f.scale()) * static_cast<double>(f.degree() + 1));
}

/// Lower/upper bracket for a mass. They differ only where the window leaves
/// the tabulated transform and the decay envelope stands in.
struct MassBounds {
  double lower = 0.0;
  double upper = 0.0;

  MassBounds& operator+=(const MassBounds& o) noexcept {
    lower += o.lower;
    upper += o.upper;
    return *this;
  }
};

namespace detail {

inline constexpr std::array<double, 4> gl4_nodes{-0.8611363115940526, -0.3399810435848563,
                                                 0.3399810435848563, 0.8611363115940526};
inline constexpr std::array<double, 4> gl4_weights{0.3478548451374538, 0.6521451548625461,
                                                   0.6521451548625461, 0.3478548451374538};

}  // namespace detail

/// ∫_e |f|² by composite Gauss-Legendre. Throws QuadratureError when grid_step
/// cannot resolve the oscillation of |f|².
template <IntervalSource E>
[[nodiscard]] MassBounds l2_mass_direct(const SpectralFunction& f, const E& e, double grid_step) {
  if (!(grid_step > 0.0) || grid_step > max_grid_step(f) * (1.0 + 1e-12)) {
    throw QuadratureError("l2_mass_direct: grid_step " + std::to_string(grid_step) +
                          " does not resolve frequency N*d (need <= " + std::to_string(max_grid_step(f)) + ")");
  }
  CompensatedSum lower, upper;
  const auto hull = e.hull();
  if (!hull) return {};
  e.for_each_in(*hull, [&](double lo, double hi) {
    const double len = hi - lo;
    const auto panels = static_cast<std::int64_t>(std::ceil(len / grid_step));
    const double h = len / static_cast<double>(panels);
    for (std::int64_t i = 0; i < panels; ++i) {
      const double a = lo + static_cast<double>(i) * h;
      const double mid = a + 0.5 * h;
      double lo_acc = 0.0, hi_acc = 0.0;
      for (std::size_t q = 0; q < 4; ++q) {
        const auto v = f.eval(mid + 0.5 * h * detail::gl4_nodes[q]);
        const double w = detail::gl4_weights[q] * sqr(v.value);
        hi_acc += w;
        if (!v.bound_only) lo_acc += w;
      }
      lower += 0.5 * h * lo_acc;
      upper += 0.5 * h * hi_acc;
    }
  });
  return {lower.value(), upper.value()};
}

/// ∫_U |P(u)|² (u - 1/2)^p du for p = 0, 1, 2 and U ⊂ [0, 1).
struct CellMoments {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
};

[[nodiscard]] inline CellMoments cell_moments(const TrigPoly& p, const IntervalSet& u_pattern) {
  const TrigPoly sq = p.squared();
  CellMoments out;
  CompensatedSum s0, s1, s2;
  for (const auto& piece : u_pattern.parts()) {
    const double va = piece.lo() - 0.5;
    const double vb = piece.hi() - 0.5;
    // l = 0 term: b_0 ∫ v^p dv.
    const double b0 = sq.coeff(0);
    s0 += b0 * (vb - va);
    s1 += b0 * (vb * vb - va * va) / 2.0;
    s2 += b0 * (vb * vb * vb - va * va * va) / 3.0;
    for (int l = 1; l <= sq.degree(); ++l) {
      // 2 b_l cos(2πl u) = 2 b_l (-1)^l cos(ω v), ω = 2πl.
      const double c = 2.0 * sq.coeff(l) * (l % 2 == 0 ? 1.0 : -1.0);
      const double w = 2.0 * pi * l;
      auto anti0 = [&](double v) { return std::sin(w * v) / w; };
      auto anti1 = [&](double v) { return v * std::sin(w * v) / w + std::cos(w * v) / (w * w); };
      auto anti2 = [&](double v) {
        return v * v * std::sin(w * v) / w + 2.0 * v * std::cos(w * v) / (w * w) - 2.0 * std::sin(w * v) / (w * w * w);
      };
      s0 += c * (anti0(vb) - anti0(va));
      s1 += c * (anti1(vb) - anti1(va));
      s2 += c * (anti2(vb) - anti2(va));
    }
  }
  out.m0 = s0.value();
  out.m1 = s1.value();
  out.m2 = s2.value();
  return out;
}

/// Envelope Riemann sums over period cells j = first..last of g(t) = |φ̂(t)|².
struct EnvelopeSums {
  double mid = 0.0;    // Σ g((j + 1/2)/N)
  double edge = 0.0;   // Σ g(j/N) + g((j+1)/N)
  double first = 0.0;  // g(first/N)
  double last = 0.0;   // g((last+1)/N)
};

namespace detail {

/// Sums of g(t) = (A((t - offset)/L)/L)² at the edges and midpoints of cells
/// [j/N, (j+1)/N), j = first..last. Returns (lower, upper): past the table the
/// lower variant uses 0 and the upper one the decay envelope.
inline std::pair<EnvelopeSums, EnvelopeSums> envelope_sums(const SpectralFunction& f, std::int64_t first,
                                                           std::int64_t last) {
  const double n = static_cast<double>(f.scale());
  const double L = f.compression();
  const Bump& bump = f.bump();
  auto g = [&](double t, double& lo, double& hi) {
    const auto h = bump.hat((t - f.offset()) / L);
    hi = sqr(h.value / L);
    lo = h.bound_only ? 0.0 : hi;
  };
  CompensatedSum mid_lo, mid_hi, edge_lo, edge_hi;
  double prev_lo = 0.0, prev_hi = 0.0;
  g(static_cast<double>(first) / n, prev_lo, prev_hi);
  EnvelopeSums lo_sums, hi_sums;
  lo_sums.first = prev_lo;
  hi_sums.first = prev_hi;
  for (std::int64_t j = first; j <= last; ++j) {
    double m_lo, m_hi, r_lo, r_hi;
    g((static_cast<double>(j) + 0.5) / n, m_lo, m_hi);
    g(static_cast<double>(j + 1) / n, r_lo, r_hi);
    mid_lo += m_lo;
    mid_hi += m_hi;
    edge_lo += prev_lo + r_lo;
    edge_hi += prev_hi + r_hi;
    prev_lo = r_lo;
    prev_hi = r_hi;
  }
  lo_sums.mid = mid_lo.value();
  lo_sums.edge = edge_lo.value();
  lo_sums.last = prev_lo;
  hi_sums.mid = mid_hi.value();
  hi_sums.edge = edge_hi.value();
  hi_sums.last = prev_hi;
  return {lo_sums, hi_sums};
}

// Quadratic interpolation of g through the cell's edges and midpoint, in cell
// units v = u - 1/2: g ≈ g_mid + (g_r - g_l) v + 2 (g_l + g_r - 2 g_mid) v².
// The linear term telescopes over cells.
inline double combine_raw(const CellMoments& mo, const EnvelopeSums& s, double n) {
  return (mo.m0 * s.mid + mo.m1 * (s.last - s.first) + mo.m2 * (2.0 * s.edge - 4.0 * s.mid)) / n;
}

inline double combine(const CellMoments& mo, const EnvelopeSums& s, double n) {
  return std::max(0.0, combine_raw(mo, s, n));
}

inline bool has_cell_period(const SpectralFunction& f, const PeriodicIntervalSet& e) noexcept {
  return std::abs(e.period() * static_cast<double>(f.scale()) - 1.0) <= 1e-12;
}

inline IntervalSet to_cell_units(const PeriodicIntervalSet& e, double n) {
  IntervalSet u;
  for (const auto& p : e.pattern().parts()) {
    const double hi = p.hi() == e.period() ? 1.0 : std::min(1.0, p.hi() * n);
    u.append_sorted(p.lo() * n, hi);
  }
  return u;
}

}  // namespace detail

/// Modulation fast path for a set with period 1/N. f may carry an integer
/// offset; P(N(t - offset)) = P(Nt) then, so only the envelope moves.
[[nodiscard]] inline MassBounds l2_mass_modulation(const SpectralFunction& f, const PeriodicIntervalSet& e) {
  if (!detail::has_cell_period(f, e)) {
    throw QuadratureError("l2_mass_modulation: set period must be 1/N");
  }
  if (std::abs(f.offset() - std::round(f.offset())) > 0.0) {
    throw QuadratureError("l2_mass_modulation: offset must be an integer");
  }
  if (e.empty()) return {};
  const double n = static_cast<double>(f.scale());
  const auto moments = cell_moments(f.poly().base(), detail::to_cell_units(e, n));
  const auto [lo, hi] = detail::envelope_sums(f, e.index_lo(), e.index_hi());
  return {detail::combine(moments, lo, n), detail::combine(moments, hi, n)};
}

/// Mass of |f|² over e. Arbitrary interval sets always go through direct
/// quadrature; 1/N-periodic sets take the modulation path unless `direct` is
/// requested.
[[nodiscard]] inline MassBounds l2_mass(const SpectralFunction& f, const IntervalSet& e, double grid_step,
                                        Integrator how = Integrator::automatic) {
  if (how == Integrator::modulation) {
    throw QuadratureError("l2_mass: modulation integrator needs a 1/N-periodic set");
  }
  return l2_mass_direct(f, e, grid_step);
}

[[nodiscard]] inline MassBounds l2_mass(const SpectralFunction& f, const PeriodicIntervalSet& e, double grid_step,
                                        Integrator how = Integrator::automatic) {
  if (how == Integrator::direct) return l2_mass_direct(f, e, grid_step);
  if (how == Integrator::automatic && !detail::has_cell_period(f, e)) return l2_mass_direct(f, e, grid_step);
  return l2_mass_modulation(f, e);
}

/// ∫_a^∞ (1 + s²)^{-2} ds, a >= 0. Closed form ½(atan(1/a) - a/(1+a²)); for
/// large a the two terms cancel, so the asymptotic series takes over.
[[nodiscard]] inline double decay_tail_integral(double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("decay_tail_integral: a must be >= 0");
  if (a == 0.0) return pi / 4.0;
  if (a <= 8.0) return 0.5 * (std::atan(1.0 / a) - a / (1.0 + a * a));
  // Σ_k (-1)^k (k+1) a^{-(2k+3)} / (2k+3); terms shrink by 1/a² so 20 suffice.
  const double inv2 = 1.0 / (a * a);
  double term = 1.0 / (a * a * a);
  double s = 0.0;
  for (int k = 0; k < 20; ++k) {
    s += (k % 2 == 0 ? 1.0 : -1.0) * (k + 1) * term / (2 * k + 3);
    term *= inv2;
  }
  return s;
}

/// Certified bound for ∫_{|t|>R} |f|²: ‖P‖_∞² (C₁/L)² ∫_{|t|>R} (1 + (t/L)²)^{-2} dt.
[[nodiscard]] inline double tail_bound(const SpectralFunction& f, double R) {
  const double L = f.compression();
  if (!(R >= L)) throw std::invalid_argument("tail_bound: R must be >= L");
  const double c1 = f.bump().decay_constant();
  return sqr(f.sup_poly()) * sqr(c1) * 2.0 * decay_tail_integral(R / L) / L;
}

[[nodiscard]] inline double tail_bound(const CounterexampleParams& p, const Bump& bump, double R) {
  const double L = static_cast<double>(p.L);
  if (!(R >= L)) throw std::invalid_argument("tail_bound: R must be >= L");
  return sqr(static_cast<double>(p.m)) * sqr(bump.decay_constant()) * 2.0 * decay_tail_integral(R / L) / L;
}

struct ConcentrationReport {
  int n = 0;
  int d = 0;
  std::int64_t N = 0;
  std::int64_t L = 0;
  double total_mass = 0.0;            // lower bound for ∫_{window} |f|²
  double mass_on_Q = 0.0;             // lower bound
  double mass_off_Q_in_window = 0.0;  // upper bound
  double tail_bound = 0.0;
  double ratio = 0.0;  // (mass_off + tail) / total_mass
  double grid_step = 0.0;
  Interval window{-1.0, 1.0};
  Integrator integrator = Integrator::automatic;
};

struct ConcentrationOptions {
  Integrator integrator = Integrator::automatic;  // automatic: direct for n <= 3, modulation above
  double grid_refinement = 1.0;                   // direct panel = max_grid_step / refinement
};

/// Cells of the window [-N, N) in units of 1/N, split into Q_n and the rest.
/// Masses are translation invariant, so the untranslated level is used.
[[nodiscard]] inline ConcentrationReport concentration_ratio(const CounterexampleParams& p,
                                                            std::shared_ptr<const Bump> bump,
                                                            const ConcentrationOptions& opt = {}) {
  if (!(opt.grid_refinement >= 1.0)) throw std::invalid_argument("concentration_ratio: grid_refinement must be >= 1");
  const SpectralFunction f(p, std::move(bump));
  const auto q = build_Q_n(p);
  const double period = q.period();
  const std::int64_t cells = p.N * p.N;

  IntervalSet off_pattern;
  {
    const auto& qp = q.pattern().parts();
    double cursor = 0.0;
    for (const auto& piece : qp) {
      if (cursor < piece.lo()) off_pattern.append_sorted(cursor, piece.lo());
      cursor = piece.hi();
    }
    if (cursor < period) off_pattern.append_sorted(cursor, period);
  }
  const PeriodicIntervalSet full(IntervalSet{Interval(0.0, period)}, period, -cells, cells - 1);
  const PeriodicIntervalSet off(off_pattern, period, -cells, cells - 1);
  // Q_n starts at index -N²+1; cell -N² belongs to the window but not to Q_n.
  const PeriodicIntervalSet first_cell(q.pattern(), period, -cells, -cells);

  ConcentrationReport r;
  r.n = p.n;
  r.d = p.d;
  r.N = p.N;
  r.L = p.L;
  r.window = Interval(-static_cast<double>(p.N), static_cast<double>(p.N));
  r.grid_step = max_grid_step(f) / opt.grid_refinement;
  r.integrator = opt.integrator == Integrator::automatic
                     ? (p.n <= 3 ? Integrator::direct : Integrator::modulation)
                     : opt.integrator;

  MassBounds total, on_q, off_m;
  if (r.integrator == Integrator::modulation) {
    // One pass of envelope sums serves every pattern; Q_n's missing cell is
    // the single-cell sum subtracted back out.
    const double n = static_cast<double>(p.N);
    const auto [all_lo, all_hi] = detail::envelope_sums(f, -cells, cells - 1);
    const auto [one_lo, one_hi] = detail::envelope_sums(f, -cells, -cells);
    const TrigPoly& base = f.poly().base();
    const auto m_full = cell_moments(base, IntervalSet{Interval(0.0, 1.0)});
    const auto m_q = cell_moments(base, detail::to_cell_units(q, n));
    const auto m_off = cell_moments(base, detail::to_cell_units(off, n));
    using detail::combine_raw;
    total = {combine_raw(m_full, all_lo, n), combine_raw(m_full, all_hi, n)};
    on_q = {combine_raw(m_q, all_lo, n) - combine_raw(m_q, one_lo, n),
            combine_raw(m_q, all_hi, n) - combine_raw(m_q, one_hi, n)};
    off_m = {combine_raw(m_off, all_lo, n) + combine_raw(m_q, one_lo, n),
             combine_raw(m_off, all_hi, n) + combine_raw(m_q, one_hi, n)};
  } else {
    total = l2_mass(f, full, r.grid_step, r.integrator);
    on_q = l2_mass(f, q, r.grid_step, r.integrator);
    off_m = l2_mass(f, off, r.grid_step, r.integrator);
    off_m += l2_mass(f, first_cell, r.grid_step, r.integrator);
  }

  r.total_mass = total.lower;
  r.mass_on_Q = on_q.lower;
  r.mass_off_Q_in_window = off_m.upper;
  r.tail_bound = tail_bound(f, static_cast<double>(p.N));
  r.ratio = r.total_mass > 0.0 ? (r.mass_off_Q_in_window + r.tail_bound) / r.total_mass
                               : std::numeric_limits<double>::infinity();
  return r;
}

/// ‖g‖₂ against ‖ĝ‖₂ for g sampled at j/M on [0, 1) and zero elsewhere. ĝ is
/// taken from a 4x zero-padded DFT and integrated over |ξ| <= M/4, where the
/// sampled transform is still faithful. Returns |‖g‖ - ‖ĝ‖| / ‖g‖.
[[nodiscard]] inline double plancherel_check(std::span<const double> samples) {
  const auto m = samples.size();
  if (m == 0) return 0.0;
  CompensatedSum time_side;
  for (double v : samples) time_side += v * v;
  const double g_norm_sq = time_side.value() / static_cast<double>(m);
  if (g_norm_sq == 0.0) return 0.0;

  constexpr std::size_t pad = 4;
  const std::size_t len = pad * m;
  std::unique_ptr<double, detail::FftwFree> in(fftw_alloc_real(len));
  std::unique_ptr<fftw_complex, detail::FftwFree> out(fftw_alloc_complex(len / 2 + 1));
  if (!in || !out) throw std::bad_alloc();
  std::fill(in.get(), in.get() + len, 0.0);
  std::copy(samples.begin(), samples.end(), in.get());
  std::unique_ptr<std::remove_pointer_t<fftw_plan>, detail::FftwPlanDestroy> plan(
      fftw_plan_dft_r2c_1d(static_cast<int>(len), in.get(), out.get(), FFTW_ESTIMATE));
  if (!plan) throw std::runtime_error("plancherel_check: FFTW plan failed");
  fftw_execute(plan.get());

  // ĝ(k/pad) ≈ (1/M) DFT_k; frequency spacing 1/pad. Real input, so fold ±k.
  const std::size_t band = len / 4;  // |ξ| <= M/4  <=>  |k| <= pad M / 4
  CompensatedSum freq_side;
  for (std::size_t k = 0; k <= band; ++k) {
    const double re = out.get()[k][0] / static_cast<double>(m);
    const double im = out.get()[k][1] / static_cast<double>(m);
    const double w = k == 0 ? 1.0 : 2.0;
    freq_side += w * (re * re + im * im);
  }
  const double hat_norm_sq = freq_side.value() / static_cast<double>(pad);
  const double a = std::sqrt(g_norm_sq);
  return std::abs(a - std::sqrt(hat_norm_sq)) / a;
}

}  // namespace annpair
