#pragma once

// Real, even, 1-periodic trigonometric polynomials and the Fejér family.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "annpair/numeric.hpp"

namespace annpair {

/// Σ_{|k|<=d} c_k e^{2πikt} with c_k = c_{-k} real, stored as c_0..c_d.
class TrigPoly {
 public:
  TrigPoly() : half_{0.0} {}
  explicit TrigPoly(std::vector<double> half_coeffs) : half_(std::move(half_coeffs)) {
    if (half_.empty()) half_.push_back(0.0);
  }

  [[nodiscard]] int degree() const noexcept { return static_cast<int>(half_.size()) - 1; }
  [[nodiscard]] double coeff(int k) const noexcept {
    const auto a = static_cast<std::size_t>(k < 0 ? -k : k);
    return a < half_.size() ? half_[a] : 0.0;
  }
  [[nodiscard]] const std::vector<double>& half_coefficients() const noexcept { return half_; }

  /// c_{-d}, ..., c_d.
  [[nodiscard]] std::vector<double> coefficients() const {
    std::vector<double> out;
    out.reserve(2 * half_.size() - 1);
    for (int k = -degree(); k <= degree(); ++k) out.push_back(coeff(k));
    return out;
  }

  /// c_0 + 2 Σ c_k cos(2πkt), by Clenshaw recurrence on the cosine series.
  [[nodiscard]] double eval(double t) const noexcept {
    const double phase = t - std::floor(t);
    return eval_phase(phase);
  }

  /// Same as eval but with the fractional part supplied by the caller.
  [[nodiscard]] double eval_phase(double frac) const noexcept {
    const double x = std::cos(2.0 * pi * frac);
    double b1 = 0.0;
    double b2 = 0.0;
    for (int k = degree(); k >= 1; --k) {
      const double b0 = 2.0 * half_[static_cast<std::size_t>(k)] + 2.0 * x * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return half_[0] + x * b1 - b2;
  }

  /// Parseval: Σ_k c_k^2.
  [[nodiscard]] double l2_norm_sq() const noexcept {
    CompensatedSum s;
    s += sqr(half_[0]);
    for (std::size_t k = 1; k < half_.size(); ++k) s += 2.0 * sqr(half_[k]);
    return s.value();
  }

  /// Coefficients of |p|^2 = p^2 (degree 2d), again even and real.
  [[nodiscard]] TrigPoly squared() const {
    const int d = degree();
    std::vector<double> out(static_cast<std::size_t>(2 * d + 1), 0.0);
    for (int l = 0; l <= 2 * d; ++l) {
      CompensatedSum s;
      for (int k = std::max(-d, l - d); k <= std::min(d, l + d); ++k) s += coeff(k) * coeff(l - k);
      out[static_cast<std::size_t>(l)] = s.value();
    }
    return TrigPoly(std::move(out));
  }

  friend bool operator==(const TrigPoly&, const TrigPoly&) = default;

 private:
  std::vector<double> half_;
};

/// Fejér kernel F_m: degree m-1, c_k = 1 - |k|/m, F_m(0) = m.
[[nodiscard]] inline TrigPoly fejer(int m) {
  if (m < 1) throw std::invalid_argument("fejer: m must be >= 1");
  std::vector<double> c(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) c[static_cast<std::size_t>(k)] = 1.0 - static_cast<double>(k) / m;
  return TrigPoly(std::move(c));
}

/// P(t) = F_m(t + 1/2): coefficients pick up (-1)^k, peak m at t = 1/2.
[[nodiscard]] inline TrigPoly shifted_fejer(int m) {
  auto c = fejer(m).half_coefficients();
  for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
  return TrigPoly(std::move(c));
}

/// Closed form (1/m) (sin(πmt) / sin(πt))^2, with the limit m at integers.
[[nodiscard]] inline double fejer_closed_form(int m, double t) noexcept {
  const double frac = t - std::round(t);
  const double s = std::sin(pi * frac);
  if (s == 0.0) return static_cast<double>(m);
  const double num = std::sin(pi * static_cast<double>(m) * frac);
  return sqr(num / s) / m;
}

struct DegreeChoice {
  int n = 0;
  int m = 0;                    // Fejér order, d = m - 1
  int d = 0;
  double analytic_bound = 0.0;  // 1 / (m sin^2(π/n))
  double measured_max = 0.0;    // max |P| over the grid in I^c
  std::int64_t grid_points = 0; // grid points that landed in I^c
};

/// Smallest m with 1/(m sin^2(π/n)) <= 1/n, then a grid certificate that
/// max |P| <= 1/n off I = [1/2 - 1/n, 1/2 + 1/n].
[[nodiscard]] inline DegreeChoice choose_degree(int n) {
  if (n < 2) throw std::invalid_argument("choose_degree: n must be >= 2");
  const double s2 = sqr(std::sin(pi / n));
  const double exact = n / s2;
  // Snap values that are integers up to rounding (n = 3, 4, 6) before taking the ceiling.
  const double nearest = std::round(exact);
  const double m_real = std::abs(exact - nearest) <= 1e-9 * exact ? nearest : std::ceil(exact);
  DegreeChoice out;
  out.n = n;
  out.m = static_cast<int>(m_real);
  out.d = out.m - 1;
  out.analytic_bound = 1.0 / (out.m * s2);

  const TrigPoly p = shifted_fejer(out.m);
  const double half_width = 1.0 / n;
  const double outside = 1.0 - 2.0 * half_width;  // length of I^c inside [0,1)
  double worst = 0.0;
  std::int64_t used = 0;
  if (outside > 0.0) {
    const auto total = static_cast<std::int64_t>(std::ceil(1.0e4 * out.m / outside)) + 1;
    for (std::int64_t i = 0; i < total; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(total);
      if (std::abs(t - 0.5) < half_width) continue;
      worst = std::max(worst, std::abs(p.eval_phase(t)));
      ++used;
    }
    for (double edge : {0.5 - half_width, 0.5 + half_width}) {
      worst = std::max(worst, std::abs(p.eval_phase(edge)));
      ++used;
    }
  }
  out.measured_max = worst;
  out.grid_points = used;
  if (worst > (1.0 + 1e-12) / n) {
    throw std::runtime_error("choose_degree: grid maximum exceeds 1/n; bound derivation is wrong");
  }
  return out;
}

/// P_N(t) = P(N t). Its transform is the spike train Σ c_k δ(ξ - kN).
class ScaledTrigPoly {
 public:
  struct Spike {
    double frequency;
    double weight;
  };

  ScaledTrigPoly(TrigPoly base, std::int64_t scale) : base_(std::move(base)), scale_(scale) {
    if (scale < 1) throw std::invalid_argument("scale_to_period: N must be >= 1");
  }

  [[nodiscard]] const TrigPoly& base() const noexcept { return base_; }
  [[nodiscard]] std::int64_t scale() const noexcept { return scale_; }

  /// Reduces N t modulo 1 with an FMA residual so large arguments keep their phase.
  [[nodiscard]] double eval(double t) const noexcept {
    const double n = static_cast<double>(scale_);
    const double prod = n * t;
    const double resid = std::fma(n, t, -prod);
    double frac = (prod - std::floor(prod)) + resid;
    frac -= std::floor(frac);
    return base_.eval_phase(frac);
  }

  [[nodiscard]] std::vector<Spike> spikes() const {
    std::vector<Spike> out;
    for (int k = -base_.degree(); k <= base_.degree(); ++k) {
      out.push_back({static_cast<double>(k) * static_cast<double>(scale_), base_.coeff(k)});
    }
    return out;
  }

 private:
  TrigPoly base_;
  std::int64_t scale_;
};

[[nodiscard]] inline ScaledTrigPoly scale_to_period(const TrigPoly& p, std::int64_t n) {
  return ScaledTrigPoly(p, n);
}

}  // namespace annpair
