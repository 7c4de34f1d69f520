#pragma once

// Smooth bump ψ supported in [0, 1], normalized to ‖ψ‖₂ = 1, with a tabulated
// Fourier transform. ψ is required to be symmetric about 1/2, so
//   ψ̂(ξ) = e^{-iπξ} A(ξ),   A(ξ) = ∫ ψ(t) cos(2πξ(t - 1/2)) dt
// with A real and even; only A is stored.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "annpair/numeric.hpp"

namespace annpair {

enum class BumpKind {
  standard,  // exp(-1/(t(1-t))) on (0, 1)
};

struct BumpOptions {
  int samples = 1024;          // base sample count on [0, 1); the 2x run certifies convergence
  int per_unit = 512;          // table entries per unit of ξ
  double table_limit = 128.0;  // ξ range of the table
  double convergence_tol = 1e-12;
};

struct HatSample {
  double value;     // A(ξ) inside the table, the envelope C₁/(1+ξ²) outside
  bool bound_only;  // true when value is the decay envelope, not an evaluation
};

class Bump {
 public:
  [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

  /// Normalized ψ(t).
  [[nodiscard]] double value(double t) const { return scale_ * profile_(t); }

  [[nodiscard]] double table_limit() const noexcept { return limit_; }
  [[nodiscard]] double table_step() const noexcept { return step_; }
  [[nodiscard]] double decay_constant() const noexcept { return c1_; }
  [[nodiscard]] double interpolation_error() const noexcept { return interp_err_; }
  [[nodiscard]] double convergence_error() const noexcept { return conv_err_; }
  [[nodiscard]] double normalization_error() const noexcept { return norm_err_; }
  [[nodiscard]] std::uint64_t table_digest() const noexcept { return digest_; }
  [[nodiscard]] const std::vector<double>& decay_check_radii() const noexcept { return decay_radii_; }

  /// C₁ / (1 + ξ²) >= |ψ̂(ξ)| everywhere.
  [[nodiscard]] double envelope(double xi) const noexcept { return c1_ / (1.0 + xi * xi); }

  [[nodiscard]] HatSample hat(double xi) const noexcept {
    const double a = std::abs(xi);
    if (!(a <= limit_)) return {envelope(a), true};
    return {interpolate(a), false};
  }

  /// A(ξ), the phase-stripped transform; |ψ̂(ξ)| = |A(ξ)|. Throws past the table.
  [[nodiscard]] double hat_amplitude(double xi) const {
    const auto h = hat(xi);
    if (h.bound_only) throw std::out_of_range("Bump::hat_amplitude: beyond tabulated range");
    return h.value;
  }

  [[nodiscard]] std::complex<double> hat_complex(double xi) const {
    return std::polar(1.0, -pi * xi) * hat_amplitude(xi);
  }

  /// A(ξ) by direct trapezoid quadrature on enough samples to resolve ξ.
  [[nodiscard]] double hat_direct(double xi) const {
    const int m = std::max(4096, static_cast<int>(std::ceil(8.0 * std::abs(xi))) + 1);
    CompensatedSum s;
    for (int k = 1; k < m; ++k) {
      const double t = static_cast<double>(k) / m;
      s += value(t) * std::cos(2.0 * pi * xi * (t - 0.5));
    }
    return s.value() / m;
  }

  /// ∫|ψ̂|² over [-limit, limit] by trapezoid on the fine table.
  [[nodiscard]] double hat_l2_norm_sq() const noexcept { return hat_norm_sq_; }

  /// ∫ψ² by the same quadrature used for normalization (1 up to rounding).
  [[nodiscard]] double l2_norm_sq() const {
    const int m = 2 * samples_;
    CompensatedSum s;
    for (int k = 1; k < m; ++k) s += sqr(value(static_cast<double>(k) / m));
    return s.value() / m;
  }

  /// Samples of ψ at k / count, k = 0..count-1.
  [[nodiscard]] std::vector<double> samples(int count) const {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = value(static_cast<double>(k) / count);
    return out;
  }

 private:
  friend Bump build_bump(std::string name, std::function<double(double)> profile, const BumpOptions& opt);

  [[nodiscard]] double interpolate(double a) const noexcept {
    const double x = a / step_;
    auto i = static_cast<std::int64_t>(x);
    const auto last = static_cast<std::int64_t>(table_.size()) - 3;
    if (i > last) i = last;
    const double u = x - static_cast<double>(i);
    auto at = [&](std::int64_t k) { return table_[static_cast<std::size_t>(k < 0 ? -k : k)]; };
    const double f0 = at(i - 1), f1 = at(i), f2 = at(i + 1), f3 = at(i + 2);
    // Cubic Lagrange through nodes -1, 0, 1, 2.
    return f0 * (-u * (u - 1.0) * (u - 2.0) / 6.0) + f1 * ((u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0) +
           f2 * (-(u + 1.0) * u * (u - 2.0) / 2.0) + f3 * ((u + 1.0) * u * (u - 1.0) / 6.0);
  }

  std::string kind_;
  std::function<double(double)> profile_;
  double scale_ = 1.0;
  int samples_ = 0;
  double limit_ = 0.0;
  double step_ = 0.0;
  std::vector<double> table_;
  double c1_ = 0.0;
  double interp_err_ = 0.0;
  double conv_err_ = 0.0;
  double norm_err_ = 0.0;
  double hat_norm_sq_ = 0.0;
  std::uint64_t digest_ = 0;
  std::vector<double> decay_radii_;
};

namespace detail {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
struct FftwPlanDestroy {
  void operator()(fftw_plan p) const noexcept { fftw_destroy_plan(p); }
};

/// A(q / per_unit_fine) for q = 0..count-1 from `samples` values of ψ on [0,1),
/// zero-padded so the DFT lands on the requested ξ grid.
inline std::vector<double> demodulated_transform(const std::vector<double>& psi, int per_unit_fine,
                                                 std::size_t count, double* imag_residual) {
  const std::size_t m = psi.size();
  const std::size_t len = m * static_cast<std::size_t>(per_unit_fine);
  if (count > len / 2) throw std::invalid_argument("demodulated_transform: table exceeds Nyquist range");
  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * len)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (len / 2 + 1))));
  if (!in || !out) throw std::bad_alloc();
  std::unique_ptr<fftw_plan_s, FftwPlanDestroy> plan(
      fftw_plan_dft_r2c_1d(static_cast<int>(len), in.get(), out.get(), FFTW_ESTIMATE));
  std::fill(in.get(), in.get() + len, 0.0);
  std::copy(psi.begin(), psi.end(), in.get());
  fftw_execute(plan.get());
  std::vector<double> a(count);
  double resid = 0.0;
  for (std::size_t q = 0; q < count; ++q) {
    const double xi = static_cast<double>(q) / per_unit_fine;
    const std::complex<double> x(out.get()[q][0], out.get()[q][1]);
    const std::complex<double> v = std::polar(1.0, pi * xi) * x / static_cast<double>(m);
    a[q] = v.real();
    resid = std::max(resid, std::abs(v.imag()));
  }
  if (imag_residual) *imag_residual = resid;
  return a;
}

inline double standard_bump(double t) noexcept {
  if (!(t > 0.0 && t < 1.0)) return 0.0;
  return std::exp(-1.0 / (t * (1.0 - t)));
}

}  // namespace detail

/// Builds a bump from an arbitrary profile supported in [0, 1] and symmetric about 1/2.
inline Bump build_bump(std::string name, std::function<double(double)> profile, const BumpOptions& opt) {
  if (opt.samples < 64 || opt.per_unit < 4 || !(opt.table_limit > 0.0)) {
    throw std::invalid_argument("build_bump: invalid options");
  }
  Bump b;
  b.kind_ = std::move(name);
  b.profile_ = std::move(profile);
  b.samples_ = opt.samples;
  b.limit_ = opt.table_limit;
  b.step_ = 1.0 / opt.per_unit;

  // Normalization by trapezoid at M and 2M samples; the two must agree.
  auto raw_norm_sq = [&](int m) {
    CompensatedSum s;
    for (int k = 1; k < m; ++k) s += sqr(b.profile_(static_cast<double>(k) / m));
    return s.value() / m;
  };
  const double n1 = raw_norm_sq(opt.samples);
  const double n2 = raw_norm_sq(2 * opt.samples);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw std::runtime_error("build_bump: profile has zero norm");
  b.norm_err_ = std::abs(n1 - n2) / n2;
  if (b.norm_err_ > opt.convergence_tol) {
    throw std::runtime_error("build_bump: normalization quadrature did not converge");
  }
  b.scale_ = 1.0 / std::sqrt(n2);

  for (int k = 1; k < opt.samples; ++k) {
    const double t = static_cast<double>(k) / opt.samples;
    if (std::abs(b.profile_(t) - b.profile_(1.0 - t)) > 1e-13 * (std::abs(b.profile_(t)) + 1e-300)) {
      throw std::invalid_argument("build_bump: profile must be symmetric about 1/2");
    }
  }

  // The transform is taken on a grid twice as fine as the table so the odd
  // entries certify the interpolation error.
  const int fine = 2 * opt.per_unit;
  const auto entries = static_cast<std::size_t>(std::ceil(opt.table_limit * opt.per_unit)) + 3;
  const std::size_t fine_count = 2 * entries;
  double resid1 = 0.0, resid2 = 0.0;
  const auto coarse = detail::demodulated_transform(b.samples(opt.samples), fine, fine_count, &resid1);
  const auto refined = detail::demodulated_transform(b.samples(2 * opt.samples), fine, fine_count, &resid2);
  double conv = 0.0;
  for (std::size_t q = 0; q < fine_count; ++q) conv = std::max(conv, std::abs(coarse[q] - refined[q]));
  b.conv_err_ = conv / std::abs(refined[0]);
  if (b.conv_err_ > opt.convergence_tol || std::max(resid1, resid2) > 1e-10) {
    throw std::runtime_error("build_bump: transform did not converge (or bump is not symmetric)");
  }

  b.table_.resize(entries);
  for (std::size_t i = 0; i < entries; ++i) b.table_[i] = refined[2 * i];
  double interp = 0.0;
  double c1 = 0.0;
  for (std::size_t q = 0; q < fine_count; ++q) {
    const double xi = static_cast<double>(q) / fine;
    if (xi > opt.table_limit) break;
    if (q % 2 == 1) interp = std::max(interp, std::abs(b.interpolate(xi) - refined[q]));
    c1 = std::max(c1, std::abs(refined[q]) * (1.0 + xi * xi));
  }
  b.interp_err_ = interp;
  // Margin for maxima falling between grid points.
  b.c1_ = c1 * (1.0 + 1e-3);

  {
    CompensatedSum s;
    const double h = 1.0 / fine;
    const auto last = static_cast<std::size_t>(std::floor(opt.table_limit * fine));
    for (std::size_t q = 0; q <= last; ++q) {
      const double w = (q == 0 || q == last) ? 0.5 : 1.0;
      s += w * sqr(refined[q]);
    }
    b.hat_norm_sq_ = 2.0 * h * s.value();
  }

  // Decay envelope re-checked past the table at doubling radii by direct quadrature.
  for (double r = opt.table_limit; r <= 16.0 * opt.table_limit; r *= 2.0) {
    b.decay_radii_.push_back(r);
    if (std::abs(b.hat_direct(r)) > b.envelope(r)) {
      throw std::runtime_error("build_bump: decay envelope violated at xi = " + std::to_string(r));
    }
  }

  Fnv1a h;
  h.update(b.kind_);
  h.update(b.table_.data(), b.table_.size() * sizeof(double));
  b.digest_ = h.digest();
  return b;
}

inline Bump build_bump(BumpKind kind = BumpKind::standard, const BumpOptions& opt = {}) {
  switch (kind) {
    case BumpKind::standard:
      return build_bump("standard", detail::standard_bump, opt);
  }
  throw std::invalid_argument("build_bump: unknown kind");
}

}  // namespace annpair
