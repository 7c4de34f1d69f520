#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace annpair {

inline constexpr double pi = std::numbers::pi;

/// Neumaier-compensated accumulator. Used wherever long sums of lengths or
/// quadrature weights would otherwise drift.
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;

  constexpr void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  constexpr CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  [[nodiscard]] constexpr double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// 64-bit FNV-1a. Provenance digests only, not a cryptographic hash.
class Fnv1a {
 public:
  void update(const void* data, std::size_t size) noexcept {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= bytes[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(std::string_view s) noexcept { update(s.data(), s.size()); }
  void update(double x) noexcept { update(&x, sizeof x); }

  [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

[[nodiscard]] inline double sqr(double x) noexcept { return x * x; }

}  // namespace annpair
