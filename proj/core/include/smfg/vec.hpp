#pragma once

#include <array>
#include <cmath>

namespace smfg {

// Points and gradients. One-dimensional problems use component 0 and keep
// component 1 at zero, so every formula below is written once for d <= 2.
using Vec = std::array<double, 2>;

inline constexpr double dot(const Vec& a, const Vec& b) noexcept {
  return a[0] * b[0] + a[1] * b[1];
}

inline double norm(const Vec& a) noexcept { return std::hypot(a[0], a[1]); }

inline constexpr Vec operator+(const Vec& a, const Vec& b) noexcept {
  return {a[0] + b[0], a[1] + b[1]};
}

inline constexpr Vec operator-(const Vec& a, const Vec& b) noexcept {
  return {a[0] - b[0], a[1] - b[1]};
}

inline constexpr Vec operator*(double s, const Vec& a) noexcept {
  return {s * a[0], s * a[1]};
}

}  // namespace smfg
