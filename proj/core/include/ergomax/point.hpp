#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

namespace ergomax {

/// State of a one- or two-dimensional map. Fixed capacity, no heap.
struct Point {
  std::array<double, 2> coords{};
  std::uint8_t dim = 1;

  static constexpr Point of(double x) { return Point{{x, 0.0}, 1}; }
  static constexpr Point of(double x, double y) { return Point{{x, y}, 2}; }

  constexpr double operator[](std::size_t i) const { return coords[i]; }
  constexpr double& operator[](std::size_t i) { return coords[i]; }

  std::span<const double> view() const { return {coords.data(), dim}; }

  bool finite() const {
    for (std::size_t i = 0; i < dim; ++i)
      if (!std::isfinite(coords[i])) return false;
    return true;
  }

  friend constexpr bool operator==(const Point& a, const Point& b) {
    if (a.dim != b.dim) return false;
    for (std::size_t i = 0; i < a.dim; ++i)
      if (a.coords[i] != b.coords[i]) return false;
    return true;
  }
};

/// Euclidean distance. Mismatched dimensions compare on the shared prefix.
inline double distance(const Point& a, const Point& b) {
  if (a.dim == 1 || b.dim == 1) return std::abs(a[0] - b[0]);
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace ergomax
