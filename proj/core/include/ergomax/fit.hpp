#pragma once

#include <cstddef>
#include <span>

namespace ergomax {

/// Ordinary least-squares line y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Requires at least two points with distinct x. Standard errors need n > 2
/// and are reported as zero otherwise.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace ergomax
