#include "ergomax/fit.hpp"

#include <cmath>

#include "ergomax/error.hpp"

namespace ergomax {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), Errc::InvalidParameter, "fit_line: size mismatch");
  require(x.size() >= 2, Errc::InsufficientRange, "fit_line: need at least two points");

  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  require(sxx > 0.0, Errc::InsufficientRange, "fit_line: x values are all equal");

  LinearFit f;
  f.n = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;

  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  if (x.size() > 2) {
    const double s2 = rss / (n - 2.0);
    f.slope_stderr = std::sqrt(s2 / sxx);
    f.intercept_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return f;
}

}  // namespace ergomax
