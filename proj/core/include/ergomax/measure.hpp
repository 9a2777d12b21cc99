#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ergomax/dynamics.hpp"
#include "ergomax/error.hpp"
#include "ergomax/fit.hpp"
#include "ergomax/point.hpp"

namespace ergomax::measure {

/// Empirical invariant measure: equal-weight atoms at orbit samples.
/// Coordinates are stored flat. Sorted distance caches are built explicitly
/// with cache(); everything else is read-only.
class EmpiricalMeasure {
 public:
  static inline constexpr std::size_t kMinFitSamples = 100000;

  EmpiricalMeasure(int dim, std::vector<double> flat_coords);
  explicit EmpiricalMeasure(std::span<const Point> samples);

  static EmpiricalMeasure from_orbit(const dynamics::MapSystem& map, Point x0, std::uint64_t n,
                                     dynamics::OrbitOptions opts = {});

  int dim() const { return dim_; }
  std::size_t size() const { return n_; }
  Point sample(std::size_t i) const;

  /// Precompute the sorted distances to center so ball queries at that
  /// center take O(log N).
  void cache(const Point& center);
  bool cached(const Point& center) const;

  std::uint64_t ball_count(const Point& center, double r) const;
  double ball_mass(const Point& center, double r) const {
    return static_cast<double>(ball_count(center, r)) / static_cast<double>(n_);
  }
  /// #{samples with r < dist <= r + eps}.
  std::uint64_t annulus_count(const Point& center, double r, double eps) const;

 private:
  double dist(std::size_t i, const Point& c) const;
  const std::vector<double>* find_cache(const Point& center) const;

  int dim_;
  std::size_t n_;
  std::vector<double> coords_;
  std::vector<std::pair<Point, std::vector<double>>> caches_;
};

struct ScalingPoint {
  double r;
  std::uint64_t count;
  double mass;
};

struct DimensionFit {
  double d_hat = 0.0;
  double d_stderr = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<ScalingPoint> points;  // the grid points that entered the fit
};

inline constexpr std::uint64_t kBallCountFloor = 50;
inline constexpr std::uint64_t kAnnulusCountFloor = 20;
inline constexpr std::size_t kMinFitPoints = 6;

/// Slope of log nu(B(center, r)) against log r. The grid must decrease and
/// span at least two decades; radii whose ball holds fewer than 50 samples
/// are dropped, and InsufficientMass is thrown if fewer than 6 remain.
DimensionFit local_dimension(const EmpiricalMeasure& m, const Point& center,
                             std::span<const double> r_grid,
                             std::size_t min_samples = EmpiricalMeasure::kMinFitSamples);

/// Log-spaced decreasing grid r_max, ..., r_min with `count` points.
std::vector<double> log_grid(double r_max, double r_min, std::size_t count);

struct AnnulusFit {
  double delta_hat = 0.0;
  double c_hat = 0.0;
  double delta_stderr = 0.0;
  double r2 = 0.0;
  std::vector<ScalingPoint> points;  // r field holds eps, mass the annulus mass
};

/// Fit nu(B(c, r+eps)) - nu(B(c, r)) = C eps^delta. Grid values must be
/// decreasing and below r; annuli with fewer than 20 samples are dropped.
AnnulusFit annulus_regularity(const EmpiricalMeasure& m, const Point& center, double r,
                              std::span<const double> eps_grid,
                              std::size_t min_samples = EmpiricalMeasure::kMinFitSamples);

/// Lipschitz test functions for correlation estimates.
struct TestFunction {
  enum class Kind { Dist, Coord, Hinge, Const };
  Kind kind = Kind::Const;
  Point center{};    // Dist
  std::size_t index = 0;  // Coord and Hinge
  double level = 0.0;     // Hinge threshold, Const value

  static TestFunction dist(Point c) { return {Kind::Dist, c, 0, 0.0}; }
  static TestFunction coord(std::size_t i) { return {Kind::Coord, {}, i, 0.0}; }
  /// max(0, level - x[index]).
  static TestFunction hinge(double level, std::size_t i = 0) { return {Kind::Hinge, {}, i, level}; }
  static TestFunction constant(double v) { return {Kind::Const, {}, 0, v}; }

  double operator()(const Point& x) const {
    switch (kind) {
      case Kind::Dist: return distance(x, center);
      case Kind::Coord: return x[index];
      case Kind::Hinge: return level > x[index] ? level - x[index] : 0.0;
      case Kind::Const: return level;
    }
    return 0.0;
  }
};

/// Streaming lagged cross-moments of (g1(x_k), g2(x_{k+j})) for a fixed lag
/// set. Each lag keeps its own sums over exactly the pairs it saw, so the
/// subtracted means cover the same index ranges as the product. Accumulators
/// over independent orbits merge by summation.
class CorrelationAccumulator {
 public:
  CorrelationAccumulator(TestFunction g1, TestFunction g2, std::vector<std::uint64_t> lags);

  void push(const Point& x) {
    const double a = g1_(x);
    const double b = g2_(x);
    ++count_;
    sum1_ += a;
    sum2_ += b;
    sq1_ += a * a;
    sq2_ += b * b;
    for (std::size_t i = 0; i < lags_.size(); ++i) {
      const auto j = lags_[i];
      if (count_ <= j) continue;
      const double past = ring_[(head_ - j) & mask_];
      pair_[i].s1 += past;
      pair_[i].s2 += b;
      pair_[i].prod += past * b;
      pair_[i].n += 1;
    }
    ring_[head_] = a;
    head_ = (head_ + 1) & mask_;
  }

  /// Add the sums of an accumulator run on an independent orbit.
  void merge(const CorrelationAccumulator& other);

  std::span<const std::uint64_t> lags() const { return lags_; }
  std::uint64_t count() const { return count_; }
  double sd1() const;
  double sd2() const;
  /// |mean(g1 g2) - mean(g1) mean(g2)| at lag index i.
  double correlation(std::size_t i) const;

 private:
  struct PairSums {
    double s1 = 0.0, s2 = 0.0, prod = 0.0;
    std::uint64_t n = 0;
  };

  TestFunction g1_, g2_;
  std::vector<std::uint64_t> lags_;
  std::vector<PairSums> pair_;
  std::vector<double> ring_;
  std::uint64_t head_ = 0;
  std::uint64_t mask_ = 0;
  std::uint64_t count_ = 0;
  double sum1_ = 0.0, sum2_ = 0.0, sq1_ = 0.0, sq2_ = 0.0;
};

struct DecayEntry {
  std::uint64_t lag;
  double c_hat;
  bool above_floor;
};

struct DecayReport {
  std::vector<DecayEntry> entries;
  double noise_floor = 0.0;
  std::size_t n_samples = 0;
  std::size_t used = 0;
  /// log C_j against j: slope is -theta for C_j ~ e^{-theta j}.
  LinearFit exp_fit;
  /// log C_j against log j: slope is the polynomial exponent.
  LinearFit poly_fit;
  dynamics::DecayClass decay;
  double exponent = 0.0;  // slope of the chosen fit
};

struct DecayOptions {
  /// Entries count for the class fit only while C_j exceeds
  /// floor_multiplier * sd(g1) * sd(g2) / sqrt(N).
  double floor_multiplier = 5.0;
  std::size_t min_fit_lags = 3;
};

DecayReport classify_decay(const CorrelationAccumulator& acc, DecayOptions opts = {});

/// Estimate C_j along a simulated orbit and classify the decay.
DecayReport correlation_decay(const dynamics::MapSystem& map, Point x0, std::uint64_t n,
                              const TestFunction& g1, const TestFunction& g2,
                              std::vector<std::uint64_t> lags, dynamics::OrbitOptions orbit = {},
                              DecayOptions opts = {});

/// 1, 2, ..., up to `dense`, then geometric with the given ratio up to max_lag.
std::vector<std::uint64_t> lag_grid(std::uint64_t dense, std::uint64_t max_lag, double ratio = 1.3);

}  // namespace ergomax::measure
