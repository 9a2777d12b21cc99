#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "ergomax/dynamics.hpp"
#include "ergomax/error.hpp"
#include "ergomax/point.hpp"

namespace ergomax::targets {

/// The exponents that parametrize the growth and hitting laws. Zero means
/// "not used by this experiment".
struct RateParams {
  double d_nu = 0.0;        // local dimension
  double zeta = 0.0;        // polynomial decay rate
  double theta0 = 0.0;      // exponential decay rate
  double delta = 0.0;       // annulus regularity exponent
  double beta = 0.0;        // target schedule exponent
  double beta_prime = 0.0;  // Borel-Cantelli error exponent
  double alpha = 0.0;       // observable / short-return exponent
  double gamma = 0.0;       // Pareto tail index
  double sigma = 0.0;
  double eta = 0.0;         // upper band log-log coefficient

  /// Throws InvalidParameter if any exponent is negative or not finite.
  void validate() const;

  friend bool operator==(const RateParams&, const RateParams&) = default;
};

enum class MeasureModelKind { AnalyticLebesgue1D, EmpiricalQuantile };

std::string_view to_string(MeasureModelKind kind);

struct RadiusResult {
  double radius = 0.0;
  /// The ball B(target, radius) sticks out of [0,1].
  bool truncated = false;
};

/// How ball masses nu(B(target, r)) are obtained for one target: in closed
/// form for Lebesgue-invariant interval maps, or from the sorted distances
/// of a calibration orbit to the target.
class MeasureModel {
 public:
  static inline constexpr std::size_t kMinCalibration = 100000;

  /// Requires a one-dimensional map whose invariant measure is Lebesgue.
  static MeasureModel analytic_lebesgue_1d(const dynamics::MapSystem& map, Point target);
  /// Unchecked variant for callers that already know the measure is Lebesgue
  /// on [0,1].
  static MeasureModel analytic_lebesgue_1d(Point target);
  static MeasureModel empirical_quantile(Point target, std::vector<double> distances,
                                         std::size_t min_size = kMinCalibration);
  /// Calibrate from an orbit of length n_cal started at x0.
  static MeasureModel calibrate(const dynamics::MapSystem& map, Point target, Point x0,
                                std::uint64_t n_cal, dynamics::OrbitOptions opts = {});

  MeasureModelKind kind() const { return kind_; }
  const Point& target() const { return target_; }
  std::span<const double> calibration() const { return calibration_; }

  /// Radius whose ball carries mass s. For the analytic model the ball is
  /// solved against [0,1], so it keeps mass s even when it sticks out of the
  /// interval; that case is flagged as truncated. For the empirical model r is
  /// the empirical s-quantile of the calibration distances.
  RadiusResult radius_for_measure(double s) const;

  /// Model mass of the closed ball B(target, r).
  double mass(double r) const;

 private:
  MeasureModel(MeasureModelKind kind, Point target, std::vector<double> calibration);

  MeasureModelKind kind_;
  Point target_;
  std::vector<double> calibration_;
};

/// nu(B_n) = n^{-beta}, beta in (0,1).
struct PowerLawRule {
  double beta;
};
/// nu(B_n) = (log n)^beta / n, held at its peak value for n below the peak so
/// the radii never increase, capped at 1, and with the n = 1 term equal to 1.
struct LogPowerRule {
  double beta;
};
/// Radii given directly, one per n starting at n = 1.
struct ExplicitRadiiRule {
  std::vector<double> radii;
};

using ScheduleRule = std::variant<PowerLawRule, LogPowerRule, ExplicitRadiiRule>;

/// Prescribed mass of B_k for a closed-form rule (k >= 1).
double rule_mass(const ScheduleRule& rule, std::uint64_t k);

/// Shrinking balls B_k = B(target, r_k), k = 1..n_max, with masses set by a
/// rule and radii obtained from a measure model. Radii and the partial sums
/// E_n are tabulated once; the schedule is immutable and shareable.
class TargetSchedule {
 public:
  TargetSchedule(ScheduleRule rule, MeasureModel measure, std::uint64_t n_max);

  const ScheduleRule& rule() const { return rule_; }
  const MeasureModel& measure() const { return measure_; }
  const Point& target() const { return measure_.target(); }
  std::uint64_t n_max() const { return n_max_; }

  double radius_at(std::uint64_t k) const { return radii_[k - 1]; }
  double mass_at(std::uint64_t k) const { return masses_[k - 1]; }
  /// E_n = sum_{k <= n} nu(B_k).
  double expected_count(std::uint64_t n) const { return expected_[n - 1]; }
  /// Number of k whose ball sticks out of the state space.
  std::uint64_t truncated_count() const { return truncated_; }

 private:
  ScheduleRule rule_;
  MeasureModel measure_;
  std::uint64_t n_max_;
  std::vector<double> radii_;
  std::vector<double> masses_;
  std::vector<double> expected_;
  std::uint64_t truncated_ = 0;
};

/// Hit counts S_{n_k} and expected counts E_{n_k}.
struct HitStats {
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::uint64_t> hits;
  std::vector<double> expected;
  std::vector<std::uint64_t> hit_times;  // filled only on request

  friend bool operator==(const HitStats&, const HitStats&) = default;
};

/// Streaming hit counter for one orbit.
class HitCounter {
 public:
  HitCounter(const TargetSchedule& schedule, std::vector<std::uint64_t> checkpoints,
             bool keep_hit_times = false);

  void push(const Point& x) {
    ++count_;
    if (distance(x, schedule_->target()) <= schedule_->radius_at(count_)) {
      ++hits_;
      if (keep_) stats_.hit_times.push_back(count_);
    }
    if (next_ < stats_.checkpoints.size() && stats_.checkpoints[next_] == count_) {
      stats_.hits.push_back(hits_);
      stats_.expected.push_back(schedule_->expected_count(count_));
      ++next_;
    }
  }

  bool complete() const { return next_ == stats_.checkpoints.size(); }

  /// Throws StreamTooShort if the last checkpoint was not reached.
  HitStats finish() &&;

 private:
  const TargetSchedule* schedule_;
  HitStats stats_;
  bool keep_;
  std::size_t next_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t hits_ = 0;
};

template <class Range>
HitStats hit_stats(Range&& orbit, const TargetSchedule& schedule,
                   std::vector<std::uint64_t> checkpoints, bool keep_hit_times = false) {
  HitCounter counter(schedule, std::move(checkpoints), keep_hit_times);
  for (const Point& x : orbit) {
    if (counter.complete()) break;
    counter.push(x);
  }
  return std::move(counter).finish();
}

struct SbcFit {
  double beta_prime = 0.0;  // slope of log mean|S - E| against log E
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

inline constexpr double kDeviationFloor = 0.5;

/// Empirical error exponent of S_n = E_n + O(E_n^beta'). Per-orbit
/// deviations |S - E| are floored at half a count, averaged over the
/// ensemble, and regressed in log-log coordinates over checkpoints with
/// E in [e_min, e_max]. Throws InsufficientRange for fewer than 8 such
/// checkpoints.
SbcFit sbc_error_fit(std::span<const HitStats> ensemble, double e_min, double e_max,
                     std::size_t min_orbits = 20);

struct ShortReturnEntry {
  std::uint64_t lag;
  std::uint64_t joint_count;  // #{j : x_j in B and x_{j+lag} in B}
  double joint_mass;          // joint_count / probe_len
  double ratio;               // joint_mass / mass^{1+alpha}
};

struct ShortReturnReport {
  double radius = 0.0;
  double mass = 0.0;  // empirical nu(B) over the probe
  std::uint64_t ball_count = 0;
  std::uint64_t probe_len = 0;
  double alpha = 0.0;
  std::vector<ShortReturnEntry> entries;
  /// Lags whose ratio exceeds 1, i.e. where nu(B cap f^{-k}B) <= nu(B)^{1+alpha} fails.
  std::size_t violations = 0;
  std::optional<std::uint64_t> first_violation;
};

/// Short-return statistics of B(target, r) from a precomputed orbit of
/// length >= probe_len + k_max. Throws ZeroMass if the probe never enters B.
ShortReturnReport short_return_stat(std::span<const Point> orbit, const Point& target, double r,
                                    std::uint64_t k_max, std::uint64_t probe_len, double alpha);

/// Same, simulating the orbit on the fly from x0.
ShortReturnReport short_return_stat(const dynamics::MapSystem& map, const Point& target, double r,
                                    std::uint64_t k_max, std::uint64_t probe_len, double alpha,
                                    Point x0, dynamics::OrbitOptions opts = {});

}  // namespace ergomax::targets
