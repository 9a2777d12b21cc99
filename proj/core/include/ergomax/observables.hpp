#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ergomax/error.hpp"
#include "ergomax/point.hpp"

namespace ergomax::obs {

enum class ObservableKind { NegLogDist, PowerDist, CappedPower, SqrtAbsLogDist };

std::string_view to_string(ObservableKind kind);
std::optional<ObservableKind> parse_observable_kind(std::string_view name);

inline constexpr double kDefaultEpsFloor = 1e-300;

/// phi(x) = psi(dist(x, target)), with the distance clamped below at
/// eps_floor so that phi stays finite at the target itself.
class Observable {
 public:
  static Observable neg_log_dist(Point target, double eps_floor = kDefaultEpsFloor);
  static Observable power_dist(Point target, double alpha, double eps_floor = kDefaultEpsFloor);
  static Observable capped_power(Point target, double cap, double alpha,
                                 double eps_floor = kDefaultEpsFloor);
  static Observable sqrt_abs_log_dist(Point target, double eps_floor = kDefaultEpsFloor);

  ObservableKind kind() const { return kind_; }
  const Point& target() const { return target_; }
  double alpha() const { return alpha_; }
  double cap() const { return cap_; }
  double eps_floor() const { return eps_floor_; }

  double distance(const Point& x) const { return ergomax::distance(x, target_); }

  /// psi evaluated at a raw distance (the clamp is applied here).
  double psi(double dist) const {
    const double y = dist < eps_floor_ ? eps_floor_ : dist;
    switch (kind_) {
      case ObservableKind::NegLogDist: return -std::log(y);
      case ObservableKind::PowerDist: return std::pow(y, -alpha_);
      case ObservableKind::CappedPower: return cap_ - std::pow(y, alpha_);
      case ObservableKind::SqrtAbsLogDist: return std::sqrt(std::abs(std::log(y)));
    }
    return 0.0;
  }

  double evaluate(const Point& x) const { return psi(distance(x)); }

  /// Whether psi is non-increasing on the whole half-line, which lets the
  /// running maximum be tracked through the running minimum distance.
  bool monotone_in_distance() const { return kind_ != ObservableKind::SqrtAbsLogDist; }

  /// Inverse of psi: the radius whose ball is the level set {phi >= u}.
  /// Throws OutOfRange when u is below the range of psi.
  double level_radius(double u) const;

 private:
  Observable(ObservableKind kind, Point target, double alpha, double cap, double eps_floor);

  ObservableKind kind_;
  Point target_;
  double alpha_ = 1.0;
  double cap_ = 0.0;
  double eps_floor_ = kDefaultEpsFloor;
};

/// Checkpointed maximum process of one series.
struct MaxSeries {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> values;  // M_{n_k}
  std::vector<std::uint64_t> record_times;

  friend bool operator==(const MaxSeries&, const MaxSeries&) = default;
};

/// Geometric grid ceil(ratio^k), deduplicated, capped at and including n_max.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n_max, double ratio = 1.15);

/// Single-pass builder for M_n over an arbitrary value stream.
class MaxProcessBuilder {
 public:
  explicit MaxProcessBuilder(std::vector<std::uint64_t> checkpoints);

  void push(double value) {
    ++count_;
    if (count_ == 1 || value > current_) {
      current_ = value;
      series_.record_times.push_back(count_);
    }
    if (next_ < series_.checkpoints.size() && series_.checkpoints[next_] == count_) {
      series_.values.push_back(current_);
      ++next_;
    }
  }

  std::uint64_t count() const { return count_; }
  bool complete() const { return next_ == series_.checkpoints.size(); }

  /// Throws StreamTooShort if the last checkpoint was not reached.
  MaxSeries finish() &&;

 private:
  MaxSeries series_;
  std::size_t next_ = 0;
  std::uint64_t count_ = 0;
  double current_ = -std::numeric_limits<double>::infinity();
};

/// M_{n_k} over a finite value sequence. Checkpoints must be strictly
/// increasing; throws StreamTooShort when the values run out first.
MaxSeries max_process(std::span<const double> values, std::span<const std::uint64_t> checkpoints);

/// Generic streaming form: values is any input range of doubles.
template <class Range>
MaxSeries max_process(Range&& values, std::span<const std::uint64_t> checkpoints) {
  MaxProcessBuilder builder({checkpoints.begin(), checkpoints.end()});
  for (auto&& v : values) {
    if (builder.complete()) break;
    builder.push(static_cast<double>(v));
  }
  return std::move(builder).finish();
}

/// Maximum process of phi along an orbit, fed with raw points. For observables
/// that are monotone in distance only the running minimum distance is kept
/// and psi is evaluated on new minima; otherwise every value is evaluated.
/// Counts how often the distance clamp was hit.
class ObservableMaxTracker {
 public:
  ObservableMaxTracker(const Observable& obs, std::vector<std::uint64_t> checkpoints);

  void push(const Point& x) { push_distance(obs_.distance(x)); }

  void push_distance(double d) {
    ++count_;
    if (d < obs_.eps_floor()) ++clamp_hits_;
    if (monotone_) {
      if (count_ == 1 || d < min_dist_) {
        min_dist_ = d;
        const double v = obs_.psi(d);
        if (count_ == 1 || v > current_) {
          current_ = v;
          series_.record_times.push_back(count_);
        }
      }
    } else {
      const double v = obs_.psi(d);
      if (count_ == 1 || v > current_) {
        current_ = v;
        series_.record_times.push_back(count_);
      }
    }
    if (next_ < series_.checkpoints.size() && series_.checkpoints[next_] == count_) {
      series_.values.push_back(current_);
      ++next_;
    }
  }

  bool complete() const { return next_ == series_.checkpoints.size(); }
  std::uint64_t clamp_hits() const { return clamp_hits_; }
  std::uint64_t count() const { return count_; }

  MaxSeries finish() &&;

 private:
  Observable obs_;
  bool monotone_;
  MaxSeries series_;
  std::size_t next_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t clamp_hits_ = 0;
  double min_dist_ = std::numeric_limits<double>::infinity();
  double current_ = -std::numeric_limits<double>::infinity();
};

/// The shared ball {d < e^{-u}/n} and the thresholds that cut it for the
/// three scalings -log d (Type I), d^{-alpha} (Type II) and C - d^alpha
/// (Type III).
struct TypeThresholds {
  double radius;
  double t1;  // -log d > t1
  double t2;  // d^{-alpha} > t2
  double t3;  // C - d^alpha > t3
};

TypeThresholds type_thresholds(double u, std::uint64_t n, double alpha, double cap);

}  // namespace ergomax::obs
