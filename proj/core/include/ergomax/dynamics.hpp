#pragma once

#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ergomax/error.hpp"
#include "ergomax/point.hpp"
#include "ergomax/rng.hpp"

namespace ergomax::dynamics {

enum class MapId { Tent, Doubling, Intermittent, Henon, Lozi };

std::string_view to_string(MapId id);
std::optional<MapId> parse_map_id(std::string_view name);

enum class MeasureClass { LebesgueAC, SRB, Unknown };

struct DecayClass {
  enum class Kind { Exponential, Polynomial, Unknown };
  Kind kind = Kind::Unknown;
  double zeta = 0.0;  // only meaningful for Polynomial

  friend bool operator==(const DecayClass&, const DecayClass&) = default;
};

/// What is known analytically about a system, used to pick calibration
/// routes and reference constants.
struct KnownFacts {
  MeasureClass measure_class = MeasureClass::Unknown;
  DecayClass decay;
  std::optional<double> d_nu;
  /// Lebesgue measure itself is invariant, so m(B(x,r)) = 2r in the interior.
  bool lebesgue_invariant = false;
};

using ParamMap = std::map<std::string, double, std::less<>>;

/// A named discrete-time system f. Immutable after construction.
class MapSystem {
 public:
  static MapSystem tent();
  static MapSystem doubling();
  static MapSystem intermittent(double alpha);
  static MapSystem henon(double a = 1.4, double b = 0.3);
  static MapSystem lozi(double a = 1.7, double b = 0.5);

  /// Build from an id and named parameters; missing parameters take the
  /// defaults above. Throws InvalidParameter on unknown keys or bad values.
  static MapSystem make(MapId id, const ParamMap& params = {});

  MapId id() const { return id_; }
  int dim() const { return dim_; }
  bool is_interval_map() const { return dim_ == 1; }
  const ParamMap& params() const { return params_; }
  double param(std::string_view name) const;
  const std::optional<KnownFacts>& facts() const { return facts_; }

  /// One application of the map without the finiteness check.
  Point step_unchecked(const Point& x) const {
    switch (id_) {
      case MapId::Tent:
        return Point::of(clamp_unit(1.0 - std::abs(1.0 - 2.0 * x[0])));
      case MapId::Doubling:
        return Point::of(clamp_unit(x[0] < 0.5 ? 2.0 * x[0] : 2.0 * x[0] - 1.0));
      case MapId::Intermittent: {
        const double v = x[0];
        if (v < 0.5) return Point::of(clamp_unit(v * (1.0 + two_pow_alpha_ * std::pow(v, a_))));
        return Point::of(clamp_unit(2.0 * v - 1.0));
      }
      case MapId::Henon:
        return Point::of(1.0 - a_ * x[0] * x[0] + x[1], b_ * x[0]);
      case MapId::Lozi:
        return Point::of(1.0 + b_ * x[1] - a_ * std::abs(x[0]), x[0]);
    }
    return x;
  }

  /// f(x). Throws NonFiniteState if the image is not finite.
  Point step(const Point& x) const {
    Point y = step_unchecked(x);
    if (!y.finite()) throw Error(Errc::NonFiniteState, "map image is not finite");
    return y;
  }

  /// Interval maps: points with minimal period p <= max_period, sorted.
  /// Two-dimensional maps: fixed points only (max_period is ignored beyond 1).
  std::vector<Point> periodic_points(int max_period) const;

 private:
  MapSystem(MapId id, ParamMap params);

  static double clamp_unit(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

  MapId id_;
  int dim_;
  ParamMap params_;
  std::optional<KnownFacts> facts_;
  double a_ = 0.0;  // Intermittent: alpha; Henon/Lozi: a
  double b_ = 0.0;
  double two_pow_alpha_ = 0.0;
};

/// Knobs for a single orbit.
struct OrbitOptions {
  std::uint64_t burn_in = 1000;
  /// Amplitude of a uniform per-step perturbation; zero disables it. Interval
  /// maps reflect the perturbed state back into [0,1].
  double jitter = 0.0;
  std::uint64_t jitter_key = 0;
};

/// Lazy orbit f^{burn_in+1}(x0), ..., f^{burn_in+n}(x0). Single consumer,
/// O(1) state. Usable as an input range; not copyable while iterating.
class Orbit {
 public:
  Orbit(const MapSystem& map, Point x0, std::uint64_t n, OrbitOptions opts = {});

  /// Number of points yielded so far.
  std::uint64_t position() const { return pos_; }
  std::uint64_t length() const { return n_; }
  bool done() const { return pos_ >= n_; }

  /// Advance and return the next orbit point. Precondition: !done().
  const Point& next() {
    advance();
    ++pos_;
    return state_;
  }

  class iterator;
  struct sentinel {};
  iterator begin();
  sentinel end() const { return {}; }

 private:
  void advance() {
    state_ = map_.step_unchecked(state_);
    if (opts_.jitter > 0.0) perturb();
    ++steps_;
    if (!state_.finite())
      throw Error(Errc::NonFiniteState, "orbit left the finite range", steps_);
  }
  void perturb();

  MapSystem map_;
  Point state_;
  std::uint64_t n_;
  std::uint64_t pos_ = 0;
  std::uint64_t steps_ = 0;  // map applications including burn-in
  OrbitOptions opts_;
};

class Orbit::iterator {
 public:
  using value_type = Point;
  using difference_type = std::ptrdiff_t;
  using iterator_category = std::input_iterator_tag;

  iterator() = default;
  explicit iterator(Orbit* orbit) : orbit_(orbit), at_end_(false) { ++*this; }

  const Point& operator*() const { return current_; }
  const Point* operator->() const { return &current_; }
  iterator& operator++() {
    if (orbit_->done())
      at_end_ = true;
    else
      current_ = orbit_->next();
    return *this;
  }
  void operator++(int) { ++*this; }

  friend bool operator==(const iterator& it, sentinel) { return it.at_end_; }

 private:
  Orbit* orbit_ = nullptr;
  Point current_{};
  bool at_end_ = true;
};

inline Orbit::iterator Orbit::begin() { return iterator(this); }

/// Convenience: materialize an orbit.
std::vector<Point> collect_orbit(const MapSystem& map, Point x0, std::uint64_t n,
                                 OrbitOptions opts = {});

/// Default initial condition for an orbit with the given key: full-mantissa
/// uniform in [0,1] for interval maps, a small random square near the origin
/// for the planar maps.
Point random_initial_point(const MapSystem& map, std::uint64_t key);

}  // namespace ergomax::dynamics
