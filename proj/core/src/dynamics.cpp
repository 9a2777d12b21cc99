#include "ergomax/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ergomax::dynamics {

namespace {

constexpr std::array<std::pair<MapId, std::string_view>, 5> kNames{{
    {MapId::Tent, "Tent"},
    {MapId::Doubling, "Doubling"},
    {MapId::Intermittent, "Intermittent"},
    {MapId::Henon, "Henon"},
    {MapId::Lozi, "Lozi"},
}};

ParamMap default_params(MapId id) {
  switch (id) {
    case MapId::Intermittent: return {{"alpha", 0.5}};
    case MapId::Henon: return {{"a", 1.4}, {"b", 0.3}};
    case MapId::Lozi: return {{"a", 1.7}, {"b", 0.5}};
    default: return {};
  }
}

}  // namespace

std::string_view to_string(MapId id) {
  for (const auto& [k, name] : kNames)
    if (k == id) return name;
  return "Unknown";
}

std::optional<MapId> parse_map_id(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  return std::nullopt;
}

MapSystem MapSystem::tent() { return MapSystem(MapId::Tent, {}); }
MapSystem MapSystem::doubling() { return MapSystem(MapId::Doubling, {}); }
MapSystem MapSystem::intermittent(double alpha) {
  return MapSystem(MapId::Intermittent, {{"alpha", alpha}});
}
MapSystem MapSystem::henon(double a, double b) { return MapSystem(MapId::Henon, {{"a", a}, {"b", b}}); }
MapSystem MapSystem::lozi(double a, double b) { return MapSystem(MapId::Lozi, {{"a", a}, {"b", b}}); }

MapSystem MapSystem::make(MapId id, const ParamMap& params) {
  ParamMap merged = default_params(id);
  for (const auto& [key, value] : params) {
    if (!merged.contains(key))
      throw Error(Errc::InvalidParameter,
                  "unknown parameter '" + key + "' for map " + std::string(to_string(id)));
    merged[key] = value;
  }
  return MapSystem(id, std::move(merged));
}

MapSystem::MapSystem(MapId id, ParamMap params) : id_(id), params_(std::move(params)) {
  for (const auto& [key, value] : params_)
    require(std::isfinite(value), Errc::InvalidParameter, "parameter '" + key + "' is not finite");

  KnownFacts facts;
  switch (id_) {
    case MapId::Tent:
    case MapId::Doubling:
      dim_ = 1;
      facts = {MeasureClass::LebesgueAC, {DecayClass::Kind::Exponential, 0.0}, 1.0, true};
      break;
    case MapId::Intermittent: {
      dim_ = 1;
      a_ = params_.at("alpha");
      require(a_ > 0.0 && a_ < 1.0, Errc::InvalidParameter,
              "Intermittent alpha must lie strictly inside (0,1)");
      two_pow_alpha_ = std::pow(2.0, a_);
      // Correlations decay like n^{1 - 1/alpha}.
      facts = {MeasureClass::LebesgueAC, {DecayClass::Kind::Polynomial, 1.0 / a_ - 1.0}, 1.0, false};
      break;
    }
    case MapId::Henon:
    case MapId::Lozi:
      dim_ = 2;
      a_ = params_.at("a");
      b_ = params_.at("b");
      facts = {MeasureClass::SRB, {DecayClass::Kind::Exponential, 0.0}, std::nullopt, false};
      break;
  }
  facts_ = facts;
}

double MapSystem::param(std::string_view name) const {
  auto it = params_.find(name);
  if (it == params_.end())
    throw Error(Errc::InvalidParameter, "map has no parameter '" + std::string(name) + "'");
  return it->second;
}

std::vector<Point> MapSystem::periodic_points(int max_period) const {
  require(max_period >= 1, Errc::InvalidParameter, "max_period must be >= 1");
  std::vector<Point> out;

  if (dim_ == 2) {
    if (id_ == MapId::Henon) {
      // a x^2 + (1-b) x - 1 = 0, y = b x
      const double disc = (1.0 - b_) * (1.0 - b_) + 4.0 * a_;
      if (disc >= 0.0 && a_ != 0.0) {
        for (double sgn : {-1.0, 1.0}) {
          const double x = (-(1.0 - b_) + sgn * std::sqrt(disc)) / (2.0 * a_);
          out.push_back(Point::of(x, b_ * x));
        }
      }
    } else {
      // x = 1 + b x - a|x| on each sign branch
      if (1.0 + a_ - b_ > 0.0) {
        const double x = 1.0 / (1.0 + a_ - b_);
        out.push_back(Point::of(x, x));
      }
      if (1.0 - a_ - b_ < 0.0) {
        const double x = 1.0 / (1.0 - a_ - b_);
        out.push_back(Point::of(x, x));
      }
    }
    std::sort(out.begin(), out.end(), [](const Point& p, const Point& q) { return p[0] < q[0]; });
    return out;
  }

  auto iterate = [this](double x, int p) {
    Point y = Point::of(x);
    for (int i = 0; i < p; ++i) y = step_unchecked(y);
    return y[0];
  };

  // Scan f^p(x) - x for sign changes; f^p has at most 2^p monotone branches,
  // so a grid much finer than 2^-p brackets every crossing. Brackets across a
  // discontinuity bisect to a non-root and are rejected by the residual check.
  std::vector<double> roots;
  constexpr int kGrid = 1 << 17;
  constexpr double kTol = 1e-10;
  for (int p = 1; p <= max_period; ++p) {
    auto g = [&](double x) { return iterate(x, p) - x; };
    double x_prev = 0.0;
    double g_prev = g(0.0);
    if (g_prev == 0.0) roots.push_back(0.0);
    for (int i = 1; i <= kGrid; ++i) {
      const double x = static_cast<double>(i) / kGrid;
      const double gx = g(x);
      if (gx == 0.0) {
        roots.push_back(x);
      } else if (g_prev != 0.0 && (g_prev < 0.0) != (gx < 0.0)) {
        double lo = x_prev, hi = x, glo = g_prev;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const double gm = g(mid);
          if (gm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        const double r = 0.5 * (lo + hi);
        if (std::abs(g(r)) < kTol) roots.push_back(r);
      }
      x_prev = x;
      g_prev = gx;
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots)
    if (unique.empty() || r - unique.back() > 1e-9) unique.push_back(r);

  for (double r : unique) out.push_back(Point::of(r));
  return out;
}

Orbit::Orbit(const MapSystem& map, Point x0, std::uint64_t n, OrbitOptions opts)
    : map_(map), state_(x0), n_(n), opts_(opts) {
  require(x0.dim == map.dim(), Errc::InvalidParameter, "initial point has the wrong dimension");
  require(x0.finite(), Errc::InvalidParameter, "initial point is not finite");
  require(opts.jitter >= 0.0 && std::isfinite(opts.jitter), Errc::InvalidParameter,
          "jitter must be a finite non-negative amplitude");
  for (std::uint64_t i = 0; i < opts_.burn_in; ++i) advance();
}

void Orbit::perturb() {
  const CounterRng rng(opts_.jitter_key);
  if (map_.is_interval_map()) {
    double v = state_[0] + opts_.jitter * (2.0 * CounterRng::to_unit(rng.at(steps_)) - 1.0);
    if (v < 0.0) v = -v;
    if (v > 1.0) v = 2.0 - v;
    state_[0] = std::clamp(v, 0.0, 1.0);
  } else {
    state_[0] += opts_.jitter * (2.0 * CounterRng::to_unit(rng.at(2 * steps_)) - 1.0);
    state_[1] += opts_.jitter * (2.0 * CounterRng::to_unit(rng.at(2 * steps_ + 1)) - 1.0);
  }
}

std::vector<Point> collect_orbit(const MapSystem& map, Point x0, std::uint64_t n,
                                 OrbitOptions opts) {
  std::vector<Point> out;
  out.reserve(n);
  Orbit orbit(map, x0, n, opts);
  while (!orbit.done()) out.push_back(orbit.next());
  return out;
}

Point random_initial_point(const MapSystem& map, std::uint64_t key) {
  const CounterRng rng(key);
  if (map.is_interval_map()) return Point::of(CounterRng::to_unit(rng.at(0)));
  return Point::of(0.1 * (2.0 * CounterRng::to_unit(rng.at(0)) - 1.0),
                   0.1 * (2.0 * CounterRng::to_unit(rng.at(1)) - 1.0));
}

}  // namespace ergomax::dynamics
