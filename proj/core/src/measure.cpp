#include "ergomax/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace ergomax::measure {

EmpiricalMeasure::EmpiricalMeasure(int dim, std::vector<double> flat_coords)
    : dim_(dim), coords_(std::move(flat_coords)) {
  require(dim == 1 || dim == 2, Errc::InvalidParameter, "sample dimension must be 1 or 2");
  require(coords_.size() % static_cast<std::size_t>(dim) == 0, Errc::InvalidParameter,
          "flat coordinate array is not a whole number of points");
  n_ = coords_.size() / static_cast<std::size_t>(dim);
  require(n_ > 0, Errc::InvalidParameter, "empirical measure needs at least one sample");
  for (double v : coords_)
    require(std::isfinite(v), Errc::InvalidParameter, "sample coordinates must be finite");
}

EmpiricalMeasure::EmpiricalMeasure(std::span<const Point> samples)
    : EmpiricalMeasure(samples.empty() ? 1 : samples.front().dim, [&] {
        std::vector<double> flat;
        if (samples.empty()) return flat;
        const auto d = samples.front().dim;
        flat.reserve(samples.size() * d);
        for (const auto& p : samples) {
          require(p.dim == d, Errc::InvalidParameter, "samples have mixed dimensions");
          for (std::size_t i = 0; i < d; ++i) flat.push_back(p[i]);
        }
        return flat;
      }()) {}

EmpiricalMeasure EmpiricalMeasure::from_orbit(const dynamics::MapSystem& map, Point x0,
                                              std::uint64_t n, dynamics::OrbitOptions opts) {
  std::vector<double> flat;
  flat.reserve(n * static_cast<std::uint64_t>(map.dim()));
  dynamics::Orbit orbit(map, x0, n, opts);
  while (!orbit.done()) {
    const auto& p = orbit.next();
    for (int i = 0; i < map.dim(); ++i) flat.push_back(p[static_cast<std::size_t>(i)]);
  }
  return EmpiricalMeasure(map.dim(), std::move(flat));
}

Point EmpiricalMeasure::sample(std::size_t i) const {
  if (dim_ == 1) return Point::of(coords_[i]);
  return Point::of(coords_[2 * i], coords_[2 * i + 1]);
}

double EmpiricalMeasure::dist(std::size_t i, const Point& c) const {
  if (dim_ == 1) return std::abs(coords_[i] - c[0]);
  return std::hypot(coords_[2 * i] - c[0], coords_[2 * i + 1] - c[1]);
}

void EmpiricalMeasure::cache(const Point& center) {
  if (cached(center)) return;
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = dist(i, center);
  std::sort(d.begin(), d.end());
  caches_.emplace_back(center, std::move(d));
}

const std::vector<double>* EmpiricalMeasure::find_cache(const Point& center) const {
  for (const auto& [c, d] : caches_)
    if (c == center) return &d;
  return nullptr;
}

bool EmpiricalMeasure::cached(const Point& center) const { return find_cache(center) != nullptr; }

std::uint64_t EmpiricalMeasure::ball_count(const Point& center, double r) const {
  require(r >= 0.0, Errc::InvalidParameter, "ball radius must be non-negative");
  if (const auto* d = find_cache(center))
    return static_cast<std::uint64_t>(std::upper_bound(d->begin(), d->end(), r) - d->begin());
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < n_; ++i)
    if (dist(i, center) <= r) ++count;
  return count;
}

std::uint64_t EmpiricalMeasure::annulus_count(const Point& center, double r, double eps) const {
  require(eps >= 0.0, Errc::InvalidParameter, "annulus width must be non-negative");
  if (const auto* d = find_cache(center)) {
    const auto lo = std::upper_bound(d->begin(), d->end(), r);
    const auto hi = std::upper_bound(lo, d->end(), r + eps);
    return static_cast<std::uint64_t>(hi - lo);
  }
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double v = dist(i, center);
    if (v > r && v <= r + eps) ++count;
  }
  return count;
}

namespace {

void check_decreasing(std::span<const double> grid, const char* what) {
  require(!grid.empty(), Errc::InvalidParameter, std::string(what) + " is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0.0 && std::isfinite(grid[i]), Errc::InvalidParameter,
            std::string(what) + " values must be positive and finite");
    if (i > 0)
      require(grid[i] < grid[i - 1], Errc::InvalidParameter,
              std::string(what) + " must be strictly decreasing");
  }
}

void check_sample_size(const EmpiricalMeasure& m, std::size_t min_samples) {
  require(m.size() >= min_samples, Errc::InsufficientMass,
          "fit needs at least " + std::to_string(min_samples) + " samples, have " +
              std::to_string(m.size()));
}

LinearFit log_fit(const std::vector<ScalingPoint>& pts) {
  std::vector<double> x, y;
  for (const auto& p : pts) {
    x.push_back(std::log(p.r));
    y.push_back(std::log(p.mass));
  }
  return fit_line(x, y);
}

}  // namespace

std::vector<double> log_grid(double r_max, double r_min, std::size_t count) {
  require(r_max > r_min && r_min > 0.0, Errc::InvalidParameter, "log grid needs r_max > r_min > 0");
  require(count >= 2, Errc::InvalidParameter, "log grid needs at least two points");
  std::vector<double> g(count);
  const double a = std::log(r_max), b = std::log(r_min);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  g.front() = r_max;
  g.back() = r_min;
  return g;
}

DimensionFit local_dimension(const EmpiricalMeasure& m, const Point& center,
                             std::span<const double> r_grid, std::size_t min_samples) {
  check_sample_size(m, min_samples);
  check_decreasing(r_grid, "radius grid");
  require(r_grid.front() / r_grid.back() >= 100.0, Errc::InsufficientRange,
          "radius grid must span at least two decades");

  DimensionFit out;
  const double n = static_cast<double>(m.size());
  for (double r : r_grid) {
    const auto c = m.ball_count(center, r);
    if (c < kBallCountFloor) continue;
    out.points.push_back({r, c, static_cast<double>(c) / n});
  }
  if (out.points.size() < kMinFitPoints)
    throw Error(Errc::InsufficientMass, "only " + std::to_string(out.points.size()) +
                                            " radii keep at least " +
                                            std::to_string(kBallCountFloor) + " samples");
  const auto f = log_fit(out.points);
  out.d_hat = f.slope;
  out.d_stderr = f.slope_stderr;
  out.intercept = f.intercept;
  out.r2 = f.r2;
  return out;
}

AnnulusFit annulus_regularity(const EmpiricalMeasure& m, const Point& center, double r,
                              std::span<const double> eps_grid, std::size_t min_samples) {
  check_sample_size(m, min_samples);
  check_decreasing(eps_grid, "annulus width grid");
  require(r > 0.0, Errc::InvalidParameter, "annulus radius must be positive");
  require(eps_grid.front() < r, Errc::InvalidParameter, "annulus widths must stay below r");

  AnnulusFit out;
  const double n = static_cast<double>(m.size());
  for (double eps : eps_grid) {
    const auto c = m.annulus_count(center, r, eps);
    if (c < kAnnulusCountFloor) continue;
    out.points.push_back({eps, c, static_cast<double>(c) / n});
  }
  if (out.points.size() < kMinFitPoints)
    throw Error(Errc::InsufficientMass, "only " + std::to_string(out.points.size()) +
                                            " annuli keep at least " +
                                            std::to_string(kAnnulusCountFloor) + " samples");
  const auto f = log_fit(out.points);
  out.delta_hat = f.slope;
  out.delta_stderr = f.slope_stderr;
  out.c_hat = std::exp(f.intercept);
  out.r2 = f.r2;
  return out;
}

CorrelationAccumulator::CorrelationAccumulator(TestFunction g1, TestFunction g2,
                                               std::vector<std::uint64_t> lags)
    : g1_(g1), g2_(g2), lags_(std::move(lags)) {
  require(!lags_.empty(), Errc::InvalidParameter, "lag list is empty");
  for (std::size_t i = 0; i < lags_.size(); ++i) {
    require(lags_[i] >= 1, Errc::InvalidParameter, "lags start at 1");
    if (i > 0)
      require(lags_[i] > lags_[i - 1], Errc::InvalidParameter, "lags must be strictly increasing");
  }
  pair_.resize(lags_.size());
  const auto size = std::bit_ceil(lags_.back() + 1);
  ring_.assign(size, 0.0);
  mask_ = size - 1;
}

void CorrelationAccumulator::merge(const CorrelationAccumulator& other) {
  require(other.lags_ == lags_, Errc::InvalidParameter, "cannot merge different lag sets");
  for (std::size_t i = 0; i < pair_.size(); ++i) {
    pair_[i].s1 += other.pair_[i].s1;
    pair_[i].s2 += other.pair_[i].s2;
    pair_[i].prod += other.pair_[i].prod;
    pair_[i].n += other.pair_[i].n;
  }
  count_ += other.count_;
  sum1_ += other.sum1_;
  sum2_ += other.sum2_;
  sq1_ += other.sq1_;
  sq2_ += other.sq2_;
}

double CorrelationAccumulator::sd1() const {
  if (count_ == 0) return 0.0;
  const double n = static_cast<double>(count_);
  const double mean = sum1_ / n;
  return std::sqrt(std::max(0.0, sq1_ / n - mean * mean));
}

double CorrelationAccumulator::sd2() const {
  if (count_ == 0) return 0.0;
  const double n = static_cast<double>(count_);
  const double mean = sum2_ / n;
  return std::sqrt(std::max(0.0, sq2_ / n - mean * mean));
}

double CorrelationAccumulator::correlation(std::size_t i) const {
  const auto& p = pair_.at(i);
  if (p.n == 0) return 0.0;
  const double n = static_cast<double>(p.n);
  return std::abs(p.prod / n - (p.s1 / n) * (p.s2 / n));
}

DecayReport classify_decay(const CorrelationAccumulator& acc, DecayOptions opts) {
  DecayReport rep;
  rep.n_samples = acc.count();
  rep.noise_floor = acc.count() == 0 ? 0.0
                                     : opts.floor_multiplier * acc.sd1() * acc.sd2() /
                                           std::sqrt(static_cast<double>(acc.count()));
  bool inside = true;
  std::vector<double> j, logj, logc;
  for (std::size_t i = 0; i < acc.lags().size(); ++i) {
    const double c = acc.correlation(i);
    const bool above = c > rep.noise_floor && c > 0.0;
    inside = inside && above;
    rep.entries.push_back({acc.lags()[i], c, above});
    if (!inside) continue;
    const double lag = static_cast<double>(acc.lags()[i]);
    j.push_back(lag);
    logj.push_back(std::log(lag));
    logc.push_back(std::log(c));
  }
  rep.used = j.size();
  if (rep.used < std::max<std::size_t>(opts.min_fit_lags, 3)) return rep;

  rep.exp_fit = fit_line(j, logc);
  rep.poly_fit = fit_line(logj, logc);
  const bool exp_better = rep.exp_fit.r2 >= rep.poly_fit.r2;
  if (exp_better && rep.exp_fit.slope < 0.0) {
    rep.decay = {dynamics::DecayClass::Kind::Exponential, 0.0};
    rep.exponent = rep.exp_fit.slope;
  } else if (!exp_better && rep.poly_fit.slope < 0.0) {
    rep.decay = {dynamics::DecayClass::Kind::Polynomial, -rep.poly_fit.slope};
    rep.exponent = rep.poly_fit.slope;
  }
  return rep;
}

DecayReport correlation_decay(const dynamics::MapSystem& map, Point x0, std::uint64_t n,
                              const TestFunction& g1, const TestFunction& g2,
                              std::vector<std::uint64_t> lags, dynamics::OrbitOptions orbit,
                              DecayOptions opts) {
  require(!lags.empty() && n > lags.back(), Errc::StreamTooShort,
          "orbit must be longer than the largest lag");
  CorrelationAccumulator acc(g1, g2, std::move(lags));
  dynamics::Orbit o(map, x0, n, orbit);
  while (!o.done()) acc.push(o.next());
  return classify_decay(acc, opts);
}

std::vector<std::uint64_t> lag_grid(std::uint64_t dense, std::uint64_t max_lag, double ratio) {
  require(max_lag >= 1, Errc::InvalidParameter, "max_lag must be >= 1");
  require(ratio > 1.0, Errc::InvalidParameter, "lag ratio must exceed 1");
  std::vector<std::uint64_t> out;
  for (std::uint64_t j = 1; j <= std::min(std::max<std::uint64_t>(dense, 1), max_lag); ++j) out.push_back(j);
  double v = static_cast<double>(out.back());
  while (true) {
    v *= ratio;
    const auto k = static_cast<std::uint64_t>(std::ceil(v));
    if (k > max_lag) break;
    if (out.empty() || k > out.back()) out.push_back(k);
  }
  if (out.back() != max_lag) out.push_back(max_lag);
  return out;
}

}  // namespace ergomax::measure
