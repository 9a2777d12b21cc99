#include "ergomax/targets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergomax/fit.hpp"

namespace ergomax::targets {

void RateParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"d_nu", d_nu}, {"zeta", zeta}, {"theta0", theta0}, {"delta", delta},
      {"beta", beta}, {"beta_prime", beta_prime}, {"alpha", alpha}, {"gamma", gamma},
      {"sigma", sigma}, {"eta", eta}};
  for (const auto& [name, v] : fields)
    require(std::isfinite(v) && v >= 0.0, Errc::InvalidParameter,
            std::string("rate parameter ") + name + " must be finite and non-negative");
}

std::string_view to_string(MeasureModelKind kind) {
  return kind == MeasureModelKind::AnalyticLebesgue1D ? "AnalyticLebesgue1D" : "EmpiricalQuantile";
}

MeasureModel::MeasureModel(MeasureModelKind kind, Point target, std::vector<double> calibration)
    : kind_(kind), target_(target), calibration_(std::move(calibration)) {}

MeasureModel MeasureModel::analytic_lebesgue_1d(const dynamics::MapSystem& map, Point target) {
  const auto& facts = map.facts();
  require(map.dim() == 1 && facts && facts->lebesgue_invariant, Errc::InvalidParameter,
          "analytic Lebesgue model needs an interval map preserving Lebesgue measure, got " +
              std::string(dynamics::to_string(map.id())));
  return analytic_lebesgue_1d(target);
}

MeasureModel MeasureModel::analytic_lebesgue_1d(Point target) {
  require(target.dim == 1 && target[0] >= 0.0 && target[0] <= 1.0, Errc::InvalidParameter,
          "analytic Lebesgue model needs a target in [0,1]");
  return MeasureModel(MeasureModelKind::AnalyticLebesgue1D, target, {});
}

MeasureModel MeasureModel::empirical_quantile(Point target, std::vector<double> distances,
                                              std::size_t min_size) {
  require(distances.size() >= min_size, Errc::InvalidParameter,
          "calibration sample too small: " + std::to_string(distances.size()) + " < " +
              std::to_string(min_size));
  require(!distances.empty(), Errc::InvalidParameter, "calibration sample is empty");
  std::sort(distances.begin(), distances.end());
  return MeasureModel(MeasureModelKind::EmpiricalQuantile, target, std::move(distances));
}

MeasureModel MeasureModel::calibrate(const dynamics::MapSystem& map, Point target, Point x0,
                                     std::uint64_t n_cal, dynamics::OrbitOptions opts) {
  std::vector<double> dists;
  dists.reserve(n_cal);
  dynamics::Orbit orbit(map, x0, n_cal, opts);
  while (!orbit.done()) dists.push_back(distance(orbit.next(), target));
  return empirical_quantile(target, std::move(dists));
}

RadiusResult MeasureModel::radius_for_measure(double s) const {
  require(s > 0.0 && s <= 1.0, Errc::InvalidParameter, "ball mass must lie in (0,1]");
  if (kind_ == MeasureModelKind::AnalyticLebesgue1D) {
    const double near = std::min(target_[0], 1.0 - target_[0]);
    const double far = std::max(target_[0], 1.0 - target_[0]);
    if (0.5 * s <= near) return {0.5 * s, false};
    // one side is cut by the boundary: mass = near + r until r reaches far
    return {std::min(s - near, far), true};
  }
  const auto n = calibration_.size();
  auto idx = static_cast<std::size_t>(std::ceil(s * static_cast<double>(n)));
  idx = std::clamp<std::size_t>(idx, 1, n) - 1;
  return {calibration_[idx], false};
}

double MeasureModel::mass(double r) const {
  if (r < 0.0) return 0.0;
  if (kind_ == MeasureModelKind::AnalyticLebesgue1D) {
    const double near = std::min(target_[0], 1.0 - target_[0]);
    const double far = std::max(target_[0], 1.0 - target_[0]);
    return std::min(1.0, std::min(r, near) + std::min(r, far));
  }
  const auto it = std::upper_bound(calibration_.begin(), calibration_.end(), r);
  return static_cast<double>(it - calibration_.begin()) / static_cast<double>(calibration_.size());
}

namespace {

double log_power_value(double beta, std::uint64_t k) {
  const double kd = static_cast<double>(k);
  return std::pow(std::log(kd), beta) / kd;
}

std::uint64_t log_power_peak(double beta) {
  // (log k)^beta / k is maximal at k = e^beta
  auto k = static_cast<std::uint64_t>(std::max(2.0, std::floor(std::exp(beta))));
  if (log_power_value(beta, k + 1) > log_power_value(beta, k)) ++k;
  return k;
}

}  // namespace

double rule_mass(const ScheduleRule& rule, std::uint64_t k) {
  require(k >= 1, Errc::InvalidParameter, "schedule index starts at 1");
  if (const auto* p = std::get_if<PowerLawRule>(&rule)) {
    return std::pow(static_cast<double>(k), -p->beta);
  }
  if (const auto* l = std::get_if<LogPowerRule>(&rule)) {
    if (k == 1) return 1.0;
    const auto kk = std::max(k, log_power_peak(l->beta));
    return std::min(1.0, log_power_value(l->beta, kk));
  }
  throw Error(Errc::InvalidParameter, "explicit radii have no closed-form mass");
}

TargetSchedule::TargetSchedule(ScheduleRule rule, MeasureModel measure, std::uint64_t n_max)
    : rule_(std::move(rule)), measure_(std::move(measure)), n_max_(n_max) {
  require(n_max >= 1, Errc::InvalidParameter, "schedule length must be >= 1");
  if (const auto* p = std::get_if<PowerLawRule>(&rule_))
    require(p->beta > 0.0 && p->beta < 1.0, Errc::InvalidParameter, "PowerLaw beta must lie in (0,1)");
  if (const auto* l = std::get_if<LogPowerRule>(&rule_))
    require(l->beta > 0.0, Errc::InvalidParameter, "LogPower beta must be positive");

  radii_.resize(n_max);
  masses_.resize(n_max);
  expected_.resize(n_max);

  const auto* explicit_rule = std::get_if<ExplicitRadiiRule>(&rule_);
  if (explicit_rule)
    require(explicit_rule->radii.size() >= n_max, Errc::InvalidParameter,
            "explicit schedule shorter than n_max");

  const bool analytic = measure_.kind() == MeasureModelKind::AnalyticLebesgue1D;
  const double near = analytic ? std::min(target()[0], 1.0 - target()[0]) : 0.0;

  double sum = 0.0;
  for (std::uint64_t k = 1; k <= n_max; ++k) {
    double r = 0.0;
    double s = 0.0;
    bool truncated = false;
    if (explicit_rule) {
      r = explicit_rule->radii[k - 1];
      require(r >= 0.0, Errc::InvalidParameter, "explicit radii must be non-negative");
      require(k == 1 || r <= radii_[k - 2], Errc::InvalidParameter,
              "explicit radii must be nonincreasing");
      s = measure_.mass(r);
      truncated = analytic && r > near;
    } else {
      s = rule_mass(rule_, k);
      const auto res = measure_.radius_for_measure(s);
      r = res.radius;
      truncated = res.truncated;
    }
    radii_[k - 1] = r;
    masses_[k - 1] = s;
    sum += s;
    expected_[k - 1] = sum;
    if (truncated) ++truncated_;
  }
}

HitCounter::HitCounter(const TargetSchedule& schedule, std::vector<std::uint64_t> checkpoints,
                       bool keep_hit_times)
    : schedule_(&schedule), keep_(keep_hit_times) {
  require(!checkpoints.empty(), Errc::InvalidParameter, "checkpoint list is empty");
  require(checkpoints.front() >= 1, Errc::InvalidParameter, "checkpoints start at n = 1");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    require(checkpoints[i] > checkpoints[i - 1], Errc::InvalidParameter,
            "checkpoints must be strictly increasing");
  require(checkpoints.back() <= schedule.n_max(), Errc::InvalidParameter,
          "checkpoints run past the schedule length");
  stats_.checkpoints = std::move(checkpoints);
}

HitStats HitCounter::finish() && {
  if (stats_.hits.size() != stats_.checkpoints.size())
    throw Error(Errc::StreamTooShort, "orbit ended after " + std::to_string(count_) +
                                          " points, before checkpoint " +
                                          std::to_string(stats_.checkpoints.back()));
  return std::move(stats_);
}

SbcFit sbc_error_fit(std::span<const HitStats> ensemble, double e_min, double e_max,
                     std::size_t min_orbits) {
  require(ensemble.size() >= min_orbits, Errc::InvalidParameter,
          "SBC fit needs at least " + std::to_string(min_orbits) + " orbits");
  require(e_min > 0.0 && e_max / e_min >= 100.0, Errc::InvalidParameter,
          "SBC fit range must span at least two decades of E");

  const auto& ref = ensemble.front();
  for (const auto& h : ensemble)
    require(h.checkpoints == ref.checkpoints && h.hits.size() == ref.checkpoints.size(),
            Errc::InvalidParameter, "ensemble members must share one checkpoint grid");

  std::vector<double> log_e;
  std::vector<double> log_dev;
  for (std::size_t c = 0; c < ref.checkpoints.size(); ++c) {
    const double e = ref.expected[c];
    if (e < e_min || e > e_max) continue;
    double mean = 0.0;
    for (const auto& h : ensemble) {
      const double dev = std::abs(static_cast<double>(h.hits[c]) - h.expected[c]);
      mean += std::max(dev, kDeviationFloor);
    }
    mean /= static_cast<double>(ensemble.size());
    log_e.push_back(std::log(e));
    log_dev.push_back(std::log(mean));
  }
  if (log_e.size() < 8)
    throw Error(Errc::InsufficientRange, "only " + std::to_string(log_e.size()) +
                                             " checkpoints fall inside the fit range");

  const auto f = fit_line(log_e, log_dev);
  return {f.slope, f.intercept, f.r2, f.slope_stderr, f.n};
}

namespace {

template <class NextPoint>
ShortReturnReport short_return_impl(NextPoint&& next, const Point& target, double r,
                                    std::uint64_t k_max, std::uint64_t probe_len, double alpha) {
  require(r > 0.0, Errc::InvalidParameter, "radius must be positive");
  require(k_max >= 1 && probe_len >= 1, Errc::InvalidParameter, "k_max and probe_len must be >= 1");
  require(alpha > 0.0, Errc::InvalidParameter, "alpha must be positive");

  ShortReturnReport rep;
  rep.radius = r;
  rep.probe_len = probe_len;
  rep.alpha = alpha;

  std::vector<std::uint64_t> joint(k_max + 1, 0);
  // recent in-ball times within the probe, newest last
  std::vector<std::uint64_t> recent;
  const std::uint64_t total = probe_len + k_max;
  for (std::uint64_t t = 1; t <= total; ++t) {
    const bool in = distance(next(), target) <= r;
    if (!in) continue;
    while (!recent.empty() && t - recent.front() > k_max) recent.erase(recent.begin());
    for (std::uint64_t j : recent) joint[t - j] += 1;
    if (t <= probe_len) {
      ++rep.ball_count;
      recent.push_back(t);
    }
  }
  if (rep.ball_count == 0)
    throw Error(Errc::ZeroMass, "the probe orbit never entered the ball");

  const double pl = static_cast<double>(probe_len);
  rep.mass = static_cast<double>(rep.ball_count) / pl;
  const double denom = std::pow(rep.mass, 1.0 + alpha);
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    const double jm = static_cast<double>(joint[k]) / pl;
    const double ratio = jm / denom;
    rep.entries.push_back({k, joint[k], jm, ratio});
    if (ratio > 1.0) {
      ++rep.violations;
      if (!rep.first_violation) rep.first_violation = k;
    }
  }
  return rep;
}

}  // namespace

ShortReturnReport short_return_stat(std::span<const Point> orbit, const Point& target, double r,
                                    std::uint64_t k_max, std::uint64_t probe_len, double alpha) {
  require(orbit.size() >= probe_len + k_max, Errc::StreamTooShort,
          "orbit shorter than probe_len + k_max");
  std::size_t i = 0;
  return short_return_impl([&]() -> const Point& { return orbit[i++]; }, target, r, k_max,
                           probe_len, alpha);
}

ShortReturnReport short_return_stat(const dynamics::MapSystem& map, const Point& target, double r,
                                    std::uint64_t k_max, std::uint64_t probe_len, double alpha,
                                    Point x0, dynamics::OrbitOptions opts) {
  dynamics::Orbit orbit(map, x0, probe_len + k_max, opts);
  return short_return_impl([&]() -> const Point& { return orbit.next(); }, target, r, k_max,
                           probe_len, alpha);
}

}  // namespace ergomax::targets
