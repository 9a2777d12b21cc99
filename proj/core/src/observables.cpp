#include "ergomax/observables.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace ergomax::obs {

namespace {

constexpr std::array<std::pair<ObservableKind, std::string_view>, 4> kNames{{
    {ObservableKind::NegLogDist, "NegLogDist"},
    {ObservableKind::PowerDist, "PowerDist"},
    {ObservableKind::CappedPower, "CappedPower"},
    {ObservableKind::SqrtAbsLogDist, "SqrtAbsLogDist"},
}};

void check_checkpoints(const std::vector<std::uint64_t>& cps) {
  require(!cps.empty(), Errc::InvalidParameter, "checkpoint list is empty");
  require(cps.front() >= 1, Errc::InvalidParameter, "checkpoints start at n = 1");
  for (std::size_t i = 1; i < cps.size(); ++i)
    require(cps[i] > cps[i - 1], Errc::InvalidParameter, "checkpoints must be strictly increasing");
}

void check_finished(const MaxSeries& s, std::uint64_t count) {
  if (s.values.size() != s.checkpoints.size())
    throw Error(Errc::StreamTooShort, "stream ended after " + std::to_string(count) +
                                          " values, before checkpoint " +
                                          std::to_string(s.checkpoints.back()));
}

}  // namespace

std::string_view to_string(ObservableKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "Unknown";
}

std::optional<ObservableKind> parse_observable_kind(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  return std::nullopt;
}

Observable::Observable(ObservableKind kind, Point target, double alpha, double cap,
                       double eps_floor)
    : kind_(kind), target_(target), alpha_(alpha), cap_(cap), eps_floor_(eps_floor) {
  require(target.finite(), Errc::InvalidParameter, "observable target is not finite");
  require(eps_floor > 0.0, Errc::InvalidParameter, "eps_floor must be positive");
  require(alpha > 0.0 && std::isfinite(alpha), Errc::InvalidParameter, "alpha must be positive");
  require(std::isfinite(cap), Errc::InvalidParameter, "cap must be finite");
}

Observable Observable::neg_log_dist(Point target, double eps_floor) {
  return {ObservableKind::NegLogDist, target, 1.0, 0.0, eps_floor};
}
Observable Observable::power_dist(Point target, double alpha, double eps_floor) {
  return {ObservableKind::PowerDist, target, alpha, 0.0, eps_floor};
}
Observable Observable::capped_power(Point target, double cap, double alpha, double eps_floor) {
  return {ObservableKind::CappedPower, target, alpha, cap, eps_floor};
}
Observable Observable::sqrt_abs_log_dist(Point target, double eps_floor) {
  return {ObservableKind::SqrtAbsLogDist, target, 1.0, 0.0, eps_floor};
}

double Observable::level_radius(double u) const {
  switch (kind_) {
    case ObservableKind::NegLogDist:
      return std::exp(-u);
    case ObservableKind::PowerDist:
      if (!(u > 0.0)) throw Error(Errc::OutOfRange, "PowerDist takes only positive values");
      return std::pow(u, -1.0 / alpha_);
    case ObservableKind::CappedPower:
      if (u > cap_) throw Error(Errc::OutOfRange, "level above the cap C");
      return std::pow(cap_ - u, 1.0 / alpha_);
    case ObservableKind::SqrtAbsLogDist:
      if (u < 0.0) throw Error(Errc::OutOfRange, "SqrtAbsLogDist takes only non-negative values");
      return std::exp(-u * u);
  }
  return 0.0;
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n_max, double ratio) {
  require(n_max >= 1, Errc::InvalidParameter, "n_max must be >= 1");
  require(ratio > 1.0, Errc::InvalidParameter, "checkpoint ratio must exceed 1");
  std::vector<std::uint64_t> out;
  for (int k = 0;; ++k) {
    const double v = std::ceil(std::pow(ratio, k));
    if (v >= static_cast<double>(n_max)) break;
    const auto n = static_cast<std::uint64_t>(v);
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  out.push_back(n_max);
  return out;
}

MaxProcessBuilder::MaxProcessBuilder(std::vector<std::uint64_t> checkpoints) {
  check_checkpoints(checkpoints);
  series_.checkpoints = std::move(checkpoints);
  series_.values.reserve(series_.checkpoints.size());
}

MaxSeries MaxProcessBuilder::finish() && {
  check_finished(series_, count_);
  return std::move(series_);
}

MaxSeries max_process(std::span<const double> values, std::span<const std::uint64_t> checkpoints) {
  MaxProcessBuilder builder({checkpoints.begin(), checkpoints.end()});
  for (double v : values) {
    if (builder.complete()) break;
    builder.push(v);
  }
  return std::move(builder).finish();
}

ObservableMaxTracker::ObservableMaxTracker(const Observable& obs,
                                           std::vector<std::uint64_t> checkpoints)
    : obs_(obs), monotone_(obs.monotone_in_distance()) {
  check_checkpoints(checkpoints);
  series_.checkpoints = std::move(checkpoints);
  series_.values.reserve(series_.checkpoints.size());
}

MaxSeries ObservableMaxTracker::finish() && {
  check_finished(series_, count_);
  return std::move(series_);
}

TypeThresholds type_thresholds(double u, std::uint64_t n, double alpha, double cap) {
  require(n >= 1, Errc::InvalidParameter, "n must be >= 1");
  require(alpha > 0.0, Errc::InvalidParameter, "alpha must be positive");
  const double nd = static_cast<double>(n);
  const double radius = std::exp(-u) / nd;
  TypeThresholds t{};
  t.radius = radius;
  t.t1 = u + std::log(nd);
  t.t2 = std::pow(nd, alpha) * std::exp(alpha * u);
  t.t3 = cap - std::pow(nd, -alpha) * std::exp(-alpha * u);
  return t;
}

}  // namespace ergomax::obs
