#include "ergomax/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "ergomax/rng.hpp"

namespace ergomax::asymptotics {

namespace {

constexpr std::array<std::pair<SequenceSpec::Form, std::string_view>, 5> kFormNames{{
    {SequenceSpec::Form::LogPlusLogLog, "LogPlusLogLog"},
    {SequenceSpec::Form::LogMinusLogLog, "LogMinusLogLog"},
    {SequenceSpec::Form::PurePower, "PurePower"},
    {SequenceSpec::Form::PlainLog, "PlainLog"},
    {SequenceSpec::Form::Explicit, "Explicit"},
}};

constexpr std::array<std::pair<TailModel::Kind, std::string_view>, 3> kTailNames{{
    {TailModel::Kind::Exponential, "Exponential"},
    {TailModel::Kind::Pareto, "Pareto"},
    {TailModel::Kind::Gaussian, "Gaussian"},
}};

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// max/min of a positive trajectory; infinite when it touches zero
double range_ratio(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (!(*lo > 0.0)) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

}  // namespace

std::string_view to_string(SequenceSpec::Form form) {
  for (const auto& [f, name] : kFormNames)
    if (f == form) return name;
  return "Unknown";
}

std::optional<SequenceSpec::Form> parse_sequence_form(std::string_view name) {
  for (const auto& [f, n] : kFormNames)
    if (n == name) return f;
  return std::nullopt;
}

std::uint64_t SequenceSpec::first_index() const {
  switch (form) {
    case Form::LogPlusLogLog:
    case Form::LogMinusLogLog: return 3;
    case Form::PlainLog: return 2;
    case Form::PurePower: return polylog == 0.0 ? 1 : 2;
    case Form::Explicit: return 1;
  }
  return 1;
}

double SequenceSpec::operator()(std::uint64_t n) const {
  if (n < first_index())
    throw Error(Errc::OutOfRange, describe() + " is undefined at n = " + std::to_string(n));
  const double nd = static_cast<double>(n);
  switch (form) {
    case Form::LogPlusLogLog: return std::log(nd) + param * std::log(std::log(nd));
    case Form::LogMinusLogLog: return std::log(nd) - param * std::log(std::log(nd));
    case Form::PurePower:
      return polylog == 0.0 ? std::pow(nd, param) : std::pow(nd, param) * std::pow(std::log(nd), polylog);
    case Form::PlainLog: return std::log(nd);
    case Form::Explicit:
      if (n > values.size())
        throw Error(Errc::OutOfRange, "explicit sequence has only " + std::to_string(values.size()) +
                                          " terms, asked for n = " + std::to_string(n));
      return values[n - 1];
  }
  return 0.0;
}

std::string SequenceSpec::describe() const {
  std::ostringstream os;
  os << to_string(form);
  switch (form) {
    case Form::LogPlusLogLog: os << "(eta=" << param << ")"; break;
    case Form::LogMinusLogLog: os << "(beta=" << param << ")"; break;
    case Form::PurePower: os << "(p=" << param << ", polylog=" << polylog << ")"; break;
    case Form::Explicit: os << "(" << values.size() << " terms)"; break;
    case Form::PlainLog: break;
  }
  return os.str();
}

std::string_view to_string(TailModel::Kind kind) {
  for (const auto& [k, name] : kTailNames)
    if (k == kind) return name;
  return "Unknown";
}

std::optional<TailModel::Kind> parse_tail_kind(std::string_view name) {
  for (const auto& [k, n] : kTailNames)
    if (n == name) return k;
  return std::nullopt;
}

TailModel TailModel::pareto(double gamma) {
  require(gamma > 0.0 && std::isfinite(gamma), Errc::InvalidParameter,
          "Pareto gamma must be positive");
  return TailModel(Kind::Pareto, gamma);
}

std::string TailModel::describe() const {
  if (kind_ != Kind::Pareto) return std::string(to_string(kind_));
  std::ostringstream os;
  os << "Pareto(gamma=" << gamma_ << ")";
  return os.str();
}

double TailModel::tail(double x) const {
  switch (kind_) {
    case Kind::Exponential: return x <= 0.0 ? 1.0 : std::exp(-x);
    case Kind::Pareto: return x <= 1.0 ? 1.0 : std::pow(x, -gamma_);
    case Kind::Gaussian: return boost::math::cdf(boost::math::complement(boost::math::normal(), x));
  }
  return 0.0;
}

double TailModel::cdf(double x) const {
  switch (kind_) {
    case Kind::Exponential: return x <= 0.0 ? 0.0 : -std::expm1(-x);
    case Kind::Pareto: return 1.0 - tail(x);
    case Kind::Gaussian: return boost::math::cdf(boost::math::normal(), x);
  }
  return 0.0;
}

double TailModel::quantile(double p) const {
  require(p > 0.0 && p < 1.0, Errc::OutOfRange, "quantile level must lie in (0,1)");
  switch (kind_) {
    case Kind::Exponential: return -std::log1p(-p);
    case Kind::Pareto: return std::pow(1.0 - p, -1.0 / gamma_);
    case Kind::Gaussian: return boost::math::quantile(boost::math::normal(), p);
  }
  return 0.0;
}

double TailModel::quantile_upper(double q) const {
  require(q > 0.0 && q < 1.0, Errc::OutOfRange, "tail level must lie in (0,1)");
  switch (kind_) {
    case Kind::Exponential: return -std::log(q);
    case Kind::Pareto: return std::pow(q, -1.0 / gamma_);
    case Kind::Gaussian:
      return boost::math::quantile(boost::math::complement(boost::math::normal(), q));
  }
  return 0.0;
}

GrowthRatio growth_ratio(const obs::MaxSeries& series, const SequenceSpec& spec,
                         double tail_fraction) {
  const auto k = series.checkpoints.size();
  require(k >= 20 && series.values.size() == k, Errc::InsufficientRange,
          "growth ratio needs at least 20 checkpoints");
  require(tail_fraction > 0.0 && tail_fraction <= 0.5, Errc::InvalidParameter,
          "tail_fraction must lie in (0, 0.5]");
  const auto w = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(k)));
  GrowthRatio out;
  out.window = w;
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = k - w; i < k; ++i) {
    const double rho = series.values[i] / spec(series.checkpoints[i]);
    sum += rho;
    lo = std::min(lo, rho);
    hi = std::max(hi, rho);
  }
  out.limit_hat = sum / static_cast<double>(w);
  out.spread = hi - lo;
  return out;
}

std::vector<int> band_flags(const obs::MaxSeries& series, const SequenceSpec& lower,
                            const SequenceSpec& upper, std::uint64_t n_min) {
  const auto first = std::max({n_min, lower.first_index(), upper.first_index()});
  std::vector<int> flags(series.checkpoints.size(), -1);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const auto n = series.checkpoints[i];
    if (n < first) continue;
    const double lo = lower(n), hi = upper(n);
    if (!(lo < hi))
      throw Error(Errc::BandInverted, "lower band " + std::to_string(lo) + " >= upper band " +
                                          std::to_string(hi) + " at n = " + std::to_string(n));
    flags[i] = (lo <= series.values[i] && series.values[i] <= hi) ? 1 : 0;
  }
  return flags;
}

BandOccupancy band_occupancy(const obs::MaxSeries& series, const SequenceSpec& lower,
                             const SequenceSpec& upper, std::uint64_t n_min) {
  const auto flags = band_flags(series, lower, upper, n_min);
  BandOccupancy out;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i] < 0) continue;
    ++out.considered;
    if (flags[i] == 1)
      ++inside;
    else
      out.last_violation = series.checkpoints[i];
  }
  require(out.considered > 0, Errc::InsufficientRange, "no checkpoint at or above n_min");
  out.frac_inside = static_cast<double>(inside) / static_cast<double>(out.considered);
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Limit: return "Limit";
    case Verdict::NoLimit: return "NoLimit";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

DichotomyResult dichotomy_detector(std::span<const obs::MaxSeries> ensemble,
                                   const SequenceSpec& spec, const DichotomyConfig& config) {
  require(ensemble.size() >= config.min_orbits, Errc::InvalidParameter,
          "dichotomy detector needs at least " + std::to_string(config.min_orbits) + " orbits");
  const auto& cps = ensemble.front().checkpoints;
  for (const auto& s : ensemble)
    require(s.checkpoints == cps && s.values.size() == cps.size(), Errc::InvalidParameter,
            "ensemble members must share one checkpoint grid");

  DichotomyResult res;
  res.config = config;

  // largest checkpoint at or below each power of two inside the window
  const auto n_max = cps.back();
  const double lo = std::max(static_cast<double>(n_max) / std::pow(10.0, config.decades),
                             static_cast<double>(spec.first_index()));
  std::vector<std::size_t> idx;
  for (int k = 0; k < 64; ++k) {
    const double p = std::ldexp(1.0, k);
    if (p > static_cast<double>(n_max)) break;
    if (p < lo) continue;
    auto it = std::upper_bound(cps.begin(), cps.end(), static_cast<std::uint64_t>(p));
    if (it == cps.begin()) continue;
    const auto i = static_cast<std::size_t>(std::prev(it) - cps.begin());
    if (static_cast<double>(cps[i]) < lo) continue;
    if (idx.empty() || i > idx.back()) idx.push_back(i);
  }
  if (idx.size() < config.min_dyadic)
    throw Error(Errc::InsufficientRange, "only " + std::to_string(idx.size()) +
                                             " dyadic checkpoints in the last " +
                                             std::to_string(config.decades) + " decades");
  for (auto i : idx) res.dyadic_points.push_back(cps[i]);

  const std::size_t m = idx.size();
  const std::size_t half = (m + 1) / 2;
  std::vector<double> u(m);
  for (std::size_t j = 0; j < m; ++j) u[j] = spec(cps[idx[j]]);

  std::vector<std::vector<double>> by_point(m);
  std::vector<double> full_ratio, half_ratio;
  std::size_t wandering = 0;
  std::vector<double> rho(m);
  for (const auto& s : ensemble) {
    for (std::size_t j = 0; j < m; ++j) {
      rho[j] = s.values[idx[j]] / u[j];
      by_point[j].push_back(rho[j]);
    }
    const double r = range_ratio(rho);
    full_ratio.push_back(r);
    half_ratio.push_back(range_ratio(std::span<const double>(rho).first(half)));
    if (r > config.nolimit_ratio) ++wandering;
  }

  for (auto& col : by_point) res.median_ratio.push_back(median(col));
  const auto [mlo, mhi] = std::minmax_element(res.median_ratio.begin(), res.median_ratio.end());
  const double mmed = median(res.median_ratio);
  res.median_spread = mmed > 0.0 ? (*mhi - *mlo) / mmed : std::numeric_limits<double>::infinity();
  res.median_orbit_ratio = median(full_ratio);
  res.half_orbit_ratio = median(half_ratio);
  res.wandering_fraction = static_cast<double>(wandering) / static_cast<double>(ensemble.size());
  res.growing = res.median_orbit_ratio > res.half_orbit_ratio;

  if (res.wandering_fraction >= config.nolimit_fraction && res.growing) {
    res.verdict = Verdict::NoLimit;
  } else if (res.median_spread < config.limit_spread &&
             res.median_orbit_ratio < config.limit_orbit_ratio) {
    res.verdict = Verdict::Limit;
    res.c_hat = res.median_ratio.back();
  }
  return res;
}

obs::MaxSeries iid_max_series(const TailModel& model, std::uint64_t n, std::uint64_t seed,
                              std::span<const std::uint64_t> checkpoints) {
  require(n >= 1, Errc::InvalidParameter, "n must be >= 1");
  require(!checkpoints.empty() && checkpoints.back() <= n, Errc::InvalidParameter,
          "checkpoints must end at or before n");
  obs::MaxProcessBuilder builder({checkpoints.begin(), checkpoints.end()});
  CounterRng rng(stream_key(seed, kIidStream));
  // quantile is increasing, so only new maxima of U need a quantile call
  double best_u = -1.0;
  double best_x = 0.0;
  for (std::uint64_t i = 0; i < checkpoints.back(); ++i) {
    const double u = rng.uniform_open();
    if (u > best_u) {
      best_u = u;
      best_x = model.quantile(u);
    }
    builder.push(best_x);
  }
  return std::move(builder).finish();
}

obs::MaxSeries iid_max_series(const TailModel& model, std::uint64_t n, std::uint64_t seed) {
  const auto cps = obs::geometric_checkpoints(n);
  return iid_max_series(model, n, seed, cps);
}

std::string_view to_string(SequenceClass c) {
  switch (c) {
    case SequenceClass::Upper: return "Upper";
    case SequenceClass::Lower: return "Lower";
    case SequenceClass::Intermediate: return "Intermediate";
    case SequenceClass::Undetermined: return "Undetermined";
  }
  return "Unknown";
}

std::optional<SequenceClass> analytic_class(const TailModel& model, const SequenceSpec& spec) {
  using F = SequenceSpec::Form;
  using C = SequenceClass;
  // tail(u_n) = 1 / (n (log n)^eta): the sum converges iff eta > 1, and
  // n tail -> infinity (so the second sum converges) iff eta < 0
  auto log_family = [](double eta) {
    if (eta > 1.0) return C::Upper;
    if (eta >= 0.0) return C::Intermediate;
    return C::Lower;
  };
  // tail(u_n) = n^{-a} (log n)^{-b}
  auto power_family = [](double a, double b) {
    if (a > 1.0 || (a == 1.0 && b > 1.0)) return C::Upper;
    if (a < 1.0 || b < 0.0) return C::Lower;
    return C::Intermediate;
  };

  if (model.kind() == TailModel::Kind::Exponential) {
    switch (spec.form) {
      case F::LogPlusLogLog: return log_family(spec.param);
      case F::LogMinusLogLog: return log_family(-spec.param);
      case F::PlainLog: return C::Intermediate;
      case F::PurePower:
        if (spec.param > 0.0) return C::Upper;
        if (spec.param < 0.0) return C::Lower;
        if (spec.polylog > 1.0) return C::Upper;
        if (spec.polylog == 1.0) return C::Intermediate;
        return C::Lower;
      case F::Explicit: return std::nullopt;
    }
  }
  if (model.kind() == TailModel::Kind::Pareto) {
    const double g = model.gamma();
    switch (spec.form) {
      case F::PurePower:
        if (spec.param <= 0.0) return std::nullopt;
        return power_family(spec.param * g, spec.polylog * g);
      case F::PlainLog:
      case F::LogPlusLogLog:
      case F::LogMinusLogLog:
        // tail decays only like a power of log n
        return C::Lower;
      case F::Explicit: return std::nullopt;
    }
  }
  return std::nullopt;
}

Classification classify_sequence(const TailModel& model, const SequenceSpec& spec,
                                 std::uint64_t horizon) {
  require(horizon >= 1000000, Errc::InvalidParameter, "classification horizon must be >= 10^6");

  Classification out;
  std::uint64_t next_report = 10000;
  double a = 0.0, b = 0.0;
  for (std::uint64_t n = spec.first_index(); n <= horizon; ++n) {
    const double t = model.tail(spec(n));
    a += t;
    b += t * std::exp(-static_cast<double>(n) * t);
    if (n == next_report || n == horizon) {
      out.sums.push_back({n, a, b});
      if (n == next_report) next_report *= 10;
    }
  }

  // last-decade increment below 1% of the sum: convergent; increments not
  // shrinking (within 10%): divergent
  constexpr double kConvergedFraction = 0.01;
  constexpr double kNonShrinking = 0.9;
  enum class Trend { Convergent, Divergent, Unclear };
  auto trend = [&](auto get) {
    const auto k = out.sums.size();
    if (k < 3) return Trend::Unclear;
    const double last = get(out.sums[k - 1]);
    const double inc = last - get(out.sums[k - 2]);
    const double prev = get(out.sums[k - 2]) - get(out.sums[k - 3]);
    if (inc < kConvergedFraction * last) return Trend::Convergent;
    if (inc >= kNonShrinking * prev) return Trend::Divergent;
    return Trend::Unclear;
  };
  const auto ta = trend([](const PartialSums& s) { return s.a; });
  const auto tb = trend([](const PartialSums& s) { return s.b; });
  if (ta == Trend::Convergent)
    out.heuristic = SequenceClass::Upper;
  else if (ta == Trend::Divergent && tb == Trend::Convergent)
    out.heuristic = SequenceClass::Lower;
  else if (ta == Trend::Divergent && tb == Trend::Divergent)
    out.heuristic = SequenceClass::Intermediate;

  if (const auto c = analytic_class(model, spec)) {
    out.verdict = *c;
    out.analytic = true;
    out.reason = "closed form for " + model.describe() + " with " + spec.describe();
  } else {
    out.verdict = out.heuristic;
    out.reason = "partial-sum heuristic";
  }
  return out;
}

}  // namespace ergomax::asymptotics
