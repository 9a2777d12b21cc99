#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ergomax/error.hpp"
#include "ergomax/observables.hpp"

namespace ergomax::asymptotics {

/// Normalizing sequence u_n.
struct SequenceSpec {
  enum class Form { LogPlusLogLog, LogMinusLogLog, PurePower, PlainLog, Explicit };

  Form form = Form::PlainLog;
  double param = 0.0;    // eta for LogPlusLogLog, beta for LogMinusLogLog, p for PurePower
  double polylog = 0.0;  // PurePower only
  std::vector<double> values;  // Explicit: u_1, u_2, ...

  static SequenceSpec log_plus_loglog(double eta) { return {Form::LogPlusLogLog, eta, 0.0, {}}; }
  static SequenceSpec log_minus_loglog(double beta) { return {Form::LogMinusLogLog, beta, 0.0, {}}; }
  static SequenceSpec pure_power(double p, double polylog = 0.0) {
    return {Form::PurePower, p, polylog, {}};
  }
  static SequenceSpec plain_log() { return {Form::PlainLog, 0.0, 0.0, {}}; }
  static SequenceSpec explicit_values(std::vector<double> v) {
    return {Form::Explicit, 0.0, 0.0, std::move(v)};
  }

  /// Smallest n at which the closed form is defined and finite.
  std::uint64_t first_index() const;
  /// u_n. Throws OutOfRange outside the domain.
  double operator()(std::uint64_t n) const;
  std::string describe() const;

  friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;
};

std::string_view to_string(SequenceSpec::Form form);
std::optional<SequenceSpec::Form> parse_sequence_form(std::string_view name);

/// Reference distributions for the i.i.d. baseline.
class TailModel {
 public:
  enum class Kind { Exponential, Pareto, Gaussian };

  static TailModel exponential() { return TailModel(Kind::Exponential, 1.0); }
  /// F(x) = 1 - x^{-gamma} on [1, inf).
  static TailModel pareto(double gamma);
  static TailModel gaussian() { return TailModel(Kind::Gaussian, 1.0); }

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  std::string describe() const;

  /// 1 - F(x).
  double tail(double x) const;
  double cdf(double x) const;
  /// F^{-1}(p), p in (0,1).
  double quantile(double p) const;
  /// The x with tail(x) = q, q in (0,1); accurate deep in the tail where
  /// quantile(1 - q) loses digits to the subtraction.
  double quantile_upper(double q) const;

  friend bool operator==(const TailModel&, const TailModel&) = default;

 private:
  TailModel(Kind kind, double gamma) : kind_(kind), gamma_(gamma) {}
  Kind kind_;
  double gamma_;
};

std::string_view to_string(TailModel::Kind kind);
std::optional<TailModel::Kind> parse_tail_kind(std::string_view name);

struct GrowthRatio {
  double limit_hat = 0.0;
  double spread = 0.0;
  std::size_t window = 0;  // checkpoints averaged
};

/// Mean and range of M_{n_k}/u_{n_k} over the last ceil(tail_fraction * K)
/// checkpoints. Needs at least 20 checkpoints.
GrowthRatio growth_ratio(const obs::MaxSeries& series, const SequenceSpec& spec,
                         double tail_fraction = 0.25);

struct BandOccupancy {
  double frac_inside = 0.0;
  std::optional<std::uint64_t> last_violation;
  std::size_t considered = 0;
};

/// Fraction of checkpoints n_k >= n_min with lower(n_k) <= M <= upper(n_k).
/// Throws BandInverted when lower(n_k) >= upper(n_k) at any such checkpoint.
BandOccupancy band_occupancy(const obs::MaxSeries& series, const SequenceSpec& lower,
                             const SequenceSpec& upper, std::uint64_t n_min);

/// Per-checkpoint membership in the band; 1 inside, 0 outside, and -1 below
/// n_min or outside the domain of either sequence.
std::vector<int> band_flags(const obs::MaxSeries& series, const SequenceSpec& lower,
                            const SequenceSpec& upper, std::uint64_t n_min);

/// Finite-n thresholds for the existence/non-existence verdict. Calibrated on
/// planted families: M_n = log n + noise against log n, and i.i.d. Pareto(1)
/// maxima against n.
struct DichotomyConfig {
  std::size_t min_orbits = 30;
  std::size_t min_dyadic = 6;
  /// Dyadic points are taken inside [n_max / 10^decades, n_max].
  double decades = 3.0;
  /// Limit: relative range of the ensemble-median ratio trajectory.
  double limit_spread = 0.2;
  /// Limit: median over orbits of max/min of the ratio trajectory.
  double limit_orbit_ratio = 2.0;
  /// NoLimit: an orbit counts as wandering when max/min exceeds this.
  double nolimit_ratio = 5.0;
  /// NoLimit: required fraction of wandering orbits.
  double nolimit_fraction = 0.5;

  friend bool operator==(const DichotomyConfig&, const DichotomyConfig&) = default;
};

enum class Verdict { Limit, NoLimit, Inconclusive };
std::string_view to_string(Verdict v);

struct DichotomyResult {
  Verdict verdict = Verdict::Inconclusive;
  double c_hat = 0.0;  // Limit only: final ensemble-median ratio
  std::vector<std::uint64_t> dyadic_points;
  std::vector<double> median_ratio;  // ensemble median of M/u at each dyadic point
  double median_spread = 0.0;        // (max - min) / median of median_ratio
  double median_orbit_ratio = 0.0;   // median over orbits of max/min
  double wandering_fraction = 0.0;   // fraction of orbits with max/min > nolimit_ratio
  double half_orbit_ratio = 0.0;     // same median, restricted to the first half of the points
  bool growing = false;              // median_orbit_ratio > half_orbit_ratio
  DichotomyConfig config;
};

DichotomyResult dichotomy_detector(std::span<const obs::MaxSeries> ensemble,
                                   const SequenceSpec& spec, const DichotomyConfig& config = {});

/// Stream id of the i.i.d. baseline: U_i are the successive uniform_open()
/// draws of CounterRng(stream_key(seed, kIidStream)).
inline constexpr std::uint64_t kIidStream = 0x11d;

/// Checkpointed maxima of X_i = quantile(U_i).
obs::MaxSeries iid_max_series(const TailModel& model, std::uint64_t n, std::uint64_t seed,
                              std::span<const std::uint64_t> checkpoints);
obs::MaxSeries iid_max_series(const TailModel& model, std::uint64_t n, std::uint64_t seed);

enum class SequenceClass { Upper, Lower, Intermediate, Undetermined };
std::string_view to_string(SequenceClass c);

struct PartialSums {
  std::uint64_t n;
  double a;  // sum F(u_k) tail
  double b;  // sum tail * exp(-k * tail)
};

struct Classification {
  SequenceClass verdict = SequenceClass::Undetermined;
  SequenceClass heuristic = SequenceClass::Undetermined;
  bool analytic = false;
  std::string reason;
  std::vector<PartialSums> sums;
};

/// Place u_n in the i.i.d. trichotomy: Upper when sum F(u_n) tail converges,
/// Lower when it diverges but sum tail e^{-n tail} converges, Intermediate
/// when both diverge. Partial sums are reported at every decade from 10^4 to
/// the horizon; closed-form verdicts override the sum heuristic when known.
Classification classify_sequence(const TailModel& model, const SequenceSpec& spec,
                                 std::uint64_t horizon = 1000000);

/// Closed-form trichotomy verdict, when one is known for the pair.
std::optional<SequenceClass> analytic_class(const TailModel& model, const SequenceSpec& spec);

}  // namespace ergomax::asymptotics
