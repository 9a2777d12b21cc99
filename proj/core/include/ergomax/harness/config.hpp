#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ergomax/asymptotics.hpp"
#include "ergomax/dynamics.hpp"
#include "ergomax/measure.hpp"
#include "ergomax/observables.hpp"

namespace ergomax::harness {

enum class RunKind { Simulate, Bc, Dim, Decay, Iid, Classify };

std::string_view to_string(RunKind kind);
std::optional<RunKind> parse_run_kind(std::string_view name);

struct MapConfig {
  dynamics::MapId id = dynamics::MapId::Tent;
  dynamics::ParamMap params;

  friend bool operator==(const MapConfig&, const MapConfig&) = default;
};

struct ObservableConfig {
  obs::ObservableKind kind = obs::ObservableKind::NegLogDist;
  double alpha = 1.0;
  double cap = 1.0;
  double eps_floor = obs::kDefaultEpsFloor;

  friend bool operator==(const ObservableConfig&, const ObservableConfig&) = default;
};

struct TargetConfig {
  enum class Mode { Explicit, Auto, Periodic };
  Mode mode = Mode::Auto;
  std::vector<double> point;  // Explicit
  int period = 1;             // Periodic: index into periodic_points(period)
  std::uint64_t index = 0;
  double exclusion_radius = 1e-3;  // Auto: keep away from low-period points
  int exclusion_period = 3;

  friend bool operator==(const TargetConfig&, const TargetConfig&) = default;
};

struct CheckpointConfig {
  double ratio = 1.15;
  std::vector<std::uint64_t> points;  // overrides the geometric grid when non-empty

  friend bool operator==(const CheckpointConfig&, const CheckpointConfig&) = default;
};

struct ScheduleConfig {
  enum class Rule { PowerLaw, LogPower, Explicit };
  enum class Measure { Auto, Analytic, Empirical };
  Rule rule = Rule::LogPower;
  double beta = 3.0;
  std::vector<double> radii;  // Explicit
  Measure measure = Measure::Auto;
  std::uint64_t n_cal = 1000000;
  bool keep_hit_times = false;
  /// Fit window in E. fit_e_max = 0 means the final E.
  double fit_e_min = 10.0;
  double fit_e_max = 0.0;

  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

struct BandConfig {
  asymptotics::SequenceSpec lower = asymptotics::SequenceSpec::log_minus_loglog(3.0);
  asymptotics::SequenceSpec upper = asymptotics::SequenceSpec::log_plus_loglog(2.0);
  std::uint64_t n_min = 1000;
  /// An orbit "stays in the band" when frac_inside reaches this value.
  double min_frac_inside = 0.99;

  friend bool operator==(const BandConfig&, const BandConfig&) = default;
};

struct DichotomyRunConfig {
  asymptotics::SequenceSpec spec = asymptotics::SequenceSpec::plain_log();
  asymptotics::DichotomyConfig thresholds;

  friend bool operator==(const DichotomyRunConfig&, const DichotomyRunConfig&) = default;
};

struct DimensionConfig {
  double r_max = 1e-1;
  double r_min = 1e-4;
  std::uint64_t points = 16;
  double annulus_r = 0.0;  // 0 disables the annulus fit
  double eps_max = 1e-3;
  double eps_min = 1e-6;
  std::uint64_t eps_points = 12;

  friend bool operator==(const DimensionConfig&, const DimensionConfig&) = default;
};

struct TestFunctionConfig {
  measure::TestFunction::Kind kind = measure::TestFunction::Kind::Coord;
  std::vector<double> center;
  std::uint64_t index = 0;
  double level = 0.0;

  friend bool operator==(const TestFunctionConfig&, const TestFunctionConfig&) = default;
};

struct DecayConfig {
  TestFunctionConfig g1;
  TestFunctionConfig g2;
  std::uint64_t dense = 10;
  std::uint64_t max_lag = 1000;
  double lag_ratio = 1.3;
  double floor_multiplier = 5.0;

  friend bool operator==(const DecayConfig&, const DecayConfig&) = default;
};

struct ShortReturnConfig {
  double radius = 1e-3;
  std::uint64_t k_max = 50;
  std::uint64_t probe_len = 1000000;
  double alpha = 0.2;

  friend bool operator==(const ShortReturnConfig&, const ShortReturnConfig&) = default;
};

struct TailConfig {
  asymptotics::TailModel::Kind kind = asymptotics::TailModel::Kind::Exponential;
  double gamma = 1.0;

  asymptotics::TailModel model() const;
  friend bool operator==(const TailConfig&, const TailConfig&) = default;
};

struct ClassifyConfig {
  TailConfig model;
  asymptotics::SequenceSpec spec = asymptotics::SequenceSpec::plain_log();
  std::uint64_t horizon = 1000000;

  friend bool operator==(const ClassifyConfig&, const ClassifyConfig&) = default;
};

struct AnalysisConfig {
  std::optional<asymptotics::SequenceSpec> ratio;
  double tail_fraction = 0.25;
  std::optional<BandConfig> bands;
  std::optional<DichotomyRunConfig> dichotomy;
  DimensionConfig dimension;
  DecayConfig decay;
  std::optional<ShortReturnConfig> short_return;
  TailConfig iid;
  ClassifyConfig classify;

  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct ExperimentConfig {
  RunKind kind = RunKind::Simulate;
  MapConfig map;
  ObservableConfig observable;
  TargetConfig target;
  std::uint64_t n_max = 1000000;
  std::uint64_t burn_in = 1000;
  std::uint64_t n_orbits = 1;
  std::uint64_t seed = 0;
  /// Per-step perturbation amplitude. Unset: 1e-12 for the maps that
  /// collapse in floating point (Tent, Doubling), none otherwise.
  std::optional<double> jitter;
  CheckpointConfig checkpoints;
  ScheduleConfig schedule;
  AnalysisConfig analysis;
  std::string output_dir = "out";

  /// Throws ConfigInvalid naming the offending field.
  void validate() const;
  double effective_jitter() const;
  std::vector<std::uint64_t> checkpoint_grid() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline constexpr double kAutoJitter = 1e-12;

/// JSON text; every field is written, unset optionals as null.
std::string serialize(const ExperimentConfig& config);
/// Missing fields take their defaults; unknown fields and type errors throw
/// ConfigInvalid with the field path.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the serialized config with output_dir cleared.
std::string config_hash(const ExperimentConfig& config);

}  // namespace ergomax::harness
