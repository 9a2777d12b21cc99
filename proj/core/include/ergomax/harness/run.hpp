#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ergomax/harness/config.hpp"
#include "ergomax/harness/parallel.hpp"

namespace ergomax::harness {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunSummary {
  std::filesystem::path summary_path;
  std::string config_hash;
  ExperimentConfig config;
  /// File names relative to the output directory.
  std::vector<std::string> artifacts;
  std::uint64_t clamp_hits = 0;
  std::uint64_t truncated = 0;
  double wall_seconds = 0.0;
  /// The full summary.json text.
  std::string json;
};

/// Workers used when none is requested: ERGOMAX_WORKERS if set, else all
/// hardware threads.
unsigned default_workers();

/// Simulate n_orbits orbits (orbit i seeded from seed + i), run the
/// configured analyses, and write the CSVs plus summary.json into
/// config.output_dir. Results do not depend on the worker count.
RunSummary run(const ExperimentConfig& config, unsigned workers = 0);

/// Re-run the config embedded in summary.json into a scratch directory and
/// compare every artifact byte for byte. Throws Mismatch naming the first
/// differing file and row.
RunSummary replay(const std::filesystem::path& summary_path, unsigned workers = 0);

/// The target point a config resolves to.
Point resolve_target(const ExperimentConfig& config);

}  // namespace ergomax::harness
