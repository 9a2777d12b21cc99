#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ergomax/observables.hpp"
#include "ergomax/targets.hpp"

namespace ergomax::harness {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
std::uint64_t parse_count(std::string_view s);

/// Minimal comma-separated writer. Fields never contain commas or quotes.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  CsvWriter& field(std::string_view s);
  CsvWriter& field(double v) { return field(format_double(v)); }
  CsvWriter& field(std::uint64_t v) { return field(std::string_view(std::to_string(v))); }
  CsvWriter& field(int v) { return field(std::string_view(std::to_string(v))); }
  CsvWriter& empty() { return field(std::string_view()); }
  void end_row();
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws Mismatch when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Documented column layouts.
namespace schema {
inline const std::vector<std::string> kMaxSeriesBase{"orbit_id", "checkpoint_n", "M_n"};
inline const std::vector<std::string> kHitStats{"orbit_id", "checkpoint_n", "S_n", "E_n",
                                                "deviation"};
inline const std::vector<std::string> kDimension{"r", "ball_mass", "log_r", "log_mass"};
inline const std::vector<std::string> kAnnulus{"eps", "annulus_mass", "log_eps", "log_mass"};
inline const std::vector<std::string> kDecay{"lag", "c_hat", "above_floor"};
inline const std::vector<std::string> kShortReturn{"lag", "joint_count", "joint_mass", "ratio"};
inline const std::vector<std::string> kClassify{"n", "A_n", "B_n"};
}  // namespace schema

/// Rebuild per-orbit series from a max_series.csv, in orbit order.
std::vector<obs::MaxSeries> read_max_series(const std::filesystem::path& path);
/// Rebuild per-orbit hit statistics from a hit_stats.csv, in orbit order.
std::vector<targets::HitStats> read_hit_stats(const std::filesystem::path& path);

}  // namespace ergomax::harness
