#include "ergomax/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <map>

namespace ergomax::harness {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(Errc::Mismatch, "not a number: '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_count(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(Errc::Mismatch, "not a count: '" + std::string(s) + "'");
  return v;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw Error(Errc::IoError, "cannot write " + path.string());
  for (const auto& h : header) field(h);
  end_row();
}

CsvWriter& CsvWriter::field(std::string_view s) {
  if (in_row_ > 0) out_ << ',';
  out_ << s;
  ++in_row_;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_)
    throw Error(Errc::InvalidParameter, path_.filename().string() + ": row has " +
                                            std::to_string(in_row_) + " fields, expected " +
                                            std::to_string(columns_));
  out_ << '\n';
  in_row_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error(Errc::IoError, "failed writing " + path_.string());
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(Errc::Mismatch, "missing column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::Mismatch, path.string() + " is empty");
  t.header = split(line);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    auto fields = split(line);
    if (fields.size() != t.header.size())
      throw Error(Errc::Mismatch, path.filename().string() + " row " + std::to_string(row) +
                                      " has " + std::to_string(fields.size()) + " fields");
    t.rows.push_back(std::move(fields));
  }
  return t;
}

std::vector<obs::MaxSeries> read_max_series(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto c_id = t.column("orbit_id"), c_n = t.column("checkpoint_n"), c_m = t.column("M_n");
  std::map<std::uint64_t, obs::MaxSeries> by_orbit;
  for (const auto& r : t.rows) {
    auto& s = by_orbit[parse_count(r[c_id])];
    s.checkpoints.push_back(parse_count(r[c_n]));
    s.values.push_back(parse_double(r[c_m]));
  }
  std::vector<obs::MaxSeries> out;
  for (auto& [id, s] : by_orbit) out.push_back(std::move(s));
  return out;
}

std::vector<targets::HitStats> read_hit_stats(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto c_id = t.column("orbit_id"), c_n = t.column("checkpoint_n"), c_s = t.column("S_n"),
             c_e = t.column("E_n");
  std::map<std::uint64_t, targets::HitStats> by_orbit;
  for (const auto& r : t.rows) {
    auto& h = by_orbit[parse_count(r[c_id])];
    h.checkpoints.push_back(parse_count(r[c_n]));
    h.hits.push_back(parse_count(r[c_s]));
    h.expected.push_back(parse_double(r[c_e]));
  }
  std::vector<targets::HitStats> out;
  for (auto& [id, h] : by_orbit) out.push_back(std::move(h));
  return out;
}

}  // namespace ergomax::harness
