#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ergomax/harness/config.hpp"
#include "ergomax/harness/csv.hpp"
#include "ergomax/harness/parallel.hpp"
#include "ergomax/harness/run.hpp"
#include "oracles.hpp"

using namespace ergomax;
using namespace ergomax::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::current_path() / "harness-scratch" / name;
  fs::remove_all(p);
  return p;
}

ExperimentConfig tent_simulate(const fs::path& out) {
  ExperimentConfig c;
  c.kind = RunKind::Simulate;
  c.target.mode = TargetConfig::Mode::Explicit;
  c.target.point = {0.3};
  c.n_max = 20000;
  c.n_orbits = 12;
  c.seed = 42;
  c.analysis.ratio = asymptotics::SequenceSpec::plain_log();
  c.analysis.bands = BandConfig{};
  c.analysis.short_return = ShortReturnConfig{.radius = 1e-2, .k_max = 5, .probe_len = 10000, .alpha = 0.2};
  c.output_dir = out.string();
  return c;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return Errc::InvalidParameter;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config round trip on random configs") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto c = oracle::random_config(seed);
    CAPTURE(seed);
    REQUIRE_NOTHROW(c.validate());
    const auto text = serialize(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize(back) == text);
    CHECK(config_hash(back) == config_hash(c));
  }
}

TEST_CASE("config defaults and hash") {
  const auto c = parse_config("{}");
  CHECK(c == ExperimentConfig{});
  auto d = c;
  d.output_dir = "elsewhere";
  CHECK(config_hash(d) == config_hash(c));
  d.seed = 1;
  CHECK(config_hash(d) != config_hash(c));
  CHECK(config_hash(c).size() == 16);
}

TEST_CASE("invalid configs name the field") {
  CHECK(message_of([] { parse_config(R"({"map": {"id": "Tent", "colour": 1}})"); }).find("map.colour") !=
        std::string::npos);
  CHECK(message_of([] { parse_config(R"({"n_max": "big"})"); }).find("n_max") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"analysis": {"decay": {"g1": {"kind": "Sine"}}}})"); })
            .find("analysis.decay.g1.kind") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"checkpoints": {"points": [1, -2]}})"); })
            .find("checkpoints.points[1]") != std::string::npos);
  CHECK(code_of([] { parse_config("{not json"); }) == Errc::ConfigInvalid);

  ExperimentConfig c;
  c.n_orbits = 0;
  CHECK(message_of([&] { c.validate(); }).find("n_orbits") != std::string::npos);
  c = {};
  c.map.id = dynamics::MapId::Intermittent;
  c.map.params["alpha"] = 1.5;
  CHECK(message_of([&] { c.validate(); }).find("map") != std::string::npos);
  c = {};
  c.target.mode = TargetConfig::Mode::Explicit;
  CHECK(message_of([&] { c.validate(); }).find("target.point") != std::string::npos);
  c = {};
  c.kind = RunKind::Bc;
  c.schedule.rule = ScheduleConfig::Rule::PowerLaw;
  c.schedule.beta = 2.0;
  CHECK(message_of([&] { c.validate(); }).find("schedule.beta") != std::string::npos);
  CHECK(code_of([] { load_config("/nonexistent/config.json"); }) == Errc::IoError);
}

TEST_CASE("csv number formatting") {
  CounterRng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng() % 200) - 100);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(parse_count("123") == 123);
  CHECK_THROWS_AS(parse_count("12x"), Error);
}

TEST_CASE("parallel_map keeps order and reports the first failure") {
  const auto r = parallel_map<int>(100, 8, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == static_cast<int>(i * i));
  try {
    parallel_map<int>(50, 4, [](std::size_t i) -> int {
      if (i == 7 || i == 30) throw std::runtime_error("fail " + std::to_string(i));
      return 0;
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail 7");
  }
}

TEST_CASE("smoke run") {
  const auto out = scratch("smoke");
  ExperimentConfig c;
  c.n_max = 10;
  c.n_orbits = 1;
  c.target.mode = TargetConfig::Mode::Explicit;
  c.target.point = {0.3};
  c.output_dir = out.string();
  const auto s = run(c, 1);
  CHECK(fs::exists(out / "summary.json"));
  REQUIRE(s.artifacts == std::vector<std::string>{"max_series.csv"});
  const auto t = read_csv(out / "max_series.csv");
  CHECK(t.rows.size() == c.checkpoint_grid().size());
  CHECK(slurp(out / "summary.json").find("max_series.csv") != std::string::npos);
  CHECK(s.summary_path == out / "summary.json");
  CHECK(read_max_series(out / "max_series.csv").size() == 1);
}

TEST_CASE("worker count does not change any byte") {
  auto c = tent_simulate(scratch("w1"));
  const auto a = run(c, 1);
  c.output_dir = scratch("w8").string();
  const auto b = run(c, 8);
  REQUIRE(a.artifacts == b.artifacts);
  for (const auto& f : a.artifacts)
    CHECK(slurp(fs::path(a.config.output_dir) / f) == slurp(fs::path(b.config.output_dir) / f));

  ExperimentConfig bc;
  bc.kind = RunKind::Bc;
  bc.map.id = dynamics::MapId::Doubling;
  bc.n_max = 50000;
  bc.n_orbits = 20;
  bc.schedule.keep_hit_times = true;
  bc.output_dir = scratch("bc1").string();
  const auto x = run(bc, 1);
  bc.output_dir = scratch("bc8").string();
  const auto y = run(bc, 8);
  for (const auto& f : x.artifacts)
    CHECK(slurp(fs::path(x.config.output_dir) / f) == slurp(fs::path(y.config.output_dir) / f));
}

TEST_CASE("replay succeeds and detects tampering") {
  const auto c = tent_simulate(scratch("replay"));
  const auto s = run(c, 2);
  CHECK_NOTHROW(replay(s.summary_path, 1));
  CHECK_NOTHROW(replay(s.summary_path, 8));

  const auto csv = fs::path(c.output_dir) / "max_series.csv";
  auto text = slurp(csv);
  std::vector<std::string> lines;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) lines.push_back(l);
  lines[4] = lines[4].substr(0, lines[4].find(',')) + ",999,0";
  std::ofstream(csv, std::ios::binary | std::ios::trunc) << [&] {
    std::string joined;
    for (const auto& l : lines) joined += l + "\n";
    return joined;
  }();
  const auto msg = message_of([&] { replay(s.summary_path, 1); });
  CHECK(msg.find("Mismatch") != std::string::npos);
  CHECK(msg.find("max_series.csv") != std::string::npos);
  CHECK(msg.find("row 4") != std::string::npos);
}

TEST_CASE("csv headers match the golden schema") {
  std::map<std::string, std::string> golden;
  {
    std::ifstream in(fs::path(ERGOMAX_GOLDEN_DIR) / "headers.csv");
    for (std::string l; std::getline(in, l);) golden[l.substr(0, l.find(','))] = l.substr(l.find(',') + 1);
  }
  std::vector<ExperimentConfig> runs;
  auto sim = tent_simulate(scratch("g-sim"));
  runs.push_back(sim);

  ExperimentConfig bc;
  bc.kind = RunKind::Bc;
  bc.n_max = 20000;
  bc.n_orbits = 20;
  bc.schedule.keep_hit_times = true;
  bc.output_dir = scratch("g-bc").string();
  runs.push_back(bc);

  ExperimentConfig dim;
  dim.kind = RunKind::Dim;
  dim.n_max = 200000;
  dim.target.mode = TargetConfig::Mode::Explicit;
  dim.target.point = {0.3};
  dim.analysis.dimension = {.r_max = 0.1, .r_min = 1e-3, .points = 8, .annulus_r = 0.05,
                            .eps_max = 1e-2, .eps_min = 1e-4, .eps_points = 6};
  dim.output_dir = scratch("g-dim").string();
  runs.push_back(dim);

  ExperimentConfig dec;
  dec.kind = RunKind::Decay;
  dec.n_max = 200000;
  dec.analysis.decay.max_lag = 50;
  dec.output_dir = scratch("g-dec").string();
  runs.push_back(dec);

  ExperimentConfig cls;
  cls.kind = RunKind::Classify;
  cls.output_dir = scratch("g-cls").string();
  runs.push_back(cls);

  std::size_t seen = 0;
  for (const auto& c : runs) {
    const auto s = run(c, 2);
    for (const auto& f : s.artifacts) {
      CAPTURE(f);
      REQUIRE(golden.count(f) == 1);
      std::ifstream in(fs::path(c.output_dir) / f);
      std::string header;
      std::getline(in, header);
      CHECK(header == golden[f]);
      ++seen;
    }
  }
  CHECK(seen == golden.size());
}

TEST_CASE("summary echoes the config and reproduces verdicts from the CSVs") {
  auto c = tent_simulate(scratch("verdicts"));
  c.n_orbits = 30;
  c.analysis.dichotomy = DichotomyRunConfig{};
  const auto s = run(c, 4);
  CHECK(parse_config(serialize(s.config)) == c);
  const auto series = read_max_series(fs::path(c.output_dir) / "max_series.csv");
  REQUIRE(series.size() == 30);
  const auto d = asymptotics::dichotomy_detector(series, asymptotics::SequenceSpec::plain_log());
  CHECK(s.json.find(std::string(asymptotics::to_string(d.verdict))) != std::string::npos);
}

TEST_CASE("resolved targets") {
  ExperimentConfig c;
  c.target.mode = TargetConfig::Mode::Periodic;
  c.target.period = 1;
  c.target.index = 1;
  CHECK(resolve_target(c)[0] == doctest::Approx(2.0 / 3.0));
  c.target.mode = TargetConfig::Mode::Auto;
  c.seed = 5;
  const auto t = resolve_target(c);
  for (const auto& p : dynamics::MapSystem::tent().periodic_points(3)) CHECK(std::abs(t[0] - p[0]) >= 1e-3);
  CHECK(resolve_target(c) == t);
}
