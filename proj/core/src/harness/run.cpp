#include "ergomax/harness/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "ergomax/harness/csv.hpp"
#include "json.hpp"

namespace ergomax::harness {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kJitterStream = 2;
constexpr std::uint64_t kTargetStream = 3;
constexpr std::uint64_t kCalibrationStream = 4;
constexpr std::uint64_t kProbeStream = 5;

constexpr double kFinalRatioLow = 0.9;
constexpr double kFinalRatioHigh = 1.1;

struct Context {
  const ExperimentConfig& cfg;
  dynamics::MapSystem map;
  Point target;
  double jitter;
  std::vector<std::uint64_t> cps;
  fs::path out;
  unsigned workers;
  json verdicts = json::object();
  std::vector<std::string> artifacts;
  std::uint64_t clamp_hits = 0;
  std::uint64_t truncated = 0;
};

dynamics::OrbitOptions orbit_options(const Context& ctx, std::uint64_t orbit_seed) {
  return {ctx.cfg.burn_in, ctx.jitter, stream_key(orbit_seed, kJitterStream)};
}

Point initial_point(const Context& ctx, std::uint64_t orbit_seed) {
  return dynamics::random_initial_point(ctx.map, stream_key(orbit_seed, kInitStream));
}

json point_json(const Point& p) {
  json a = json::array();
  for (double v : p.view()) a.push_back(v);
  return a;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

json spec_summary(const asymptotics::SequenceSpec& s) { return s.describe(); }

void write_max_series(Context& ctx, const std::vector<obs::MaxSeries>& ensemble) {
  const auto& a = ctx.cfg.analysis;
  auto header = schema::kMaxSeriesBase;
  if (a.ratio) header.push_back("ratio_u_n");
  if (a.bands) header.push_back("in_band");
  CsvWriter w(ctx.out / "max_series.csv", header);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& s = ensemble[i];
    std::vector<int> flags;
    if (a.bands) flags = asymptotics::band_flags(s, a.bands->lower, a.bands->upper, 0);
    for (std::size_t k = 0; k < s.checkpoints.size(); ++k) {
      const auto n = s.checkpoints[k];
      w.field(static_cast<std::uint64_t>(i)).field(n).field(s.values[k]);
      if (a.ratio) {
        if (n >= a.ratio->first_index())
          w.field(s.values[k] / (*a.ratio)(n));
        else
          w.empty();
      }
      if (a.bands) {
        if (flags[k] >= 0)
          w.field(flags[k]);
        else
          w.empty();
      }
      w.end_row();
    }
  }
  w.close();
  ctx.artifacts.push_back("max_series.csv");
}

// growth ratio, band occupancy and dichotomy over an ensemble of maxima
void analyze_maxima(Context& ctx, const std::vector<obs::MaxSeries>& ensemble) {
  const auto& a = ctx.cfg.analysis;

  if (a.ratio) {
    json j = {{"spec", spec_summary(*a.ratio)}, {"tail_fraction", a.tail_fraction}};
    try {
      std::vector<double> limits, spreads, finals;
      for (const auto& s : ensemble) {
        const auto g = asymptotics::growth_ratio(s, *a.ratio, a.tail_fraction);
        limits.push_back(g.limit_hat);
        spreads.push_back(g.spread);
        finals.push_back(s.values.back() / (*a.ratio)(s.checkpoints.back()));
      }
      double mean = 0.0, final_mean = 0.0;
      for (double v : limits) mean += v;
      for (double v : finals) final_mean += v;
      mean /= static_cast<double>(limits.size());
      final_mean /= static_cast<double>(finals.size());
      j["median_limit_hat"] = median_of(limits);
      j["mean_limit_hat"] = mean;
      j["min_limit_hat"] = *std::min_element(limits.begin(), limits.end());
      j["max_limit_hat"] = *std::max_element(limits.begin(), limits.end());
      j["median_spread"] = median_of(spreads);
      j["mean_final_ratio"] = final_mean;
      j["median_final_ratio"] = median_of(finals);
      std::vector<double> dev;
      for (const auto& s : ensemble)
        dev.push_back(std::abs(s.values.back() - (*a.ratio)(s.checkpoints.back())));
      j["median_final_abs_deviation"] = median_of(dev);
    } catch (const Error& e) {
      j["error"] = e.what();
    }
    ctx.verdicts["growth_ratio"] = j;
  }

  if (a.bands) {
    const auto& b = *a.bands;
    json j = {{"lower", spec_summary(b.lower)},
              {"upper", spec_summary(b.upper)},
              {"n_min", b.n_min},
              {"min_frac_inside", b.min_frac_inside}};
    try {
      std::size_t meeting = 0;
      std::vector<double> fracs;
      std::uint64_t last = 0;
      for (const auto& s : ensemble) {
        const auto occ = asymptotics::band_occupancy(s, b.lower, b.upper, b.n_min);
        fracs.push_back(occ.frac_inside);
        if (occ.frac_inside >= b.min_frac_inside) ++meeting;
        if (occ.last_violation) last = std::max(last, *occ.last_violation);
      }
      j["orbits_meeting"] = meeting;
      j["fraction_meeting"] = static_cast<double>(meeting) / static_cast<double>(ensemble.size());
      j["median_frac_inside"] = median_of(fracs);
      j["latest_violation"] = last == 0 ? json(nullptr) : json(last);
    } catch (const Error& e) {
      j["error"] = e.what();
    }
    ctx.verdicts["bands"] = j;
  }

  if (a.dichotomy) {
    const auto& t = a.dichotomy->thresholds;
    json j = {{"spec", spec_summary(a.dichotomy->spec)},
              {"thresholds",
               {{"min_orbits", t.min_orbits},
                {"min_dyadic", t.min_dyadic},
                {"decades", t.decades},
                {"limit_spread", t.limit_spread},
                {"limit_orbit_ratio", t.limit_orbit_ratio},
                {"nolimit_ratio", t.nolimit_ratio},
                {"nolimit_fraction", t.nolimit_fraction}}}};
    try {
      const auto r = asymptotics::dichotomy_detector(ensemble, a.dichotomy->spec, t);
      j["verdict"] = asymptotics::to_string(r.verdict);
      j["c_hat"] = finite_or_null(r.c_hat);
      j["median_spread"] = finite_or_null(r.median_spread);
      j["median_orbit_ratio"] = finite_or_null(r.median_orbit_ratio);
      j["half_orbit_ratio"] = finite_or_null(r.half_orbit_ratio);
      j["wandering_fraction"] = r.wandering_fraction;
      j["growing"] = r.growing;
      j["dyadic_points"] = r.dyadic_points;
      json med = json::array();
      for (double v : r.median_ratio) med.push_back(finite_or_null(v));
      j["median_ratio"] = med;
    } catch (const Error& e) {
      j["verdict"] = asymptotics::to_string(asymptotics::Verdict::Inconclusive);
      j["error"] = e.what();
    }
    ctx.verdicts["dichotomy"] = j;
  }
}

void run_short_return(Context& ctx) {
  const auto& sr = *ctx.cfg.analysis.short_return;
  const auto probe_seed = stream_key(ctx.cfg.seed, kProbeStream);
  json j = {{"radius", sr.radius}, {"k_max", sr.k_max}, {"probe_len", sr.probe_len},
            {"alpha", sr.alpha}};
  try {
    const auto rep = targets::short_return_stat(ctx.map, ctx.target, sr.radius, sr.k_max,
                                                sr.probe_len, sr.alpha,
                                                initial_point(ctx, probe_seed),
                                                orbit_options(ctx, probe_seed));
    CsvWriter w(ctx.out / "short_return.csv", schema::kShortReturn);
    for (const auto& e : rep.entries)
      w.field(e.lag).field(e.joint_count).field(e.joint_mass).field(e.ratio).end_row();
    w.close();
    ctx.artifacts.push_back("short_return.csv");
    j["mass"] = rep.mass;
    j["ball_count"] = rep.ball_count;
    j["violations"] = rep.violations;
    j["first_violation"] = rep.first_violation ? json(*rep.first_violation) : json(nullptr);
    j["max_ratio"] = rep.entries.empty()
                         ? 0.0
                         : std::max_element(rep.entries.begin(), rep.entries.end(),
                                            [](const auto& x, const auto& y) {
                                              return x.ratio < y.ratio;
                                            })->ratio;
  } catch (const Error& e) {
    j["error"] = e.what();
  }
  ctx.verdicts["short_return"] = j;
}

obs::Observable make_observable(const Context& ctx) {
  const auto& o = ctx.cfg.observable;
  switch (o.kind) {
    case obs::ObservableKind::NegLogDist: return obs::Observable::neg_log_dist(ctx.target, o.eps_floor);
    case obs::ObservableKind::PowerDist:
      return obs::Observable::power_dist(ctx.target, o.alpha, o.eps_floor);
    case obs::ObservableKind::CappedPower:
      return obs::Observable::capped_power(ctx.target, o.cap, o.alpha, o.eps_floor);
    case obs::ObservableKind::SqrtAbsLogDist:
      return obs::Observable::sqrt_abs_log_dist(ctx.target, o.eps_floor);
  }
  return obs::Observable::neg_log_dist(ctx.target, o.eps_floor);
}

void run_simulate(Context& ctx) {
  const auto observable = make_observable(ctx);
  struct OrbitResult {
    obs::MaxSeries series;
    std::uint64_t clamp_hits;
  };
  auto results = parallel_map<OrbitResult>(
      ctx.cfg.n_orbits, ctx.workers, [&](std::size_t i) {
        const auto seed = ctx.cfg.seed + i;
        dynamics::Orbit orbit(ctx.map, initial_point(ctx, seed), ctx.cps.back(),
                              orbit_options(ctx, seed));
        obs::ObservableMaxTracker tracker(observable, ctx.cps);
        while (!orbit.done()) tracker.push(orbit.next());
        const auto hits = tracker.clamp_hits();
        return OrbitResult{std::move(tracker).finish(), hits};
      });

  std::vector<obs::MaxSeries> ensemble;
  for (auto& r : results) {
    ctx.clamp_hits += r.clamp_hits;
    ensemble.push_back(std::move(r.series));
  }
  write_max_series(ctx, ensemble);
  analyze_maxima(ctx, ensemble);
  if (ctx.cfg.analysis.short_return) run_short_return(ctx);
}

void run_iid(Context& ctx) {
  const auto model = ctx.cfg.analysis.iid.model();
  auto ensemble = parallel_map<obs::MaxSeries>(ctx.cfg.n_orbits, ctx.workers, [&](std::size_t i) {
    return asymptotics::iid_max_series(model, ctx.cps.back(), ctx.cfg.seed + i, ctx.cps);
  });
  write_max_series(ctx, ensemble);
  analyze_maxima(ctx, ensemble);
  ctx.verdicts["model"] = model.describe();
}

targets::MeasureModel build_measure(Context& ctx) {
  const auto& s = ctx.cfg.schedule;
  const auto& facts = ctx.map.facts();
  const bool lebesgue = ctx.map.dim() == 1 && facts && facts->lebesgue_invariant;
  const bool analytic = s.measure == ScheduleConfig::Measure::Analytic ||
                        (s.measure == ScheduleConfig::Measure::Auto && lebesgue);
  if (analytic) return targets::MeasureModel::analytic_lebesgue_1d(ctx.map, ctx.target);
  const auto cal_seed = stream_key(ctx.cfg.seed, kCalibrationStream);
  return targets::MeasureModel::calibrate(ctx.map, ctx.target, initial_point(ctx, cal_seed),
                                          s.n_cal, orbit_options(ctx, cal_seed));
}

targets::ScheduleRule build_rule(const ScheduleConfig& s) {
  switch (s.rule) {
    case ScheduleConfig::Rule::PowerLaw: return targets::PowerLawRule{s.beta};
    case ScheduleConfig::Rule::LogPower: return targets::LogPowerRule{s.beta};
    case ScheduleConfig::Rule::Explicit: return targets::ExplicitRadiiRule{s.radii};
  }
  return targets::LogPowerRule{s.beta};
}

void run_bc(Context& ctx) {
  const auto& s = ctx.cfg.schedule;
  const targets::TargetSchedule schedule(build_rule(s), build_measure(ctx), ctx.cps.back());
  ctx.truncated = schedule.truncated_count();

  auto ensemble = parallel_map<targets::HitStats>(ctx.cfg.n_orbits, ctx.workers, [&](std::size_t i) {
    const auto seed = ctx.cfg.seed + i;
    dynamics::Orbit orbit(ctx.map, initial_point(ctx, seed), ctx.cps.back(),
                          orbit_options(ctx, seed));
    targets::HitCounter counter(schedule, ctx.cps, s.keep_hit_times);
    while (!orbit.done()) counter.push(orbit.next());
    return std::move(counter).finish();
  });

  CsvWriter w(ctx.out / "hit_stats.csv", schema::kHitStats);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& h = ensemble[i];
    for (std::size_t k = 0; k < h.checkpoints.size(); ++k)
      w.field(static_cast<std::uint64_t>(i))
          .field(h.checkpoints[k])
          .field(h.hits[k])
          .field(h.expected[k])
          .field(static_cast<double>(h.hits[k]) - h.expected[k])
          .end_row();
  }
  w.close();
  ctx.artifacts.push_back("hit_stats.csv");

  if (s.keep_hit_times) {
    CsvWriter t(ctx.out / "hit_times.csv", {"orbit_id", "hit_n"});
    for (std::size_t i = 0; i < ensemble.size(); ++i)
      for (auto n : ensemble[i].hit_times) t.field(static_cast<std::uint64_t>(i)).field(n).end_row();
    t.close();
    ctx.artifacts.push_back("hit_times.csv");
  }

  json j = {{"measure", targets::to_string(schedule.measure().kind())},
            {"final_ratio_band", {kFinalRatioLow, kFinalRatioHigh}}};
  std::vector<double> finals;
  std::size_t within = 0;
  for (const auto& h : ensemble) {
    const double r = static_cast<double>(h.hits.back()) / h.expected.back();
    finals.push_back(r);
    if (r >= kFinalRatioLow && r <= kFinalRatioHigh) ++within;
  }
  j["final_E"] = ensemble.front().expected.back();
  j["median_final_ratio"] = median_of(finals);
  j["fraction_within"] = static_cast<double>(within) / static_cast<double>(ensemble.size());

  const double e_max = s.fit_e_max > 0.0 ? s.fit_e_max : ensemble.front().expected.back();
  j["fit_range"] = {s.fit_e_min, e_max};
  try {
    const auto f = targets::sbc_error_fit(ensemble, s.fit_e_min, e_max);
    j["beta_prime"] = f.beta_prime;
    j["beta_prime_stderr"] = f.slope_stderr;
    j["r2"] = f.r2;
    j["fit_points"] = f.points;
  } catch (const Error& e) {
    j["error"] = e.what();
  }
  ctx.verdicts["sbc"] = j;
}

void run_dim(Context& ctx) {
  auto parts = parallel_map<std::vector<double>>(ctx.cfg.n_orbits, ctx.workers, [&](std::size_t i) {
    const auto seed = ctx.cfg.seed + i;
    std::vector<double> flat;
    flat.reserve(ctx.cfg.n_max * static_cast<std::uint64_t>(ctx.map.dim()));
    dynamics::Orbit orbit(ctx.map, initial_point(ctx, seed), ctx.cfg.n_max, orbit_options(ctx, seed));
    while (!orbit.done())
      for (double v : orbit.next().view()) flat.push_back(v);
    return flat;
  });
  std::vector<double> flat;
  for (auto& p : parts) flat.insert(flat.end(), p.begin(), p.end());
  parts.clear();
  measure::EmpiricalMeasure m(ctx.map.dim(), std::move(flat));
  m.cache(ctx.target);

  const auto& d = ctx.cfg.analysis.dimension;
  const auto grid = measure::log_grid(d.r_max, d.r_min, d.points);
  CsvWriter w(ctx.out / "dimension.csv", schema::kDimension);
  for (double r : grid) {
    const double mass = m.ball_mass(ctx.target, r);
    w.field(r).field(mass).field(std::log(r)).field(std::log(mass)).end_row();
  }
  w.close();
  ctx.artifacts.push_back("dimension.csv");

  json j = {{"samples", m.size()}, {"count_floor", measure::kBallCountFloor}};
  try {
    const auto f = measure::local_dimension(m, ctx.target, grid);
    j["d_hat"] = f.d_hat;
    j["d_stderr"] = f.d_stderr;
    j["r2"] = f.r2;
    j["fit_points"] = f.points.size();
  } catch (const Error& e) {
    j["error"] = e.what();
  }
  ctx.verdicts["dimension"] = j;

  if (d.annulus_r > 0.0) {
    const auto eps = measure::log_grid(d.eps_max, d.eps_min, d.eps_points);
    CsvWriter aw(ctx.out / "annulus.csv", schema::kAnnulus);
    for (double e : eps) {
      const double mass = static_cast<double>(m.annulus_count(ctx.target, d.annulus_r, e)) /
                          static_cast<double>(m.size());
      aw.field(e).field(mass).field(std::log(e)).field(std::log(mass)).end_row();
    }
    aw.close();
    ctx.artifacts.push_back("annulus.csv");
    json aj = {{"r", d.annulus_r}, {"count_floor", measure::kAnnulusCountFloor}};
    try {
      const auto f = measure::annulus_regularity(m, ctx.target, d.annulus_r, eps);
      aj["delta_hat"] = f.delta_hat;
      aj["delta_stderr"] = f.delta_stderr;
      aj["c_hat"] = f.c_hat;
      aj["r2"] = f.r2;
      aj["fit_points"] = f.points.size();
    } catch (const Error& e) {
      aj["error"] = e.what();
    }
    ctx.verdicts["annulus"] = aj;
  }
}

measure::TestFunction make_test_fn(const TestFunctionConfig& t) {
  switch (t.kind) {
    case measure::TestFunction::Kind::Dist:
      return measure::TestFunction::dist(t.center.size() == 1 ? Point::of(t.center[0])
                                                              : Point::of(t.center[0], t.center[1]));
    case measure::TestFunction::Kind::Coord: return measure::TestFunction::coord(t.index);
    case measure::TestFunction::Kind::Hinge: return measure::TestFunction::hinge(t.level, t.index);
    case measure::TestFunction::Kind::Const: return measure::TestFunction::constant(t.level);
  }
  return measure::TestFunction::constant(0.0);
}

std::string_view decay_kind_name(dynamics::DecayClass::Kind k) {
  switch (k) {
    case dynamics::DecayClass::Kind::Exponential: return "Exponential";
    case dynamics::DecayClass::Kind::Polynomial: return "Polynomial";
    case dynamics::DecayClass::Kind::Unknown: return "Unknown";
  }
  return "Unknown";
}

void run_decay(Context& ctx) {
  const auto& d = ctx.cfg.analysis.decay;
  const auto g1 = make_test_fn(d.g1), g2 = make_test_fn(d.g2);
  const auto lags = measure::lag_grid(d.dense, d.max_lag, d.lag_ratio);
  auto accs = parallel_map<measure::CorrelationAccumulator>(
      ctx.cfg.n_orbits, ctx.workers, [&](std::size_t i) {
        const auto seed = ctx.cfg.seed + i;
        measure::CorrelationAccumulator acc(g1, g2, lags);
        dynamics::Orbit orbit(ctx.map, initial_point(ctx, seed), ctx.cfg.n_max,
                              orbit_options(ctx, seed));
        while (!orbit.done()) acc.push(orbit.next());
        return acc;
      });
  auto total = accs.front();
  for (std::size_t i = 1; i < accs.size(); ++i) total.merge(accs[i]);

  measure::DecayOptions opts;
  opts.floor_multiplier = d.floor_multiplier;
  const auto rep = measure::classify_decay(total, opts);

  CsvWriter w(ctx.out / "decay.csv", schema::kDecay);
  for (const auto& e : rep.entries) w.field(e.lag).field(e.c_hat).field(e.above_floor ? 1 : 0).end_row();
  w.close();
  ctx.artifacts.push_back("decay.csv");

  ctx.verdicts["decay"] = {
      {"class", decay_kind_name(rep.decay.kind)},
      {"exponent", rep.exponent},
      {"zeta", rep.decay.zeta},
      {"noise_floor", rep.noise_floor},
      {"floor_multiplier", d.floor_multiplier},
      {"samples", rep.n_samples},
      {"lags_used", rep.used},
      {"exp_fit", {{"slope", rep.exp_fit.slope}, {"r2", rep.exp_fit.r2}}},
      {"poly_fit",
       {{"slope", rep.poly_fit.slope},
        {"stderr", rep.poly_fit.slope_stderr},
        {"r2", rep.poly_fit.r2}}},
  };
}

void run_classify(Context& ctx) {
  const auto& c = ctx.cfg.analysis.classify;
  const auto model = c.model.model();
  const auto res = asymptotics::classify_sequence(model, c.spec, c.horizon);
  CsvWriter w(ctx.out / "classify.csv", schema::kClassify);
  for (const auto& s : res.sums) w.field(s.n).field(s.a).field(s.b).end_row();
  w.close();
  ctx.artifacts.push_back("classify.csv");
  ctx.verdicts["classify"] = {{"model", model.describe()},
                              {"spec", c.spec.describe()},
                              {"verdict", asymptotics::to_string(res.verdict)},
                              {"heuristic", asymptotics::to_string(res.heuristic)},
                              {"analytic", res.analytic},
                              {"reason", res.reason}};
}

bool needs_target(RunKind k) {
  return k == RunKind::Simulate || k == RunKind::Bc || k == RunKind::Dim;
}

}  // namespace

unsigned default_workers() {
  if (const char* env = std::getenv("ERGOMAX_WORKERS")) {
    char* end = nullptr;
    const auto v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Point resolve_target(const ExperimentConfig& config) {
  const auto map = dynamics::MapSystem::make(config.map.id, config.map.params);
  const auto& t = config.target;
  switch (t.mode) {
    case TargetConfig::Mode::Explicit:
      return map.dim() == 1 ? Point::of(t.point.at(0)) : Point::of(t.point.at(0), t.point.at(1));
    case TargetConfig::Mode::Periodic: {
      const auto pts = map.periodic_points(t.period);
      if (t.index >= pts.size())
        throw Error(Errc::ConfigInvalid, "target.index: only " + std::to_string(pts.size()) +
                                             " periodic points of period <= " +
                                             std::to_string(t.period));
      return pts[t.index];
    }
    case TargetConfig::Mode::Auto: break;
  }

  std::vector<Point> avoid;
  if (map.is_interval_map() && t.exclusion_period > 0) avoid = map.periodic_points(t.exclusion_period);
  const auto key = stream_key(config.seed, kTargetStream);
  const CounterRng rng(key);
  dynamics::OrbitOptions opts{0, config.effective_jitter(), stream_key(key, kJitterStream)};
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    const auto extra = rng.at(attempt) % 1000;
    opts.burn_in = std::max<std::uint64_t>(config.burn_in, 1000) + extra;
    opts.jitter_key = stream_key(key, attempt + 1);
    dynamics::Orbit orbit(map, dynamics::random_initial_point(map, stream_key(key, ~attempt)), 1, opts);
    const Point x = orbit.next();
    const bool near = std::any_of(avoid.begin(), avoid.end(), [&](const Point& p) {
      return distance(p, x) < t.exclusion_radius;
    });
    if (!near) return x;
  }
  throw Error(Errc::ConfigInvalid, "target: no admissible generic point found");
}

RunSummary run(const ExperimentConfig& config, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  if (workers == 0) workers = default_workers();

  const fs::path out = config.output_dir;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(Errc::IoError, "cannot create output directory " + out.string());

  Context ctx{config,
              dynamics::MapSystem::make(config.map.id, config.map.params),
              Point::of(0.0),
              config.effective_jitter(),
              config.checkpoint_grid(),
              out,
              workers,
              json::object(),
              {},
              0,
              0};
  if (needs_target(config.kind)) ctx.target = resolve_target(config);

  switch (config.kind) {
    case RunKind::Simulate: run_simulate(ctx); break;
    case RunKind::Bc: run_bc(ctx); break;
    case RunKind::Dim: run_dim(ctx); break;
    case RunKind::Decay: run_decay(ctx); break;
    case RunKind::Iid: run_iid(ctx); break;
    case RunKind::Classify: run_classify(ctx); break;
  }

  RunSummary summary;
  summary.config = config;
  summary.config_hash = config_hash(config);
  summary.artifacts = ctx.artifacts;
  summary.clamp_hits = ctx.clamp_hits;
  summary.truncated = ctx.truncated;
  summary.summary_path = out / "summary.json";

  json doc;
  doc["version"] = kVersion;
  doc["config_hash"] = summary.config_hash;
  doc["config"] = json::parse(serialize(config));
  doc["kind"] = to_string(config.kind);
  doc["target"] = needs_target(config.kind) ? point_json(ctx.target) : json(nullptr);
  doc["jitter"] = ctx.jitter;
  doc["artifacts"] = ctx.artifacts;
  doc["counters"] = {{"clamp_hits", ctx.clamp_hits}, {"truncated_balls", ctx.truncated}};
  doc["verdicts"] = ctx.verdicts;
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  doc["wall_time_s"] = summary.wall_seconds;

  summary.json = doc.dump(2);
  std::ofstream f(summary.summary_path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::IoError, "cannot write " + summary.summary_path.string());
  f << summary.json << '\n';
  f.close();
  if (!f) throw Error(Errc::IoError, "failed writing " + summary.summary_path.string());
  return summary;
}

namespace {

void compare_files(const fs::path& expected, const fs::path& actual, const std::string& name) {
  std::ifstream a(expected, std::ios::binary), b(actual, std::ios::binary);
  if (!a) throw Error(Errc::Mismatch, name + ": recorded artifact is missing");
  if (!b) throw Error(Errc::Mismatch, name + ": replay did not produce this file");
  std::string la, lb;
  for (std::size_t line = 1;; ++line) {
    const bool ga = static_cast<bool>(std::getline(a, la));
    const bool gb = static_cast<bool>(std::getline(b, lb));
    if (!ga && !gb) return;
    if (ga != gb || la != lb) {
      const std::string where = line == 1 ? "header" : "row " + std::to_string(line - 1);
      throw Error(Errc::Mismatch, name + " " + where + ": recorded '" + (ga ? la : "<eof>") +
                                      "', replayed '" + (gb ? lb : "<eof>") + "'");
    }
  }
}

}  // namespace

RunSummary replay(const fs::path& summary_path, unsigned workers) {
  std::ifstream in(summary_path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + summary_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Mismatch, "summary.json is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.contains("config")) throw Error(Errc::Mismatch, "summary.json has no embedded config");
  auto config = parse_config(doc["config"].dump());

  const auto dir = summary_path.parent_path();
  const auto scratch = dir / (".replay-" + config_hash(config));
  fs::remove_all(scratch);
  config.output_dir = scratch.string();
  auto fresh = run(config, workers);

  try {
    const auto recorded = doc.value("artifacts", json::array());
    for (const auto& a : recorded) {
      const auto name = a.get<std::string>();
      compare_files(dir / name, scratch / name, name);
    }
    if (recorded.size() != fresh.artifacts.size())
      throw Error(Errc::Mismatch, "artifact lists differ");
    const auto again = json::parse(fresh.json);
    if (doc.value("verdicts", json()) != again["verdicts"])
      throw Error(Errc::Mismatch, "summary.json verdicts differ");
  } catch (...) {
    fs::remove_all(scratch);
    throw;
  }
  fs::remove_all(scratch);
  fresh.summary_path = summary_path;
  return fresh;
}

}  // namespace ergomax::harness
