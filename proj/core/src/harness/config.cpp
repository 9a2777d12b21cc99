#include "ergomax/harness/config.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ergomax::harness {

using json = nlohmann::json;

namespace {

constexpr std::array<std::pair<RunKind, std::string_view>, 6> kKindNames{{
    {RunKind::Simulate, "simulate"},
    {RunKind::Bc, "bc"},
    {RunKind::Dim, "dim"},
    {RunKind::Decay, "decay"},
    {RunKind::Iid, "iid"},
    {RunKind::Classify, "classify"},
}};

template <class E, std::size_t N>
std::string_view enum_name(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
  for (const auto& [k, name] : table)
    if (k == v) return name;
  return "?";
}

constexpr std::array<std::pair<TargetConfig::Mode, std::string_view>, 3> kTargetModes{{
    {TargetConfig::Mode::Explicit, "explicit"},
    {TargetConfig::Mode::Auto, "auto"},
    {TargetConfig::Mode::Periodic, "periodic"},
}};
constexpr std::array<std::pair<ScheduleConfig::Rule, std::string_view>, 3> kRules{{
    {ScheduleConfig::Rule::PowerLaw, "PowerLaw"},
    {ScheduleConfig::Rule::LogPower, "LogPower"},
    {ScheduleConfig::Rule::Explicit, "Explicit"},
}};
constexpr std::array<std::pair<ScheduleConfig::Measure, std::string_view>, 3> kMeasures{{
    {ScheduleConfig::Measure::Auto, "auto"},
    {ScheduleConfig::Measure::Analytic, "analytic"},
    {ScheduleConfig::Measure::Empirical, "empirical"},
}};
constexpr std::array<std::pair<measure::TestFunction::Kind, std::string_view>, 4> kTestFns{{
    {measure::TestFunction::Kind::Dist, "Dist"},
    {measure::TestFunction::Kind::Coord, "Coord"},
    {measure::TestFunction::Kind::Hinge, "Hinge"},
    {measure::TestFunction::Kind::Const, "Const"},
}};

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(Errc::ConfigInvalid, path + ": " + what);
}

// Walks one JSON object, remembering its path and which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }
  ~Reader() = default;

  std::string at(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  bool has(std::string_view key) {
    return find(key) != nullptr;
  }

  void number(std::string_view key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) invalid(at(key), "expected a number");
      out = v->get<double>();
    }
  }
  void count(std::string_view key, std::uint64_t& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
        invalid(at(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void integer(std::string_view key, int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer()) invalid(at(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void boolean(std::string_view key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) invalid(at(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void string(std::string_view key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) invalid(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  template <class T>
  void numbers(std::string_view key, std::vector<T>& out) {
    if (const auto* v = find(key)) {
      if (!v->is_array()) invalid(at(key), "expected an array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const auto& e = (*v)[i];
        const bool ok = std::is_integral_v<T> ? e.is_number_unsigned() : e.is_number();
        if (!ok) invalid(at(key) + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(e.get<T>());
      }
    }
  }
  template <class E, std::size_t N>
  void choice(std::string_view key, const std::array<std::pair<E, std::string_view>, N>& table,
              E& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) invalid(at(key), "expected a string");
      const auto s = v->get<std::string>();
      for (const auto& [k, name] : table)
        if (name == s) {
          out = k;
          return;
        }
      invalid(at(key), "unknown value '" + s + "'");
    }
  }
  template <class E, class Parse>
  void parsed(std::string_view key, Parse parse, E& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) invalid(at(key), "expected a string");
      const auto s = v->get<std::string>();
      const auto e = parse(s);
      if (!e) invalid(at(key), "unknown value '" + s + "'");
      out = *e;
    }
  }
  Reader child(std::string_view key) {
    const auto* v = find(key);
    static const json kEmpty = json::object();
    return Reader(v ? *v : kEmpty, at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) invalid(at(it.key()), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json spec_json(const asymptotics::SequenceSpec& s) {
  return {{"form", asymptotics::to_string(s.form)},
          {"param", s.param},
          {"polylog", s.polylog},
          {"values", s.values}};
}

asymptotics::SequenceSpec read_spec(Reader r) {
  asymptotics::SequenceSpec s;
  r.parsed("form", asymptotics::parse_sequence_form, s.form);
  r.number("param", s.param);
  r.number("polylog", s.polylog);
  r.numbers("values", s.values);
  r.finish();
  return s;
}

json tail_json(const TailConfig& t) {
  return {{"model", asymptotics::to_string(t.kind)}, {"gamma", t.gamma}};
}

TailConfig read_tail(Reader& r) {
  TailConfig t;
  r.parsed("model", asymptotics::parse_tail_kind, t.kind);
  r.number("gamma", t.gamma);
  return t;
}

json test_fn_json(const TestFunctionConfig& t) {
  return {{"kind", enum_name(kTestFns, t.kind)},
          {"center", t.center},
          {"index", t.index},
          {"level", t.level}};
}

TestFunctionConfig read_test_fn(Reader r) {
  TestFunctionConfig t;
  r.choice("kind", kTestFns, t.kind);
  r.numbers("center", t.center);
  r.count("index", t.index);
  r.number("level", t.level);
  r.finish();
  return t;
}

json to_json(const ExperimentConfig& c) {
  json params = json::object();
  for (const auto& [k, v] : c.map.params) params[k] = v;

  const auto& a = c.analysis;
  json analysis = {
      {"ratio", a.ratio ? spec_json(*a.ratio) : json(nullptr)},
      {"tail_fraction", a.tail_fraction},
      {"bands", a.bands ? json{{"lower", spec_json(a.bands->lower)},
                                {"upper", spec_json(a.bands->upper)},
                                {"n_min", a.bands->n_min},
                                {"min_frac_inside", a.bands->min_frac_inside}}
                        : json(nullptr)},
      {"dichotomy",
       a.dichotomy ? json{{"spec", spec_json(a.dichotomy->spec)},
                          {"min_orbits", a.dichotomy->thresholds.min_orbits},
                          {"min_dyadic", a.dichotomy->thresholds.min_dyadic},
                          {"decades", a.dichotomy->thresholds.decades},
                          {"limit_spread", a.dichotomy->thresholds.limit_spread},
                          {"limit_orbit_ratio", a.dichotomy->thresholds.limit_orbit_ratio},
                          {"nolimit_ratio", a.dichotomy->thresholds.nolimit_ratio},
                          {"nolimit_fraction", a.dichotomy->thresholds.nolimit_fraction}}
                   : json(nullptr)},
      {"dimension",
       {{"r_max", a.dimension.r_max},
        {"r_min", a.dimension.r_min},
        {"points", a.dimension.points},
        {"annulus_r", a.dimension.annulus_r},
        {"eps_max", a.dimension.eps_max},
        {"eps_min", a.dimension.eps_min},
        {"eps_points", a.dimension.eps_points}}},
      {"decay",
       {{"g1", test_fn_json(a.decay.g1)},
        {"g2", test_fn_json(a.decay.g2)},
        {"dense", a.decay.dense},
        {"max_lag", a.decay.max_lag},
        {"lag_ratio", a.decay.lag_ratio},
        {"floor_multiplier", a.decay.floor_multiplier}}},
      {"short_return", a.short_return ? json{{"radius", a.short_return->radius},
                                             {"k_max", a.short_return->k_max},
                                             {"probe_len", a.short_return->probe_len},
                                             {"alpha", a.short_return->alpha}}
                                      : json(nullptr)},
      {"iid", tail_json(a.iid)},
      {"classify",
       {{"model", asymptotics::to_string(a.classify.model.kind)},
        {"gamma", a.classify.model.gamma},
        {"spec", spec_json(a.classify.spec)},
        {"horizon", a.classify.horizon}}},
  };

  return {
      {"kind", to_string(c.kind)},
      {"map", {{"id", dynamics::to_string(c.map.id)}, {"params", params}}},
      {"observable",
       {{"kind", obs::to_string(c.observable.kind)},
        {"alpha", c.observable.alpha},
        {"cap", c.observable.cap},
        {"eps_floor", c.observable.eps_floor}}},
      {"target",
       {{"mode", enum_name(kTargetModes, c.target.mode)},
        {"point", c.target.point},
        {"period", c.target.period},
        {"index", c.target.index},
        {"exclusion_radius", c.target.exclusion_radius},
        {"exclusion_period", c.target.exclusion_period}}},
      {"n_max", c.n_max},
      {"burn_in", c.burn_in},
      {"n_orbits", c.n_orbits},
      {"seed", c.seed},
      {"jitter", c.jitter ? json(*c.jitter) : json(nullptr)},
      {"checkpoints", {{"ratio", c.checkpoints.ratio}, {"points", c.checkpoints.points}}},
      {"schedule",
       {{"rule", enum_name(kRules, c.schedule.rule)},
        {"beta", c.schedule.beta},
        {"radii", c.schedule.radii},
        {"measure", enum_name(kMeasures, c.schedule.measure)},
        {"n_cal", c.schedule.n_cal},
        {"keep_hit_times", c.schedule.keep_hit_times},
        {"fit_e_min", c.schedule.fit_e_min},
        {"fit_e_max", c.schedule.fit_e_max}}},
      {"analysis", analysis},
      {"output_dir", c.output_dir},
  };
}

ExperimentConfig from_json(const json& j) {
  ExperimentConfig c;
  Reader r(j, "");
  r.parsed("kind", parse_run_kind, c.kind);
  {
    auto m = r.child("map");
    m.parsed("id", dynamics::parse_map_id, c.map.id);
    if (const auto* p = m.find("params")) {
      if (!p->is_object()) invalid(m.at("params"), "expected an object");
      for (auto it = p->begin(); it != p->end(); ++it) {
        if (!it->is_number()) invalid(m.at("params") + "." + it.key(), "expected a number");
        c.map.params[it.key()] = it->get<double>();
      }
    }
    m.finish();
  }
  {
    auto o = r.child("observable");
    o.parsed("kind", obs::parse_observable_kind, c.observable.kind);
    o.number("alpha", c.observable.alpha);
    o.number("cap", c.observable.cap);
    o.number("eps_floor", c.observable.eps_floor);
    o.finish();
  }
  {
    auto t = r.child("target");
    t.choice("mode", kTargetModes, c.target.mode);
    t.numbers("point", c.target.point);
    t.integer("period", c.target.period);
    t.count("index", c.target.index);
    t.number("exclusion_radius", c.target.exclusion_radius);
    t.integer("exclusion_period", c.target.exclusion_period);
    t.finish();
  }
  r.count("n_max", c.n_max);
  r.count("burn_in", c.burn_in);
  r.count("n_orbits", c.n_orbits);
  r.count("seed", c.seed);
  if (r.has("jitter")) {
    double v = 0.0;
    r.number("jitter", v);
    c.jitter = v;
  }
  {
    auto k = r.child("checkpoints");
    k.number("ratio", c.checkpoints.ratio);
    k.numbers("points", c.checkpoints.points);
    k.finish();
  }
  {
    auto s = r.child("schedule");
    s.choice("rule", kRules, c.schedule.rule);
    s.number("beta", c.schedule.beta);
    s.numbers("radii", c.schedule.radii);
    s.choice("measure", kMeasures, c.schedule.measure);
    s.count("n_cal", c.schedule.n_cal);
    s.boolean("keep_hit_times", c.schedule.keep_hit_times);
    s.number("fit_e_min", c.schedule.fit_e_min);
    s.number("fit_e_max", c.schedule.fit_e_max);
    s.finish();
  }
  {
    auto a = r.child("analysis");
    auto& out = c.analysis;
    if (a.has("ratio")) out.ratio = read_spec(a.child("ratio"));
    a.number("tail_fraction", out.tail_fraction);
    if (a.has("bands")) {
      auto b = a.child("bands");
      BandConfig bc;
      if (b.has("lower")) bc.lower = read_spec(b.child("lower"));
      if (b.has("upper")) bc.upper = read_spec(b.child("upper"));
      b.count("n_min", bc.n_min);
      b.number("min_frac_inside", bc.min_frac_inside);
      b.finish();
      out.bands = bc;
    }
    if (a.has("dichotomy")) {
      auto d = a.child("dichotomy");
      DichotomyRunConfig dc;
      if (d.has("spec")) dc.spec = read_spec(d.child("spec"));
      std::uint64_t v = dc.thresholds.min_orbits;
      d.count("min_orbits", v);
      dc.thresholds.min_orbits = v;
      v = dc.thresholds.min_dyadic;
      d.count("min_dyadic", v);
      dc.thresholds.min_dyadic = v;
      d.number("decades", dc.thresholds.decades);
      d.number("limit_spread", dc.thresholds.limit_spread);
      d.number("limit_orbit_ratio", dc.thresholds.limit_orbit_ratio);
      d.number("nolimit_ratio", dc.thresholds.nolimit_ratio);
      d.number("nolimit_fraction", dc.thresholds.nolimit_fraction);
      d.finish();
      out.dichotomy = dc;
    }
    {
      auto d = a.child("dimension");
      d.number("r_max", out.dimension.r_max);
      d.number("r_min", out.dimension.r_min);
      d.count("points", out.dimension.points);
      d.number("annulus_r", out.dimension.annulus_r);
      d.number("eps_max", out.dimension.eps_max);
      d.number("eps_min", out.dimension.eps_min);
      d.count("eps_points", out.dimension.eps_points);
      d.finish();
    }
    {
      auto d = a.child("decay");
      if (d.has("g1")) out.decay.g1 = read_test_fn(d.child("g1"));
      if (d.has("g2")) out.decay.g2 = read_test_fn(d.child("g2"));
      d.count("dense", out.decay.dense);
      d.count("max_lag", out.decay.max_lag);
      d.number("lag_ratio", out.decay.lag_ratio);
      d.number("floor_multiplier", out.decay.floor_multiplier);
      d.finish();
    }
    if (a.has("short_return")) {
      auto s = a.child("short_return");
      ShortReturnConfig sc;
      s.number("radius", sc.radius);
      s.count("k_max", sc.k_max);
      s.count("probe_len", sc.probe_len);
      s.number("alpha", sc.alpha);
      s.finish();
      out.short_return = sc;
    }
    {
      auto t = a.child("iid");
      out.iid = read_tail(t);
      t.finish();
    }
    {
      auto t = a.child("classify");
      out.classify.model = read_tail(t);
      if (t.has("spec")) out.classify.spec = read_spec(t.child("spec"));
      t.count("horizon", out.classify.horizon);
      t.finish();
    }
    a.finish();
  }
  r.string("output_dir", c.output_dir);
  r.finish();
  return c;
}

void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) invalid(path, what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_spec(const asymptotics::SequenceSpec& s, const std::string& path) {
  check(std::isfinite(s.param) && std::isfinite(s.polylog), path, "parameters must be finite");
  if (s.form == asymptotics::SequenceSpec::Form::Explicit)
    check(!s.values.empty(), path + ".values", "explicit sequence is empty");
}

}  // namespace

std::string_view to_string(RunKind kind) { return enum_name(kKindNames, kind); }

std::optional<RunKind> parse_run_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

asymptotics::TailModel TailConfig::model() const {
  switch (kind) {
    case asymptotics::TailModel::Kind::Exponential: return asymptotics::TailModel::exponential();
    case asymptotics::TailModel::Kind::Pareto: return asymptotics::TailModel::pareto(gamma);
    case asymptotics::TailModel::Kind::Gaussian: return asymptotics::TailModel::gaussian();
  }
  return asymptotics::TailModel::exponential();
}

void ExperimentConfig::validate() const {
  check(n_orbits >= 1, "n_orbits", "must be >= 1");
  check(n_max >= 1, "n_max", "must be >= 1");
  try {
    (void)dynamics::MapSystem::make(map.id, map.params);
  } catch (const Error& e) {
    invalid("map", e.what());
  }
  check(std::isfinite(observable.alpha) && observable.alpha > 0.0, "observable.alpha",
        "must be positive");
  check(std::isfinite(observable.cap), "observable.cap", "must be finite");
  check(finite_positive(observable.eps_floor), "observable.eps_floor", "must be positive");
  if (jitter) check(std::isfinite(*jitter) && *jitter >= 0.0, "jitter", "must be non-negative");

  const int dim = dynamics::MapSystem::make(map.id, map.params).dim();
  switch (target.mode) {
    case TargetConfig::Mode::Explicit:
      check(target.point.size() == static_cast<std::size_t>(dim), "target.point",
            "needs " + std::to_string(dim) + " coordinate(s)");
      for (double v : target.point) check(std::isfinite(v), "target.point", "must be finite");
      break;
    case TargetConfig::Mode::Periodic:
      check(target.period >= 1 && target.period <= 12, "target.period", "must lie in [1, 12]");
      break;
    case TargetConfig::Mode::Auto:
      check(target.exclusion_radius >= 0.0 && std::isfinite(target.exclusion_radius),
            "target.exclusion_radius", "must be non-negative");
      check(target.exclusion_period >= 0 && target.exclusion_period <= 12,
            "target.exclusion_period", "must lie in [0, 12]");
      break;
  }

  check(std::isfinite(checkpoints.ratio) && checkpoints.ratio > 1.0, "checkpoints.ratio",
        "must exceed 1");
  for (std::size_t i = 0; i < checkpoints.points.size(); ++i) {
    check(checkpoints.points[i] >= 1 && checkpoints.points[i] <= n_max, "checkpoints.points",
          "entries must lie in [1, n_max]");
    if (i > 0)
      check(checkpoints.points[i] > checkpoints.points[i - 1], "checkpoints.points",
            "must be strictly increasing");
  }

  if (kind == RunKind::Bc) {
    if (schedule.rule == ScheduleConfig::Rule::PowerLaw)
      check(schedule.beta > 0.0 && schedule.beta < 1.0, "schedule.beta", "must lie in (0,1)");
    if (schedule.rule == ScheduleConfig::Rule::LogPower)
      check(finite_positive(schedule.beta), "schedule.beta", "must be positive");
    if (schedule.rule == ScheduleConfig::Rule::Explicit)
      check(schedule.radii.size() >= n_max, "schedule.radii", "needs at least n_max entries");
    check(std::isfinite(schedule.fit_e_min) && schedule.fit_e_min > 0.0, "schedule.fit_e_min",
          "must be positive");
    check(std::isfinite(schedule.fit_e_max) && schedule.fit_e_max >= 0.0, "schedule.fit_e_max",
          "must be non-negative");
  }

  const auto& a = analysis;
  check(a.tail_fraction > 0.0 && a.tail_fraction <= 0.5, "analysis.tail_fraction",
        "must lie in (0, 0.5]");
  if (a.ratio) check_spec(*a.ratio, "analysis.ratio");
  if (a.bands) {
    check_spec(a.bands->lower, "analysis.bands.lower");
    check_spec(a.bands->upper, "analysis.bands.upper");
    check(a.bands->min_frac_inside >= 0.0 && a.bands->min_frac_inside <= 1.0,
          "analysis.bands.min_frac_inside", "must lie in [0,1]");
  }
  if (a.dichotomy) {
    check_spec(a.dichotomy->spec, "analysis.dichotomy.spec");
    const auto& t = a.dichotomy->thresholds;
    check(finite_positive(t.decades), "analysis.dichotomy.decades", "must be positive");
    check(finite_positive(t.limit_spread), "analysis.dichotomy.limit_spread", "must be positive");
    check(t.limit_orbit_ratio > 1.0, "analysis.dichotomy.limit_orbit_ratio", "must exceed 1");
    check(t.nolimit_ratio > 1.0, "analysis.dichotomy.nolimit_ratio", "must exceed 1");
    check(t.nolimit_fraction > 0.0 && t.nolimit_fraction <= 1.0,
          "analysis.dichotomy.nolimit_fraction", "must lie in (0,1]");
  }
  if (kind == RunKind::Dim) {
    const auto& d = a.dimension;
    check(finite_positive(d.r_min) && d.r_max > d.r_min, "analysis.dimension",
          "needs r_max > r_min > 0");
    check(d.points >= 2, "analysis.dimension.points", "must be >= 2");
    if (d.annulus_r > 0.0) {
      check(finite_positive(d.eps_min) && d.eps_max > d.eps_min && d.eps_max < d.annulus_r,
            "analysis.dimension", "needs annulus_r > eps_max > eps_min > 0");
      check(d.eps_points >= 2, "analysis.dimension.eps_points", "must be >= 2");
    }
  }
  if (kind == RunKind::Decay) {
    check(a.decay.max_lag >= 1, "analysis.decay.max_lag", "must be >= 1");
    check(a.decay.max_lag < n_max, "analysis.decay.max_lag", "must be below n_max");
    check(a.decay.lag_ratio > 1.0, "analysis.decay.lag_ratio", "must exceed 1");
    for (const auto* g : {&a.decay.g1, &a.decay.g2}) {
      if (g->kind == measure::TestFunction::Kind::Dist)
        check(g->center.size() == static_cast<std::size_t>(dim), "analysis.decay",
              "Dist test function needs a center of the map's dimension");
      if (g->kind == measure::TestFunction::Kind::Coord ||
          g->kind == measure::TestFunction::Kind::Hinge)
        check(g->index < static_cast<std::uint64_t>(dim), "analysis.decay",
              "test function index exceeds the map's dimension");
    }
  }
  if (a.short_return) {
    check(finite_positive(a.short_return->radius), "analysis.short_return.radius",
          "must be positive");
    check(a.short_return->k_max >= 1 && a.short_return->probe_len >= 1, "analysis.short_return",
          "k_max and probe_len must be >= 1");
    check(finite_positive(a.short_return->alpha), "analysis.short_return.alpha",
          "must be positive");
  }
  if (kind == RunKind::Iid && a.iid.kind == asymptotics::TailModel::Kind::Pareto)
    check(finite_positive(a.iid.gamma), "analysis.iid.gamma", "must be positive");
  if (kind == RunKind::Classify) {
    check(a.classify.horizon >= 1000000, "analysis.classify.horizon", "must be >= 10^6");
    check_spec(a.classify.spec, "analysis.classify.spec");
    if (a.classify.model.kind == asymptotics::TailModel::Kind::Pareto)
      check(finite_positive(a.classify.model.gamma), "analysis.classify.gamma", "must be positive");
  }
}

double ExperimentConfig::effective_jitter() const {
  if (jitter) return *jitter;
  return (map.id == dynamics::MapId::Tent || map.id == dynamics::MapId::Doubling) ? kAutoJitter
                                                                                  : 0.0;
}

std::vector<std::uint64_t> ExperimentConfig::checkpoint_grid() const {
  if (!checkpoints.points.empty()) return checkpoints.points;
  return obs::geometric_checkpoints(n_max, checkpoints.ratio);
}

std::string serialize(const ExperimentConfig& config) { return to_json(config).dump(2); }

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigInvalid, std::string("<root>: malformed JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigInvalid, std::string("<root>: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_hash(const ExperimentConfig& config) {
  auto c = config;
  c.output_dir.clear();
  const auto text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace ergomax::harness
