#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ergomax/dynamics.hpp"
#include "ergomax/observables.hpp"
#include "ergomax/rng.hpp"
#include "oracles.hpp"

using namespace ergomax;
using namespace ergomax::obs;

namespace {

bool within_ulps(double a, double b, int ulps) {
  if (a == b) return true;
  double x = a;
  for (int i = 0; i < ulps; ++i) {
    x = std::nextafter(x, b);
    if (x == b) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("evaluate examples") {
  const auto t = Point::of(0.0);
  CHECK(Observable::neg_log_dist(t).psi(std::exp(-1.0)) == doctest::Approx(1.0));
  CHECK(Observable::power_dist(t, 2.0).psi(0.1) == doctest::Approx(100.0));
  CHECK(Observable::capped_power(t, 5.0, 1.0).psi(0.25) == 4.75);
  CHECK(Observable::sqrt_abs_log_dist(t).psi(std::exp(-4.0)) == doctest::Approx(2.0));
  CHECK(Observable::neg_log_dist(Point::of(0.3)).evaluate(Point::of(0.3)) ==
        doctest::Approx(-std::log(kDefaultEpsFloor)));
}

TEST_CASE("level_radius") {
  const auto t = Point::of(0.5);
  CHECK(Observable::neg_log_dist(t).level_radius(2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(Observable::power_dist(t, 0.5).level_radius(4.0) == doctest::Approx(1.0 / 16.0));
  CHECK(Observable::capped_power(t, 2.0, 2.0).level_radius(1.0) == doctest::Approx(1.0));
  CHECK(Observable::sqrt_abs_log_dist(t).level_radius(1.5) == doctest::Approx(std::exp(-2.25)));
  CHECK_THROWS_AS(Observable::capped_power(t, 1.0, 1.0).level_radius(1.5), Error);
  CHECK_THROWS_AS(Observable::power_dist(t, 1.0).level_radius(-1.0), Error);
}

TEST_CASE("level_radius round trip to 10 ulps") {
  CounterRng rng(31);
  const auto t = Point::of(0.0);
  const std::vector<Observable> family{Observable::neg_log_dist(t), Observable::power_dist(t, 1.0),
                                       Observable::power_dist(t, 0.5),
                                       Observable::sqrt_abs_log_dist(t)};
  for (const auto& o : family) {
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const double u = 1.0 + 20.0 * rng.uniform();
      const double r = o.level_radius(u);
      if (!within_ulps(o.evaluate(Point::of(r)), u, 10)) ++bad;
    }
    CAPTURE(to_string(o.kind()));
    CHECK(bad == 0);
  }
}

TEST_CASE("monotone in distance") {
  CounterRng rng(7);
  std::vector<double> r(2000);
  for (auto& v : r) v = rng.uniform_open();
  std::sort(r.begin(), r.end());
  for (const auto& o : {Observable::neg_log_dist(Point::of(0.0)),
                        Observable::power_dist(Point::of(0.0), 1.5),
                        Observable::capped_power(Point::of(0.0), 1.0, 1.0)}) {
    bool ok = true;
    for (std::size_t i = 1; i < r.size(); ++i)
      if (r[i] > r[i - 1]) ok = ok && o.psi(r[i]) < o.psi(r[i - 1]);
    CHECK(ok);
  }
  CHECK_FALSE(Observable::sqrt_abs_log_dist(Point::of(0.0)).monotone_in_distance());
}

TEST_CASE("max_process examples") {
  const std::vector<double> v{3, 1, 4, 1, 5};
  const std::vector<std::uint64_t> cp{1, 3, 5};
  const auto s = max_process(std::span<const double>(v), cp);
  CHECK(s.values == std::vector<double>{3, 4, 5});
  CHECK(s.record_times == std::vector<std::uint64_t>{1, 3, 5});

  const std::vector<double> sevens(10, 7.0);
  const std::vector<std::uint64_t> cp2{1, 10};
  const auto c = max_process(std::span<const double>(sevens), cp2);
  CHECK(c.values == std::vector<double>{7, 7});
  CHECK(c.record_times == std::vector<std::uint64_t>{1});

  const std::vector<std::uint64_t> too_far{1, 11};
  CHECK_THROWS_AS(max_process(std::span<const double>(sevens), too_far), Error);
  const std::vector<std::uint64_t> not_increasing{3, 3};
  CHECK_THROWS_AS(max_process(std::span<const double>(sevens), not_increasing), Error);
}

TEST_CASE("Tent orbit maximum matches a two-pass recomputation") {
  const auto map = dynamics::MapSystem::tent();
  const auto obs = Observable::neg_log_dist(Point::of(0.3));
  const auto cps = geometric_checkpoints(10000);
  const dynamics::OrbitOptions opts{.burn_in = 0, .jitter = 1e-12, .jitter_key = 3};

  ObservableMaxTracker tracker(obs, cps);
  dynamics::Orbit orbit(map, Point::of(0.311), 10000, opts);
  for (const auto& p : orbit) tracker.push(p);
  const auto s = std::move(tracker).finish();

  std::vector<double> values;
  for (const auto& p : dynamics::collect_orbit(map, Point::of(0.311), 10000, opts))
    values.push_back(obs.evaluate(p));
  CHECK(s == oracle::fold_max(values, cps));
}

TEST_CASE("prefix maximum agrees with the fold oracle on random streams") {
  CounterRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 1 + rng() % 10000;
    std::vector<double> v(n);
    // coarse values force ties
    for (auto& x : v) x = static_cast<double>(rng() % 50) + (trial % 2 ? rng.uniform() : 0.0);
    std::vector<std::uint64_t> cps;
    for (std::uint64_t k = 1; k <= n; k += 1 + rng() % 97) cps.push_back(k);
    const auto s = max_process(std::span<const double>(v), cps);
    CHECK(s == oracle::fold_max(v, cps));
  }
}

TEST_CASE("tracker equals max_process over psi values") {
  CounterRng rng(5);
  const auto cps = geometric_checkpoints(5000);
  for (const auto& o : {Observable::power_dist(Point::of(0.4), 0.7),
                        Observable::sqrt_abs_log_dist(Point::of(0.4))}) {
    ObservableMaxTracker tr(o, cps);
    std::vector<double> vals;
    for (int i = 0; i < 5000; ++i) {
      const auto p = Point::of(rng.uniform());
      tr.push(p);
      vals.push_back(o.evaluate(p));
    }
    CHECK(std::move(tr).finish() == oracle::fold_max(vals, cps));
  }
}

TEST_CASE("clamp hits are counted") {
  ObservableMaxTracker tr(Observable::neg_log_dist(Point::of(0.25), 1e-9), {1, 2, 3});
  tr.push(Point::of(0.25));
  tr.push(Point::of(0.5));
  tr.push(Point::of(0.25 + 1e-12));
  CHECK(tr.clamp_hits() == 2);
  const auto s = std::move(tr).finish();
  CHECK(s.values.back() == doctest::Approx(-std::log(1e-9)));
}

TEST_CASE("geometric checkpoints") {
  const auto c = geometric_checkpoints(100);
  CHECK(c.front() == 1);
  CHECK(c.back() == 100);
  CHECK(std::adjacent_find(c.begin(), c.end(), std::greater_equal<>()) == c.end());
  CHECK(geometric_checkpoints(1) == std::vector<std::uint64_t>{1});
}

TEST_CASE("type_thresholds examples") {
  const auto a = type_thresholds(0.0, 1, 1.0, 1.0);
  CHECK(a.radius == doctest::Approx(1.0));
  CHECK(a.t1 == doctest::Approx(0.0));
  CHECK(a.t2 == doctest::Approx(1.0));
  CHECK(a.t3 == doctest::Approx(0.0));
  const auto b = type_thresholds(1.0, 10, 2.0, 1.0);
  CHECK(b.radius == doctest::Approx(std::exp(-1.0) / 10.0));
  CHECK(b.t2 == doctest::Approx(100.0 * std::exp(2.0)));
}

TEST_CASE("the three exceedance events are one set") {
  CounterRng rng(404);
  for (int round = 0; round < 20; ++round) {
    const double u = 4.0 * rng.uniform() - 1.0;
    const std::uint64_t n = 1 + rng() % 1000;
    const double alpha = 0.2 + 2.0 * rng.uniform();
    const double cap = 0.5 + 2.0 * rng.uniform();
    const auto th = type_thresholds(u, n, alpha, cap);
    const auto target = Point::of(0.5);
    const auto o1 = Observable::neg_log_dist(target);
    const auto o2 = Observable::power_dist(target, alpha);
    const auto o3 = Observable::capped_power(target, cap, alpha);
    int disagreements = 0, inside = 0;
    for (int i = 0; i < 10000; ++i) {
      // half the points near the shared ball boundary
      const double d = i % 2 ? rng.uniform() * 0.5 : th.radius * (0.5 + rng.uniform());
      const auto x = Point::of(0.5 + (i % 4 < 2 ? d : -d));
      const bool e1 = o1.evaluate(x) > th.t1;
      const bool e2 = o2.evaluate(x) > th.t2;
      const bool e3 = o3.evaluate(x) > th.t3;
      disagreements += (e1 != e2) || (e1 != e3);
      inside += e1;
    }
    CHECK(disagreements == 0);
    CHECK(inside > 0);
  }
}

TEST_CASE("record sparsity (diagnostic)") {
  int sparse = 0;
  const std::uint64_t n = 10000;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    CounterRng rng(stream_key(seed, 77));
    MaxProcessBuilder b({n});
    for (std::uint64_t i = 0; i < n; ++i) b.push(rng.uniform());
    const auto s = std::move(b).finish();
    sparse += s.record_times.size() <= 3.0 * std::log(static_cast<double>(n));
  }
  if (sparse < 990) MESSAGE("record sparsity below 99%: " << sparse << "/1000");
  WARN(sparse >= 990);
}
