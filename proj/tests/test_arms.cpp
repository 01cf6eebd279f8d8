#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "bandit/arms.hpp"
#include "bandit/errors.hpp"
#include "doctest.h"

using namespace bandit;

TEST_CASE("analytic moments for every distribution kind") {
  Arm a = Arm::make(0, PayoffDistribution::two_point(-1, 3, 0.5));
  CHECK(a.mean == 1.0);
  CHECK(a.variance == 4.0);

  Arm b = Arm::make(1, PayoffDistribution::two_point(-1, 1, 0.5));
  CHECK(b.mean == 0.0);
  CHECK(b.variance == 1.0);

  Arm c = Arm::make(2, PayoffDistribution::discrete_finite({1, 2, 3},
                                                           {0.2, 0.3, 0.5}));
  CHECK(c.mean == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(c.variance == doctest::Approx(0.61).epsilon(1e-12));

  Arm d = Arm::make(3, PayoffDistribution::normal(1.5, 2.25));
  CHECK(d.mean == 1.5);
  CHECK(d.variance == 2.25);

  Arm e = Arm::make(4, PayoffDistribution::uniform(-1, 3));
  CHECK(e.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.variance == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

  Arm f = Arm::make(5, PayoffDistribution::constant(2));
  CHECK(f.mean == 2.0);
  CHECK(f.variance == 0.0);
}

TEST_CASE("distribution parameter validation") {
  CHECK_THROWS_AS(PayoffDistribution::two_point(1, -1, 0.5), ConfigError);
  CHECK_THROWS_AS(PayoffDistribution::two_point(-1, 1, 1.5), ConfigError);
  CHECK_THROWS_AS(PayoffDistribution::two_point(-1, 1, -0.1), ConfigError);
  CHECK_THROWS_AS(PayoffDistribution::discrete_finite({1, 2}, {0.6, 0.5}),
                  ConfigError);
  CHECK_THROWS_AS(PayoffDistribution::discrete_finite({1, 2}, {1.2, -0.2}),
                  ConfigError);
  CHECK_THROWS_AS(PayoffDistribution::discrete_finite({1}, {0.5, 0.5}),
                  ConfigError);
  CHECK_THROWS_AS(PayoffDistribution::normal(0, -1), ConfigError);
  CHECK_THROWS_AS(PayoffDistribution::uniform(2, 1), ConfigError);
  CHECK_THROWS_AS(
      PayoffDistribution::normal(std::nan(""), 1), ConfigError);
}

TEST_CASE("moment envelope over a set") {
  std::vector<Arm> arms;
  arms.push_back(Arm::make(0, PayoffDistribution::normal(1, 4)));
  arms.push_back(Arm::make(1, PayoffDistribution::normal(-2, 1)));
  arms.push_back(Arm::make(2, PayoffDistribution::normal(0.5, 9)));
  ArmSet set = compute_bounds(std::move(arms));
  CHECK(set.mu_max == 1.0);
  CHECK(set.mu_min == -2.0);
  CHECK(set.var_max == 9.0);
  CHECK(set.var_min == 1.0);
  CHECK_THROWS_AS(compute_bounds({}), ConfigError);
}

namespace {

using Pt = std::pair<double, double>;

// Independent hull oracle: gift wrapping with exact integer cross products.
// Emits strict vertices only (collinear and duplicate points excluded),
// mapped to the lowest index holding each vertex value.
std::vector<int> jarvis_vertices(const std::vector<Pt>& pts) {
  const int n = static_cast<int>(pts.size());
  // Deduplicate by value, keeping the lowest index.
  std::vector<int> uniq;
  for (int i = 0; i < n; ++i) {
    bool dup = false;
    for (int j : uniq)
      if (pts[j] == pts[i]) dup = true;
    if (!dup) uniq.push_back(i);
  }
  if (uniq.size() == 1) return uniq;
  auto cross = [&](int o, int a, int b) {
    const long long ox = llround(pts[o].first), oy = llround(pts[o].second);
    const long long ax = llround(pts[a].first), ay = llround(pts[a].second);
    const long long bx = llround(pts[b].first), by = llround(pts[b].second);
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
  };
  auto dist2 = [&](int a, int b) {
    const long long dx = llround(pts[a].first) - llround(pts[b].first);
    const long long dy = llround(pts[a].second) - llround(pts[b].second);
    return dx * dx + dy * dy;
  };
  int start = uniq[0];
  for (int i : uniq)
    if (pts[i] < pts[start]) start = i;
  std::vector<int> hull;
  int cur = start;
  do {
    hull.push_back(cur);
    int cand = -1;
    for (int i : uniq) {
      if (i == cur) continue;
      if (cand < 0) {
        cand = i;
        continue;
      }
      const long long c = cross(cur, cand, i);
      if (c < 0 || (c == 0 && dist2(cur, i) > dist2(cur, cand))) cand = i;
    }
    cur = cand;
  } while (cur != start);
  // Two distinct collinear-only points: jarvis yields both endpoints; for a
  // degenerate all-collinear cloud it yields the two extremes, which matches
  // the strict-hull semantics.
  std::sort(hull.begin(), hull.end());
  hull.erase(std::unique(hull.begin(), hull.end()), hull.end());
  return hull;
}

}  // namespace

TEST_CASE("extreme points: handcrafted cases") {
  CHECK(extreme_points({{2, 3}}) == std::vector<int>{0});
  CHECK(extreme_points({{0, 0}, {1, 1}}) == std::vector<int>{0, 1});
  CHECK(extreme_points({{1, 1}, {1, 1}, {1, 1}}) == std::vector<int>{0});
  // Collinear run: only the endpoints are extreme.
  CHECK(extreme_points({{0, 0}, {1, 1}, {2, 2}, {3, 3}}) ==
        std::vector<int>{0, 3});
  // Interior of a segment in arbitrary order.
  CHECK(extreme_points({{1, 4}, {0, 1}, {0.5, 2.5}}) ==
        std::vector<int>{0, 1});
  // Square with center and an edge midpoint: both excluded.
  CHECK(extreme_points({{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {1, 0}}) ==
        std::vector<int>{0, 1, 2, 3});
  // Duplicate vertex keeps the lowest index.
  CHECK(extreme_points({{0, 0}, {2, 0}, {0, 0}, {1, 3}}) ==
        std::vector<int>{0, 1, 3});
}

TEST_CASE("extreme points agree with the gift-wrapping oracle") {
  std::mt19937 gen(20250815);
  std::uniform_int_distribution<int> coord(-9, 9);
  std::uniform_int_distribution<int> count(1, 10);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = count(gen);
    std::vector<Pt> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i)
      pts.push_back({double(coord(gen)), double(coord(gen))});
    CAPTURE(trial);
    CHECK(extreme_points(pts) == jarvis_vertices(pts));
  }
}

namespace {

ArmSet canonical_set() {
  std::vector<Arm> arms;
  arms.push_back(Arm::make(0, PayoffDistribution::normal(1, 4)));
  arms.push_back(Arm::make(1, PayoffDistribution::normal(0, 1)));
  return compute_bounds(std::move(arms));
}

}  // namespace

TEST_CASE("driver G: max over arms, restriction to extremes is exact") {
  std::vector<Arm> arms;
  arms.push_back(Arm::make(0, PayoffDistribution::normal(1, 4)));
  arms.push_back(Arm::make(1, PayoffDistribution::normal(0, 1)));
  arms.push_back(Arm::make(2, PayoffDistribution::normal(0.5, 2.5)));  // edge
  ArmSet set = compute_bounds(std::move(arms));
  CHECK(set.extreme == std::vector<int>{0, 1});

  std::mt19937 gen(7);
  std::uniform_real_distribution<double> pq(-5, 5);
  for (int i = 0; i < 200; ++i) {
    const double p = pq(gen), q = pq(gen);
    const GDriverResult full = g_driver(set, p, q, false);
    const GDriverResult ext = g_driver(set, p, q, true);
    double brute = -1e300;
    for (const Arm& a : set.arms)
      brute = std::max(brute, a.mean * p + 0.5 * a.variance * q);
    CHECK(full.value == doctest::Approx(brute).epsilon(1e-15));
    CHECK(full.value == ext.value);
  }
}

TEST_CASE("driver G: convex, positively homogeneous, monotone in q") {
  ArmSet set = canonical_set();
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> pq(-4, 4);
  std::uniform_real_distribution<double> tpos(0, 3);
  for (int i = 0; i < 200; ++i) {
    const double p1 = pq(gen), q1 = pq(gen), p2 = pq(gen), q2 = pq(gen);
    const double g1 = g_driver(set, p1, q1).value;
    const double g2 = g_driver(set, p2, q2).value;
    const double gm =
        g_driver(set, 0.5 * (p1 + p2), 0.5 * (q1 + q2)).value;
    CHECK(gm <= 0.5 * (g1 + g2) + 1e-12);  // convexity (midpoint)
    const double t = tpos(gen);
    CHECK(g_driver(set, t * p1, t * q1).value ==
          doctest::Approx(t * g1).epsilon(1e-12));
    const double dq = std::abs(pq(gen));
    CHECK(g_driver(set, p1, q1 + dq).value >= g1 - 1e-12);
  }
}

TEST_CASE("driver G: ties resolve to the lowest arm index") {
  std::vector<Arm> arms;
  arms.push_back(Arm::make(0, PayoffDistribution::normal(1, 4)));
  arms.push_back(Arm::make(1, PayoffDistribution::normal(1, 4)));
  ArmSet set = compute_bounds(std::move(arms));
  CHECK(g_driver(set, 1.0, 1.0).argmax == 0);
  CHECK(g_driver(set, -2.0, 0.5).argmax == 0);
}

TEST_CASE("thresholds: canonical instance") {
  const Thresholds th = thresholds(1.0, 2.0, 0.0, 1.0);
  CHECK(th.ratio == 1.0 / 3.0);
  CHECK(th.alpha_low == 0.5);
  CHECK(th.alpha_high == 2.0);
  CHECK(th.alpha_low_prime == 4.0);

  // Arm overload takes std deviations from the variances.
  const Thresholds th2 = thresholds(Arm::make(0, PayoffDistribution::normal(1, 4)),
                                    Arm::make(1, PayoffDistribution::normal(0, 1)));
  CHECK(th2.ratio == th.ratio);
  CHECK(th2.alpha_low == th.alpha_low);
  CHECK(th2.alpha_high == th.alpha_high);
  CHECK(th2.alpha_low_prime == th.alpha_low_prime);
}

TEST_CASE("thresholds: strict chain on random valid instances") {
  std::mt19937 gen(20250815);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double mu2 = 4.0 * unit(gen) - 2.0;
    const double mu1 = mu2 + 3.0 * unit(gen);
    const double s2 = 2.0 * unit(gen);
    const double s1 = s2 + 2.0 * unit(gen);
    CAPTURE(i);
    const Thresholds th = thresholds(mu1, s1, mu2, s2);
    CHECK(th.ratio > 0.0);
    CHECK(th.ratio < th.alpha_low);
    CHECK(th.alpha_low < th.alpha_high);
    CHECK(th.alpha_low_prime > 0.0);
  }
}

TEST_CASE("thresholds: ordering violations are rejected") {
  CHECK_THROWS_AS(thresholds(0.0, 2.0, 1.0, 1.0), ConfigError);  // mu1 < mu2
  CHECK_THROWS_AS(thresholds(1.0, 2.0, 1.0, 1.0), ConfigError);  // mu1 == mu2
  CHECK_THROWS_AS(thresholds(1.0, 1.0, 0.0, 2.0), ConfigError);  // s1 < s2
  CHECK_THROWS_AS(thresholds(1.0, 2.0, 0.0, 2.0), ConfigError);  // s1 == s2
  CHECK_THROWS_AS(thresholds(1.0, 2.0, 0.0, 0.0), ConfigError);  // s2 == 0
  CHECK_THROWS_AS(thresholds(1.0, 2.0, 0.0, -1.0), ConfigError);
}
