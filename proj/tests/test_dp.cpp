#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bandit/arms.hpp"
#include "bandit/errors.hpp"
#include "bandit/exact_dp.hpp"
#include "bandit/utility.hpp"
#include "doctest.h"

using namespace bandit;

namespace {

ArmSet make_set(std::vector<PayoffDistribution> dists) {
  std::vector<Arm> arms;
  for (size_t i = 0; i < dists.size(); ++i)
    arms.push_back(Arm::make(static_cast<int>(i), dists[i]));
  return compute_bounds(std::move(arms));
}

// Independent oracle: backward induction over full histories (not tallies).
// Exponential in n, fine for n <= 4.
double history_tree_value(const ArmSet& set, const UtilityIndex& u, int n,
                          std::vector<int>& arms_taken,
                          std::vector<double>& payoffs) {
  const int t = static_cast<int>(arms_taken.size());
  if (t == n) {
    double pay = 0.0, dev = 0.0;
    for (int i = 0; i < n; ++i) {
      pay += payoffs[i];
      dev += payoffs[i] - set[arms_taken[i]].mean;
    }
    return u(pay / n, dev / std::sqrt(static_cast<double>(n)));
  }
  double best = -1e300;
  for (int k = 0; k < set.size(); ++k) {
    double expect = 0.0;
    for (const auto& [z, p] : set[k].distribution.support()) {
      arms_taken.push_back(k);
      payoffs.push_back(z);
      expect += p * history_tree_value(set, u, n, arms_taken, payoffs);
      arms_taken.pop_back();
      payoffs.pop_back();
    }
    best = std::max(best, expect);
  }
  return best;
}

double history_tree_value(const ArmSet& set, const UtilityIndex& u, int n) {
  std::vector<int> arms_taken;
  std::vector<double> payoffs;
  return history_tree_value(set, u, n, arms_taken, payoffs);
}

}  // namespace

TEST_CASE("one-stage values enumerate by hand") {
  ArmSet set = make_set({PayoffDistribution::two_point(-1.0, 3.0, 0.5),
                         PayoffDistribution::two_point(-1.0, 1.0, 0.5)});
  // arm 0: payoffs ±2 around mean 1, u = (-5 + 3)/2 = -1
  // arm 1: payoffs ±1 around mean 0, u = (-2 + 1)/2 = -0.5
  DpResult r = exact_value_dp(set, UtilityIndex::mean_semivariance(1.0), 1);
  CHECK(r.value == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(r.first_arm == 1);
  CHECK(r.exact);
}

TEST_CASE("two-stage sharp shortfall enumerates by hand") {
  ArmSet set = make_set({PayoffDistribution::two_point(-1.0, 1.0, 0.5)});
  // (-1,-1): u = -1 - 1 = -2; mixed: u = 0; (1,1): u = 1.
  DpResult r = exact_value_dp(set, UtilityIndex::shortfall(1.0, 0.0), 2);
  CHECK(r.value == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(r.exact);
}

TEST_CASE("tally dp matches full history-tree induction") {
  ArmSet set = make_set({PayoffDistribution::two_point(-1.0, 3.0, 0.5),
                         PayoffDistribution::two_point(-1.0, 1.0, 0.5)});
  for (const UtilityIndex& u :
       {UtilityIndex::mean_semivariance(1.0), UtilityIndex::mean_variance(0.3),
        UtilityIndex::shortfall(0.5, 0.0)}) {
    for (int n = 1; n <= 4; ++n) {
      const double oracle = history_tree_value(set, u, n);
      const DpResult dp = exact_value_dp(set, u, n);
      CAPTURE(u.describe());
      CAPTURE(n);
      CHECK(dp.value == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("mean-variance value depends only on first two moments") {
  // Same (mean, variance) = (1, 4), different higher moments.
  ArmSet a = make_set({PayoffDistribution::two_point(-1.0, 3.0, 0.5)});
  ArmSet b = make_set({PayoffDistribution::discrete_finite(
      {-3.0, 1.0, 5.0}, {0.125, 0.75, 0.125})});
  UtilityIndex u = UtilityIndex::mean_variance(0.3);
  for (int n : {1, 3, 6}) {
    const DpResult ra = exact_value_dp(a, u, n);
    const DpResult rb = exact_value_dp(b, u, n);
    CHECK(ra.value == doctest::Approx(-0.2).epsilon(1e-13));  // 1 - 0.3*4
    CHECK(rb.value == doctest::Approx(ra.value).epsilon(1e-13));
  }
}

TEST_CASE("specialization closed form holds at every horizon") {
  ArmSet set = make_set({PayoffDistribution::two_point(-1.0, 3.0, 0.5),
                         PayoffDistribution::two_point(-1.0, 1.0, 0.5)});
  UtilityIndex u = UtilityIndex::mean_variance(0.25);
  for (int n : {1, 2, 5, 8, 12}) {
    const DpResult r = exact_value_dp(set, u, n);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));  // max(0, -0.25)
    CHECK(r.first_arm == 0);
    CHECK(r.exact);
  }
}

TEST_CASE("rational and floating evaluation agree") {
  ArmSet set = make_set({PayoffDistribution::two_point(-1.0, 3.0, 0.5),
                         PayoffDistribution::two_point(-1.0, 1.0, 0.5)});
  const double alpha = 0.7;
  UtilityIndex builtin = UtilityIndex::mean_semivariance(alpha);
  UtilityIndex lowered = UtilityIndex::custom(
      [alpha](double x, double y) {
        return y < 0.0 ? x - alpha * y * y : x;
      },
      1.0 + alpha, 3.0, "semivariance-lowered");
  const DpResult r1 = exact_value_dp(set, builtin, 6);
  const DpResult r2 = exact_value_dp(set, lowered, 6);
  CHECK(r1.exact);
  CHECK_FALSE(r2.exact);
  CHECK(std::fabs(r1.value - r2.value) <= 1e-13);
}

TEST_CASE("ties resolve to the lowest arm index") {
  ArmSet set = make_set({PayoffDistribution::two_point(-1.0, 1.0, 0.5),
                         PayoffDistribution::two_point(-1.0, 1.0, 0.5)});
  const DpResult r = exact_value_dp(set, UtilityIndex::mean_variance(0.5), 3);
  CHECK(r.first_arm == 0);
}

TEST_CASE("dp guards horizon, support and state budget") {
  ArmSet set = make_set({PayoffDistribution::two_point(-1.0, 3.0, 0.5),
                         PayoffDistribution::two_point(-1.0, 1.0, 0.5)});
  UtilityIndex u = UtilityIndex::mean_variance(0.5);
  CHECK_THROWS_AS(exact_value_dp(set, u, 0), ConfigError);
  CHECK_THROWS_AS(exact_value_dp(set, u, 25), ConfigError);

  ArmSet cont = make_set({PayoffDistribution::normal(1.0, 4.0)});
  try {
    exact_value_dp(cont, u, 4);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("arm 0") != std::string::npos);
  }

  // 6 two-point arms at n = 24: C(36,12) ~ 1.25e9 tallies, over budget.
  std::vector<PayoffDistribution> many(
      6, PayoffDistribution::two_point(-1.0, 1.0, 0.5));
  ArmSet big = make_set(many);
  CHECK_THROWS_AS(exact_value_dp(big, u, 24), ResourceError);
}
