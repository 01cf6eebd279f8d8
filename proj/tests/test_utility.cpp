#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <vector>

#include "bandit/arms.hpp"
#include "bandit/errors.hpp"
#include "bandit/quadrature.hpp"
#include "bandit/rng.hpp"
#include "bandit/utility.hpp"
#include "doctest.h"

using namespace bandit;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
const double kNan = std::numeric_limits<double>::quiet_NaN();
}  // namespace

TEST_CASE("phi shapes evaluate and describe themselves") {
  Phi id = Phi::identity();
  CHECK(id(3.5) == 3.5);
  CHECK(id.describe() == "identity");

  Phi e = Phi::exp_neg();
  CHECK(e(0.0) == -1.0);
  CHECK(e(1.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-15));
  CHECK(e.describe() == "exp(-x)");

  Phi q = Phi::neg_quadratic_around(0.5);
  CHECK(q(2.0) == doctest::Approx(-2.25).epsilon(1e-15));
  CHECK(q(0.5) == 0.0);
  CHECK(q.describe() == "neg-quadratic-around(0.5)");

  Phi p = Phi::polynomial({1.0, -2.0, 3.0});
  CHECK(p(2.0) == doctest::Approx(9.0).epsilon(1e-15));  // 1 - 4 + 12
  CHECK(p(0.0) == 1.0);
  CHECK(p.describe() == "poly[1,-2,3]");

  Phi c = Phi::callable([](double z) { return std::sin(z); }, "sin");
  CHECK(c(1.0) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
  CHECK(c.describe() == "sin");
}

TEST_CASE("phi factories reject bad input") {
  CHECK_THROWS_AS(Phi::neg_quadratic_around(kNan), ConfigError);
  CHECK_THROWS_AS(Phi::polynomial({}), ConfigError);
  CHECK_THROWS_AS(Phi::polynomial({1.0, kInf}), ConfigError);
  CHECK_THROWS_AS(Phi::callable(nullptr, "x"), ConfigError);
}

TEST_CASE("pointwise index values for every kind") {
  UtilityIndex mv = UtilityIndex::mean_variance(0.25);
  CHECK(mv(1.0, 2.0) == 0.0);
  CHECK(mv(1.0, -2.0) == 0.0);  // symmetric penalty

  UtilityIndex sv = UtilityIndex::mean_semivariance(0.25);
  CHECK(sv(1.0, -2.0) == 0.0);  // one-sided: only y < 0 is penalised
  CHECK(sv(1.0, 2.0) == 1.0);
  CHECK(sv(1.0, 0.0) == 1.0);

  UtilityIndex sf = UtilityIndex::shortfall(0.4, 0.0);
  CHECK(sf(1.0, -0.01) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(sf(1.0, 0.0) == 1.0);
  CHECK(sf(1.0, 5.0) == 1.0);

  UtilityIndex sfd = UtilityIndex::shortfall(0.4, 0.5);
  CHECK(sfd(1.0, -0.25) == doctest::Approx(0.8).epsilon(1e-15));  // half ramp
  CHECK(sfd(1.0, -1.0) == doctest::Approx(0.6).epsilon(1e-15));   // saturated
  CHECK(sfd(1.0, 0.0) == 1.0);
  CHECK(sfd(1.0, 0.3) == 1.0);

  UtilityIndex ad = UtilityIndex::additive(Phi::identity(), -2.0);
  CHECK(ad(3.0, 1.5) == 0.0);  // x - 2 y

  UtilityIndex bl = UtilityIndex::blend(Phi::exp_neg(), 0.5);
  CHECK(bl(2.0, 0.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-15));

  UtilityIndex cu = UtilityIndex::custom(
      [](double x, double y) { return x * y; }, 1.0, 2.0, "xy");
  CHECK(cu(3.0, -2.0) == -6.0);
  CHECK(eval_index(cu, 3.0, -2.0) == cu(3.0, -2.0));
}

TEST_CASE("index factories validate their parameters") {
  CHECK_THROWS_AS(UtilityIndex::blend(Phi::identity(), 0.0), ConfigError);
  CHECK_THROWS_AS(UtilityIndex::blend(Phi::identity(), 1.2), ConfigError);
  CHECK_NOTHROW(UtilityIndex::blend(Phi::identity(), 1.0));
  CHECK_THROWS_AS(UtilityIndex::mean_variance(-0.1), ConfigError);
  CHECK_THROWS_AS(UtilityIndex::mean_variance(kNan), ConfigError);
  CHECK_THROWS_AS(UtilityIndex::mean_semivariance(-1.0), ConfigError);
  CHECK_THROWS_AS(UtilityIndex::shortfall(-1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(UtilityIndex::shortfall(1.0, -0.5), ConfigError);
  CHECK_NOTHROW(UtilityIndex::shortfall(1.0, 0.0));
  CHECK_THROWS_AS(UtilityIndex::additive(Phi::identity(), kInf), ConfigError);
  CHECK_NOTHROW(UtilityIndex::additive(Phi::identity(), -3.0));
  CHECK_THROWS_AS(UtilityIndex::custom(nullptr, 1.0, 2.0, "u"), ConfigError);
  CHECK_THROWS_AS(UtilityIndex::custom([](double x, double) { return x; }, 1.0,
                                       0.5, "u"),
                  ConfigError);

  UtilityIndex mv = UtilityIndex::mean_variance(1.0);
  CHECK_THROWS_AS(mv(kNan, 0.0), ConfigError);
  CHECK_THROWS_AS(mv(0.0, kInf), ConfigError);
}

TEST_CASE("single-arm limits match closed forms") {
  const double mu = 0.7, s2 = 2.5;

  UtilityIndex mv = UtilityIndex::mean_variance(0.3);
  CHECK(single_arm_limit(mv, mu, s2) == doctest::Approx(mu - 0.3 * s2));

  UtilityIndex sv = UtilityIndex::mean_semivariance(0.3);
  CHECK(single_arm_limit(sv, mu, s2) == doctest::Approx(mu - 0.15 * s2));

  UtilityIndex sf = UtilityIndex::shortfall(0.8, 0.0);
  CHECK(single_arm_limit(sf, mu, s2) == doctest::Approx(mu - 0.4));

  // Additive: the deviation term has mean zero, so only phi(mu) survives.
  UtilityIndex ad = UtilityIndex::additive(Phi::neg_quadratic_around(0.2), 5.0);
  CHECK(single_arm_limit(ad, mu, s2) ==
        doctest::Approx(-(mu - 0.2) * (mu - 0.2)).epsilon(1e-12));

  // Blend with phi = -exp(-z): lognormal moment generating function.
  const double a = 0.5;
  UtilityIndex bl = UtilityIndex::blend(Phi::exp_neg(), a);
  const double expect = -std::exp(-(1.0 - a) * mu + 0.5 * a * a * s2);
  CHECK(single_arm_limit(bl, mu, s2) == doctest::Approx(expect).epsilon(1e-10));

  // Blend with phi = z^2: E[((1-a) mu + a Y)^2] = ((1-a) mu)^2 + a^2 s2.
  UtilityIndex bq = UtilityIndex::blend(Phi::polynomial({0.0, 0.0, 1.0}), a);
  const double expect_q = (1.0 - a) * (1.0 - a) * mu * mu + a * a * s2;
  CHECK(single_arm_limit(bq, mu, s2) ==
        doctest::Approx(expect_q).epsilon(1e-12));
}

TEST_CASE("smoothed shortfall limit agrees with direct integration") {
  const double mu = -0.3, s2 = 1.7, alpha = 0.9, delta = 0.6;
  UtilityIndex sf = UtilityIndex::shortfall(alpha, delta);
  const double got = single_arm_limit(sf, mu, s2);

  const double sd = std::sqrt(s2);
  const double ramp = integrate_real_line([&](double y) {
    const double clamped = std::clamp(-y / delta, 0.0, 1.0);
    return clamped * normal_pdf(y / sd) / sd;
  });
  CHECK(got == doctest::Approx(mu - alpha * ramp).epsilon(1e-9));

  // delta -> 0 recovers the hard indicator value.
  UtilityIndex tight = UtilityIndex::shortfall(alpha, 1e-8);
  CHECK(single_arm_limit(tight, mu, s2) ==
        doctest::Approx(mu - 0.5 * alpha).epsilon(1e-6));
}

TEST_CASE("degenerate variance short-circuits to the point value") {
  UtilityIndex sf = UtilityIndex::shortfall(1.0, 0.0);
  CHECK(single_arm_limit(sf, 0.7, 0.0) == 0.7);  // no deviations, no penalty
  UtilityIndex bl = UtilityIndex::blend(Phi::exp_neg(), 0.4);
  CHECK(single_arm_limit(bl, 0.7, 0.0) == bl(0.7, 0.0));

  CHECK_THROWS_AS(single_arm_limit(sf, kNan, 1.0), ConfigError);
  CHECK_THROWS_AS(single_arm_limit(sf, 0.0, -1.0), ConfigError);
}

TEST_CASE("with_smoothing only applies to the shortfall kind") {
  UtilityIndex sf = UtilityIndex::shortfall(0.7, 0.0);
  UtilityIndex sm = sf.with_smoothing(0.25);
  CHECK(sm.alpha() == 0.7);
  CHECK(sm.smoothing_width() == 0.25);
  CHECK(sf.smoothing_width() == 0.0);  // original untouched
  CHECK_THROWS_AS(UtilityIndex::mean_variance(1.0).with_smoothing(0.1),
                  ConfigError);
}

TEST_CASE("finite-horizon averages and their guards") {
  UtilityIndex mv = UtilityIndex::mean_variance(0.5);
  std::vector<TrajectoryStatistics> batch = {
      {1.0, -2.0, 10},  // u = 1 - 0.5*4 = -1
      {0.5, 1.0, 10},   // u = 0.5 - 0.5 = 0
  };
  CHECK(finite_horizon_utility(mv, batch) == doctest::Approx(-0.5));

  CHECK_THROWS_AS(finite_horizon_utility(mv, {}), ConfigError);
  std::vector<TrajectoryStatistics> mixed = {{0.0, 0.0, 10}, {0.0, 0.0, 11}};
  CHECK_THROWS_AS(finite_horizon_utility(mv, mixed), ConfigError);
}

TEST_CASE("growth bounds are reported for polynomially bounded kinds") {
  UtilityIndex mv = UtilityIndex::mean_variance(0.25);
  CHECK(mv.has_growth_bound());
  CHECK(mv.growth_constant() == 1.25);
  CHECK(mv.growth_exponent() == 3.0);

  UtilityIndex sv = UtilityIndex::mean_semivariance(0.25);
  CHECK(sv.has_growth_bound());
  CHECK(sv.growth_exponent() == 3.0);

  UtilityIndex sf = UtilityIndex::shortfall(0.5, 0.0);
  CHECK(sf.has_growth_bound());
  CHECK(sf.growth_constant() == 1.5);
  CHECK(sf.growth_exponent() == 2.0);

  UtilityIndex ad = UtilityIndex::additive(Phi::polynomial({0.0, 1.0, 1.0}),
                                           2.0);
  CHECK(ad.has_growth_bound());
  CHECK(ad.growth_exponent() >= 3.0);

  // exp decays but has no polynomial envelope on the left tail.
  CHECK_FALSE(UtilityIndex::blend(Phi::exp_neg(), 0.5).has_growth_bound());
  CHECK_FALSE(
      UtilityIndex::additive(Phi::callable([](double z) { return z; }, "lin"),
                             1.0)
          .has_growth_bound());
}

TEST_CASE("index describe strings name the kind") {
  CHECK(UtilityIndex::mean_variance(0.25).describe() ==
        "mean-variance(alpha=0.25)");
  CHECK(UtilityIndex::shortfall(1.0, 0.5).describe() ==
        "shortfall(alpha=1,delta=0.5)");
  CHECK(UtilityIndex::blend(Phi::exp_neg(), 0.9).describe() ==
        "blend(phi=exp(-x),alpha=0.9)");
  CHECK(UtilityIndex::custom([](double x, double) { return x; }, 1.0, 2.0,
                             "just-x")
            .describe() == "just-x");
}

TEST_CASE("specialization certificate: mean-variance is fully analytic") {
  Arm risky = Arm::make(0, PayoffDistribution::normal(1.0, 4.0));
  Arm safe = Arm::make(1, PayoffDistribution::normal(0.0, 1.0));

  // alpha below the (mu1-mu2)/(var1-var2) = 1/3 crossover: risky arm wins.
  auto cert = specialization_certificate(UtilityIndex::mean_variance(0.25),
                                         risky, safe);
  CHECK(cert.analytic);
  CHECK(cert.holds_for_arm1 == CertVerdict::Yes);
  CHECK(cert.holds_for_arm2 == CertVerdict::No);
  CHECK(cert.witness2.has_value());
  CHECK(cert.ratio_bound.has_value());
  CHECK(*cert.ratio_bound == 0.25);

  // above the crossover the verdicts flip.
  auto flip = specialization_certificate(UtilityIndex::mean_variance(0.5),
                                         risky, safe);
  CHECK(flip.holds_for_arm1 == CertVerdict::No);
  CHECK(flip.holds_for_arm2 == CertVerdict::Yes);
}

TEST_CASE("specialization certificate: semivariance splits by deviation sign") {
  Arm risky = Arm::make(0, PayoffDistribution::normal(1.0, 4.0));
  Arm safe = Arm::make(1, PayoffDistribution::normal(0.0, 1.0));

  // Between the two semivariance thresholds neither arm dominates.
  auto cert = specialization_certificate(UtilityIndex::mean_semivariance(1.0),
                                         risky, safe);
  CHECK(cert.analytic);
  CHECK(cert.holds_for_arm1 == CertVerdict::No);
  CHECK(cert.holds_for_arm2 == CertVerdict::No);
  REQUIRE(cert.witness1.has_value());
  REQUIRE(cert.witness2.has_value());
  CHECK(cert.witness1->second == -1.0);  // fails on the downside
  CHECK(cert.witness2->second == 1.0);   // fails on the upside

  // Below the lower threshold (1/2 here) the risky arm dominates everywhere.
  auto low = specialization_certificate(UtilityIndex::mean_semivariance(0.25),
                                        risky, safe);
  CHECK(low.holds_for_arm1 == CertVerdict::Yes);
  CHECK(low.holds_for_arm2 == CertVerdict::No);
}

TEST_CASE("specialization certificate: blend and additive closed forms") {
  Arm risky = Arm::make(0, PayoffDistribution::normal(1.0, 4.0));
  Arm safe = Arm::make(1, PayoffDistribution::normal(0.0, 1.0));

  const double a = 0.8;
  auto cert = specialization_certificate(
      UtilityIndex::blend(Phi::exp_neg(), a), risky, safe);
  CHECK(cert.analytic);
  REQUIRE(cert.ratio_bound.has_value());
  CHECK(*cert.ratio_bound ==
        doctest::Approx(a * a / (2.0 * (1.0 - a))).epsilon(1e-15));
  // (1-a) dmu - a^2/2 dvar = 0.2 - 0.96 < 0: the safe arm dominates.
  CHECK(cert.holds_for_arm1 == CertVerdict::No);
  CHECK(cert.holds_for_arm2 == CertVerdict::Yes);

  auto full = specialization_certificate(
      UtilityIndex::blend(Phi::exp_neg(), 1.0), risky, safe);
  CHECK_FALSE(full.ratio_bound.has_value());  // no finite ratio at alpha = 1

  auto add = specialization_certificate(
      UtilityIndex::additive(Phi::identity(), 3.0), risky, safe);
  CHECK(add.analytic);
  CHECK(add.holds_for_arm1 == CertVerdict::Yes);  // higher mean, no curvature
  CHECK(add.holds_for_arm2 == CertVerdict::No);
}

TEST_CASE("specialization certificate: shortfall needs a smoothing width") {
  Arm risky = Arm::make(0, PayoffDistribution::normal(1.0, 4.0));
  Arm safe = Arm::make(1, PayoffDistribution::normal(0.0, 1.0));
  CHECK_THROWS_AS(specialization_certificate(UtilityIndex::shortfall(1.0, 0.0),
                                             risky, safe),
                  ConfigError);

  // With a ramp the probe grid sees curvature of both signs near the kinks.
  auto cert = specialization_certificate(UtilityIndex::shortfall(1.0, 0.5),
                                         risky, safe);
  CHECK_FALSE(cert.analytic);
  CHECK(cert.holds_for_arm1 == CertVerdict::No);
  CHECK(cert.holds_for_arm2 == CertVerdict::No);
  CHECK(cert.witness1.has_value());
  CHECK(cert.witness2.has_value());
}

TEST_CASE("specialization certificate: probe fallback for custom indices") {
  Arm risky = Arm::make(0, PayoffDistribution::normal(1.0, 4.0));
  Arm safe = Arm::make(1, PayoffDistribution::normal(0.0, 1.0));

  // u = x: flat in y, increasing in x. The sweep can rule out the safe arm
  // but cannot certify the risky one.
  auto cert = specialization_certificate(
      UtilityIndex::custom([](double x, double) { return x; }, 1.0, 1.0, "x"),
      risky, safe);
  CHECK_FALSE(cert.analytic);
  CHECK(cert.holds_for_arm1 == CertVerdict::Inconclusive);
  CHECK(cert.holds_for_arm2 == CertVerdict::No);
  CHECK_FALSE(cert.witness1.has_value());

  CertificateGrid bad;
  bad.points = 1;
  CHECK_THROWS_AS(specialization_certificate(
                      UtilityIndex::custom([](double x, double) { return x; },
                                           1.0, 1.0, "x"),
                      risky, safe, bad),
                  ConfigError);
}
