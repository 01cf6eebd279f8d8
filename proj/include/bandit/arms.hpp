#pragma once

#include <utility>
#include <vector>

#include "bandit/distributions.hpp"

namespace bandit {

/// One arm: a payoff distribution plus its analytic first two moments.
struct Arm {
  int id = 0;
  PayoffDistribution distribution;
  double mean = 0.0;
  double variance = 0.0;

  static Arm make(int id, PayoffDistribution dist);
};

/// A finite set of arms together with the moment envelope and the indices of
/// the arms that are extreme points of the (mean, variance) cloud. Only those
/// matter for limiting values.
struct ArmSet {
  std::vector<Arm> arms;
  double mu_max = 0.0;
  double mu_min = 0.0;
  double var_max = 0.0;
  double var_min = 0.0;
  std::vector<int> extreme;  // sorted indices into arms

  int size() const { return static_cast<int>(arms.size()); }
  const Arm& operator[](int k) const { return arms[k]; }
};

/// Build an ArmSet: validates non-emptiness, fills the moment envelope and
/// the extreme-point indices.
ArmSet compute_bounds(std::vector<Arm> arms);

/// Indices (sorted, ascending) of the convex-hull vertices of a point cloud.
/// Edge-interior and interior points are excluded; exact duplicates keep the
/// lowest index. Cross products within 1e-12 of zero count as collinear.
std::vector<int> extreme_points(
    const std::vector<std::pair<double, double>>& points);

struct GDriverResult {
  double value = 0.0;
  int argmax = 0;  // arm index attaining the max (lowest index on ties)
};

/// Hamiltonian of the limiting control problem:
///   G(p, q) = max_k [ mu_k * p + 0.5 * var_k * q ].
/// With restrict_to_extreme the max runs over hull vertices only; the result
/// is identical by convexity.
GDriverResult g_driver(const ArmSet& set, double p, double q,
                       bool restrict_to_extreme = false);

/// Threshold constants for the two-arm comparison (mu1 > mu2, sigma1 >
/// sigma2 > 0, sigma the standard deviation):
///   ratio       = (mu1 - mu2) / (sigma1^2 - sigma2^2)
///   alpha_low   = 2 (mu1 - mu2) / ((sigma1 + 2 sigma2)(sigma1 - sigma2))
///   alpha_high  = 2 (mu1 - mu2) / (sigma2 (sigma1 - sigma2))
///   alpha_low_prime = 2 (mu1 - mu2) sigma1 / (sigma1 - sigma2)
/// Always ratio < alpha_low < alpha_high.
struct Thresholds {
  double ratio = 0.0;
  double alpha_low = 0.0;
  double alpha_high = 0.0;
  double alpha_low_prime = 0.0;
};

Thresholds thresholds(const Arm& arm1, const Arm& arm2);
Thresholds thresholds(double mu1, double sigma1, double mu2, double sigma2);

}  // namespace bandit
