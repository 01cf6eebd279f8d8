#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bandit/arms.hpp"

namespace bandit {

/// Scalar shape function used by the additive and blend kinds.
class Phi {
 public:
  enum class Kind { Identity, ExpNeg, NegQuadraticAround, Polynomial, Callable };

  static Phi identity();
  static Phi exp_neg();                       // z -> -exp(-z)
  static Phi neg_quadratic_around(double c);  // z -> -(z - c)^2
  static Phi polynomial(std::vector<double> coeffs);  // c0 + c1 z + ...
  static Phi callable(std::function<double(double)> f,
                      std::string label = "callable");

  double operator()(double z) const;
  Kind kind() const { return kind_; }
  double center() const { return center_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::string describe() const;

 private:
  Phi() = default;
  Kind kind_ = Kind::Identity;
  double center_ = 0.0;
  std::vector<double> coeffs_;
  std::function<double(double)> fn_;
  std::string label_;
};

enum class UtilityKind {
  Additive,         // phi(x) + alpha * y
  Blend,            // phi((1-alpha) x + alpha y), 0 < alpha <= 1
  MeanVariance,     // x - alpha * y^2
  MeanSemivariance, // x - alpha * y^2 * 1{y < 0}
  Shortfall,        // x - alpha * 1{y < 0}; delta > 0 replaces the indicator
                    // by the ramp clamp(-y/delta, 0, 1)
  Custom,
};

/// Two-attribute index u(x, y) over (sample mean, scaled deviation).
class UtilityIndex {
 public:
  static UtilityIndex additive(Phi phi, double alpha);
  static UtilityIndex blend(Phi phi, double alpha);
  static UtilityIndex mean_variance(double alpha);
  static UtilityIndex mean_semivariance(double alpha);
  static UtilityIndex shortfall(double alpha, double delta = 0.0);
  static UtilityIndex custom(std::function<double(double, double)> fn,
                             double growth_constant, double growth_exponent,
                             std::string label = "custom");

  /// Evaluate the index; rejects non-finite inputs.
  double operator()(double x, double y) const;

  UtilityKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double smoothing_width() const { return delta_; }
  const Phi& phi() const { return phi_; }

  /// Declared polynomial growth bound |u(z)| <= c (1 + |z|^(g-1)), if any.
  bool has_growth_bound() const { return has_growth_; }
  double growth_constant() const { return growth_c_; }
  double growth_exponent() const { return growth_g_; }

  /// Copy of this index with a different smoothing width (Shortfall only).
  UtilityIndex with_smoothing(double delta) const;

  std::string describe() const;

 private:
  UtilityIndex() = default;
  UtilityKind kind_ = UtilityKind::MeanVariance;
  double alpha_ = 0.0;
  double delta_ = 0.0;
  Phi phi_ = Phi::identity();
  std::function<double(double, double)> custom_;
  std::string label_;
  bool has_growth_ = false;
  double growth_c_ = 0.0;
  double growth_g_ = 2.0;
};

double eval_index(const UtilityIndex& u, double x, double y);

/// Terminal statistics of one simulated run of length n.
struct TrajectoryStatistics {
  double sample_mean = 0.0;      // S_n / n
  double scaled_deviation = 0.0; // deviation sum / sqrt(n)
  long long n = 0;
};

/// Plug-in average of u over a batch of trajectories (all with the same n).
double finite_horizon_utility(const UtilityIndex& u,
                              const std::vector<TrajectoryStatistics>& stats);

/// Single-arm limiting value: integral of u(mu, .) against N(0, sigma2).
/// Closed forms for the quadratic/shortfall kinds, Gauss-Hermite otherwise.
/// sigma2 == 0 degenerates to u(mu, 0).
double single_arm_limit(const UtilityIndex& u, double mu, double sigma2,
                        int quadrature_order = 64);

enum class CertVerdict { Yes, No, Inconclusive };

/// Pointwise sufficient condition for one-arm dominance:
///   d_x u * (mu1 - mu2) + 0.5 * d_yy u * (var1 - var2) >= 0 everywhere.
/// Analytic for the quadratic kinds and the exp-neg blend (constant
/// curvature ratio); probe-grid + finite differences otherwise, in which case
/// a clean sweep is only "inconclusive" (no counterexample found).
struct SpecializationCertificate {
  CertVerdict holds_for_arm1 = CertVerdict::Inconclusive;
  CertVerdict holds_for_arm2 = CertVerdict::Inconclusive;
  std::optional<std::pair<double, double>> witness1;  // where it fails for arm1
  std::optional<std::pair<double, double>> witness2;
  std::optional<double> ratio_bound;  // curvature ratio when constant
  bool analytic = false;
};

struct CertificateGrid {
  double x_lo = -10.0, x_hi = 10.0;
  double y_lo = -10.0, y_hi = 10.0;
  int points = 201;  // per axis
};

SpecializationCertificate specialization_certificate(
    const UtilityIndex& u, const Arm& arm1, const Arm& arm2,
    const CertificateGrid& grid = {});

}  // namespace bandit
