#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bandit/rng.hpp"

namespace bandit {

/// Payoff distribution of a single arm. Parameters are known to the
/// controller; mean and variance are computed analytically, never estimated.
class PayoffDistribution {
 public:
  struct TwoPoint {
    double lo, hi, p_hi;
  };
  struct DiscreteFinite {
    std::vector<double> values;
    std::vector<double> probs;
  };
  struct Normal {
    double mu, sigma2;
  };
  struct Uniform {
    double a, b;
  };
  struct Constant {
    double c;
  };

  static PayoffDistribution two_point(double lo, double hi, double p_hi);
  static PayoffDistribution discrete_finite(std::vector<double> values,
                                            std::vector<double> probs);
  static PayoffDistribution normal(double mu, double sigma2);
  static PayoffDistribution uniform(double a, double b);
  static PayoffDistribution constant(double c);

  double mean() const;
  double variance() const;

  /// Draw one payoff. All sampling is single-uniform inversion so that
  /// antithetic mirroring preserves the marginal law exactly.
  double sample(RngStream& rng) const;

  /// Number of support points for finite discrete kinds, nullopt otherwise.
  std::optional<int> support_size() const;

  /// Support values / probabilities for finite discrete kinds (throws for
  /// continuous kinds). Used by the exact DP.
  std::vector<std::pair<double, double>> support() const;

  std::string describe() const;

  template <class V>
  decltype(auto) visit(V&& v) const {
    return std::visit(std::forward<V>(v), spec_);
  }

 private:
  using Spec = std::variant<TwoPoint, DiscreteFinite, Normal, Uniform, Constant>;
  explicit PayoffDistribution(Spec s);

  Spec spec_;
  std::vector<double> cdf_;  // cumulative probs for DiscreteFinite
};

}  // namespace bandit
