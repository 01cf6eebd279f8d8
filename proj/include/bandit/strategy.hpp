#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace bandit {

/// Information available to a policy when choosing the arm for `stage`
/// (1-based). pulls/payoff_sum/deviation_sum summarize stages 1..stage-1.
struct PolicyContext {
  long long stage = 1;
  const std::vector<long long>* pulls = nullptr;
  double payoff_sum = 0.0;
  double deviation_sum = 0.0;
};

enum class StrategyKind { Specialize, Alternate, LambdaFraction, SignSwitch, Custom };

class Strategy {
 public:
  /// Always play arm `arm`.
  static Strategy specialize(int arm);

  /// Cycle through arms 0..period-1: stage i plays arm (i-1) mod period.
  static Strategy alternate(int period);

  /// Play arm 0 at stage 1, then at stage i+1 iff pulls0/i <= lambda; keeps
  /// the arm-0 pull fraction within 1/n of lambda. x_star is carried along
  /// for reporting (the mean the fraction is tuned to).
  static Strategy lambda_fraction(double lambda,
                                  double x_star = std::nan(""));

  /// Play arm_pos while the running deviation sum is >= 0, else arm_neg.
  static Strategy sign_switch(int arm_pos = 0, int arm_neg = 1);

  static Strategy custom(std::function<int(const PolicyContext&)> policy,
                         std::string name = "custom");

  int choose(const PolicyContext& ctx) const;
  StrategyKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double lambda() const { return lambda_; }
  double x_star() const { return x_star_; }

 private:
  Strategy() = default;
  StrategyKind kind_ = StrategyKind::Specialize;
  int arm_a_ = 0;
  int arm_b_ = 1;
  int period_ = 2;
  double lambda_ = 0.5;
  double x_star_ = std::nan("");
  std::function<int(const PolicyContext&)> policy_;
  std::string name_;
};

}  // namespace bandit
