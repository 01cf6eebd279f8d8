#include "bandit/strategy.hpp"

#include <sstream>

#include "bandit/errors.hpp"

namespace bandit {

Strategy Strategy::specialize(int arm) {
  if (arm < 0) throw ConfigError("specialize: negative arm index");
  Strategy s;
  s.kind_ = StrategyKind::Specialize;
  s.arm_a_ = arm;
  std::ostringstream os;
  os << "specialize(" << arm << ")";
  s.name_ = os.str();
  return s;
}

Strategy Strategy::alternate(int period) {
  if (period < 1) throw ConfigError("alternate: period must be >= 1");
  Strategy s;
  s.kind_ = StrategyKind::Alternate;
  s.period_ = period;
  std::ostringstream os;
  os << "alternate(" << period << ")";
  s.name_ = os.str();
  return s;
}

Strategy Strategy::lambda_fraction(double lambda, double x_star) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ConfigError("lambda_fraction: requires 0 <= lambda <= 1");
  Strategy s;
  s.kind_ = StrategyKind::LambdaFraction;
  s.lambda_ = lambda;
  s.x_star_ = x_star;
  std::ostringstream os;
  os << "lambda_fraction(" << lambda << ")";
  s.name_ = os.str();
  return s;
}

Strategy Strategy::sign_switch(int arm_pos, int arm_neg) {
  if (arm_pos < 0 || arm_neg < 0)
    throw ConfigError("sign_switch: negative arm index");
  Strategy s;
  s.kind_ = StrategyKind::SignSwitch;
  s.arm_a_ = arm_pos;
  s.arm_b_ = arm_neg;
  std::ostringstream os;
  os << "sign_switch(" << arm_pos << "," << arm_neg << ")";
  s.name_ = os.str();
  return s;
}

Strategy Strategy::custom(std::function<int(const PolicyContext&)> policy,
                          std::string name) {
  if (!policy) throw ConfigError("custom strategy: empty policy");
  Strategy s;
  s.kind_ = StrategyKind::Custom;
  s.policy_ = std::move(policy);
  s.name_ = std::move(name);
  return s;
}

int Strategy::choose(const PolicyContext& ctx) const {
  switch (kind_) {
    case StrategyKind::Specialize:
      return arm_a_;
    case StrategyKind::Alternate:
      return static_cast<int>((ctx.stage - 1) % period_);
    case StrategyKind::LambdaFraction: {
      if (ctx.stage == 1) return 0;
      const long long i = ctx.stage - 1;
      const double frac =
          static_cast<double>((*ctx.pulls)[0]) / static_cast<double>(i);
      return frac <= lambda_ ? 0 : 1;
    }
    case StrategyKind::SignSwitch:
      return ctx.deviation_sum >= 0.0 ? arm_a_ : arm_b_;
    case StrategyKind::Custom:
      return policy_(ctx);
  }
  return 0;
}

}  // namespace bandit
