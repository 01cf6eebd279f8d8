#pragma once

#include "bandit/arms.hpp"
#include "bandit/utility.hpp"

namespace bandit {

struct DpResult {
  double value = 0.0;   // V_n
  int first_arm = 0;    // optimal first action (lowest index on ties)
  bool exact = false;   // true when computed in rational arithmetic
};

/// Exact finite-horizon value by backward induction over outcome tallies.
///
/// The post-stage state is the per-arm outcome tally, which determines pulls,
/// payoff sum and deviation sum; the value function depends on history only
/// through it, so the tally DP attains the supremum over all strategies.
///
/// Requires every arm to have finite support of size <= 4 and n <= 24; the
/// state space C(n+S, S) (S = total support size) is capped at 10^7.
/// Kinds whose index is rational in the tallies (mean-variance,
/// mean-semivariance, sharp shortfall) are evaluated in exact rational
/// arithmetic; the rest fall back to doubles.
DpResult exact_value_dp(const ArmSet& set, const UtilityIndex& u, int n);

}  // namespace bandit
