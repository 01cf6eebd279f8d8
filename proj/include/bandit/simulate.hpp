#pragma once

#include <cstdint>
#include <vector>

#include "bandit/arms.hpp"
#include "bandit/strategy.hpp"
#include "bandit/utility.hpp"

namespace bandit {

struct SimulationConfig {
  long long horizon = 1000;   // n
  long long paths = 10000;
  std::uint64_t seed = 0;
  bool antithetic = false;
  int threads = 1;            // 0 = hardware concurrency
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;  // mean -/+ 1.96 * std_error
  double ci_hi = 0.0;
  long long paths = 0;
};

/// Roll out one trajectory of length n, consuming draws from `rng`.
TrajectoryStatistics run_strategy(const ArmSet& set, const Strategy& strategy,
                                  long long n, RngStream& rng);

/// Detailed single-trajectory record (CSV dumps, diagnostics).
struct TrajectoryRecord {
  std::vector<int> arm;        // per stage
  std::vector<double> payoff;
  std::vector<double> deviation_sum;  // running sum after each stage
  TrajectoryStatistics stats;
};

TrajectoryRecord run_strategy_recorded(const ArmSet& set,
                                       const Strategy& strategy, long long n,
                                       RngStream& rng);

/// Monte Carlo estimate of the expected index under `strategy`.
///
/// Path p always consumes stream p of the seed (pairs share a stream when
/// antithetic), and partial sums are combined in fixed chunk order, so the
/// estimate is bit-identical for every thread count and path p's draws do not
/// change when `paths` changes.
MonteCarloEstimate estimate_Un(const ArmSet& set, const Strategy& strategy,
                               const UtilityIndex& u,
                               const SimulationConfig& config);

/// Mean of scaled-deviation^2 over paths (moment-envelope diagnostics);
/// same determinism contract as estimate_Un.
MonteCarloEstimate estimate_second_moment(const ArmSet& set,
                                          const Strategy& strategy,
                                          const SimulationConfig& config);

}  // namespace bandit
