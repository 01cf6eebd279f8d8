#include "bandit/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "bandit/errors.hpp"

namespace bandit {

namespace {

constexpr long long kChunk = 4096;  // paths per reduction chunk (fixed)

int resolve_threads(int requested) {
  if (requested < 0) throw ConfigError("simulation: negative thread count");
  if (requested == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  return requested;
}

inline int checked_choose(const Strategy& strategy, const PolicyContext& ctx,
                          int num_arms) {
  const int k = strategy.choose(ctx);
  if (k < 0 || k >= num_arms) {
    std::ostringstream os;
    os << "policy error: strategy \"" << strategy.name() << "\" returned arm "
       << k << " for a " << num_arms << "-arm set at stage " << ctx.stage;
    throw ConfigError(os.str());
  }
  return k;
}

struct PathOutcome {
  TrajectoryStatistics stats;
  bool finite = true;
};

PathOutcome roll_path(const ArmSet& set, const Strategy& strategy, long long n,
                      RngStream& rng, std::vector<long long>& pulls) {
  const int K = set.size();
  std::fill(pulls.begin(), pulls.end(), 0);
  double payoff_sum = 0.0;
  double deviation_sum = 0.0;
  PolicyContext ctx;
  ctx.pulls = &pulls;
  for (long long i = 1; i <= n; ++i) {
    ctx.stage = i;
    ctx.payoff_sum = payoff_sum;
    ctx.deviation_sum = deviation_sum;
    const int k = checked_choose(strategy, ctx, K);
    const double z = set[k].distribution.sample(rng);
    payoff_sum += z;
    deviation_sum += z - set[k].mean;
    ++pulls[k];
  }
  PathOutcome out;
  out.stats.n = n;
  out.stats.sample_mean = payoff_sum / static_cast<double>(n);
  out.stats.scaled_deviation =
      deviation_sum / std::sqrt(static_cast<double>(n));
  out.finite = std::isfinite(out.stats.sample_mean) &&
               std::isfinite(out.stats.scaled_deviation);
  return out;
}

// Shared chunked-reduction driver: estimates the mean of value_fn over paths.
template <class ValueFn>
MonteCarloEstimate estimate_impl(const ArmSet& set, const Strategy& strategy,
                                 const SimulationConfig& config,
                                 ValueFn&& value_fn) {
  if (config.horizon < 1) throw ConfigError("simulation: horizon must be >= 1");
  if (config.paths < 1) throw ConfigError("simulation: paths must be >= 1");
  if (config.antithetic && config.paths % 2 != 0)
    throw ConfigError("simulation: antithetic requires an even path count");
  const int threads = resolve_threads(config.threads);
  const long long paths = config.paths;
  const long long chunks = (paths + kChunk - 1) / kChunk;

  struct Partial {
    double sum = 0.0;
    double sumsq = 0.0;
    long long samples = 0;
    long long nonfinite = 0;
  };
  std::vector<Partial> partials(static_cast<size_t>(chunks));
  std::atomic<long long> next_chunk{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    std::vector<long long> pulls(set.arms.size());
    try {
      for (;;) {
        const long long c = next_chunk.fetch_add(1);
        if (c >= chunks) break;
        const long long begin = c * kChunk;
        const long long end = std::min(paths, begin + kChunk);
        Partial part;
        if (!config.antithetic) {
          for (long long p = begin; p < end; ++p) {
            RngStream rng(config.seed, static_cast<std::uint64_t>(p));
            const PathOutcome out =
                roll_path(set, strategy, config.horizon, rng, pulls);
            const double v = value_fn(out.stats);
            if (!out.finite || !std::isfinite(v)) {
              ++part.nonfinite;
              continue;
            }
            part.sum += v;
            part.sumsq += v * v;
            ++part.samples;
          }
        } else {
          // kChunk is even, so pairs never straddle chunks; each pair is one
          // sample (its average), which keeps the s.e. honest.
          for (long long p = begin; p < end; p += 2) {
            double pair_sum = 0.0;
            bool ok = true;
            for (int m = 0; m < 2; ++m) {
              RngStream rng(config.seed, static_cast<std::uint64_t>(p >> 1));
              rng.set_mirror(m == 1);
              const PathOutcome out =
                  roll_path(set, strategy, config.horizon, rng, pulls);
              const double v = value_fn(out.stats);
              if (!out.finite || !std::isfinite(v)) {
                ok = false;
                break;
              }
              pair_sum += v;
            }
            if (!ok) {
              ++part.nonfinite;
              continue;
            }
            const double v = 0.5 * pair_sum;
            part.sum += v;
            part.sumsq += v * v;
            ++part.samples;
          }
        }
        partials[static_cast<size_t>(c)] = part;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int nw = static_cast<int>(
        std::min<long long>(threads, std::max<long long>(1, chunks)));
    pool.reserve(static_cast<size_t>(nw));
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  double sum = 0.0, sumsq = 0.0;
  long long samples = 0, nonfinite = 0;
  for (const Partial& part : partials) {
    sum += part.sum;
    sumsq += part.sumsq;
    samples += part.samples;
    nonfinite += part.nonfinite;
  }
  if (nonfinite > 0) {
    std::ostringstream os;
    os << "simulation: " << nonfinite
       << " path value(s) were non-finite (of " << paths << " paths)";
    throw NumericalError(os.str());
  }

  MonteCarloEstimate est;
  est.paths = paths;
  const double m = sum / static_cast<double>(samples);
  est.mean = m;
  if (samples > 1) {
    const double var =
        std::max(0.0, (sumsq - sum * m) / static_cast<double>(samples - 1));
    est.std_error = std::sqrt(var / static_cast<double>(samples));
  }
  est.ci_lo = est.mean - 1.96 * est.std_error;
  est.ci_hi = est.mean + 1.96 * est.std_error;
  return est;
}

}  // namespace

TrajectoryStatistics run_strategy(const ArmSet& set, const Strategy& strategy,
                                  long long n, RngStream& rng) {
  if (set.arms.empty()) throw ConfigError("run_strategy: empty arm set");
  if (n < 1) throw ConfigError("run_strategy: horizon must be >= 1");
  std::vector<long long> pulls(set.arms.size());
  return roll_path(set, strategy, n, rng, pulls).stats;
}

TrajectoryRecord run_strategy_recorded(const ArmSet& set,
                                       const Strategy& strategy, long long n,
                                       RngStream& rng) {
  if (set.arms.empty()) throw ConfigError("run_strategy: empty arm set");
  if (n < 1) throw ConfigError("run_strategy: horizon must be >= 1");
  const int K = set.size();
  TrajectoryRecord rec;
  rec.arm.reserve(static_cast<size_t>(n));
  rec.payoff.reserve(static_cast<size_t>(n));
  rec.deviation_sum.reserve(static_cast<size_t>(n));
  std::vector<long long> pulls(set.arms.size());
  double payoff_sum = 0.0, deviation_sum = 0.0;
  PolicyContext ctx;
  ctx.pulls = &pulls;
  for (long long i = 1; i <= n; ++i) {
    ctx.stage = i;
    ctx.payoff_sum = payoff_sum;
    ctx.deviation_sum = deviation_sum;
    const int k = checked_choose(strategy, ctx, K);
    const double z = set[k].distribution.sample(rng);
    payoff_sum += z;
    deviation_sum += z - set[k].mean;
    ++pulls[k];
    rec.arm.push_back(k);
    rec.payoff.push_back(z);
    rec.deviation_sum.push_back(deviation_sum);
  }
  rec.stats.n = n;
  rec.stats.sample_mean = payoff_sum / static_cast<double>(n);
  rec.stats.scaled_deviation = deviation_sum / std::sqrt(static_cast<double>(n));
  return rec;
}

MonteCarloEstimate estimate_Un(const ArmSet& set, const Strategy& strategy,
                               const UtilityIndex& u,
                               const SimulationConfig& config) {
  if (set.arms.empty()) throw ConfigError("estimate_Un: empty arm set");
  return estimate_impl(set, strategy, config,
                       [&u](const TrajectoryStatistics& s) {
                         return u(s.sample_mean, s.scaled_deviation);
                       });
}

MonteCarloEstimate estimate_second_moment(const ArmSet& set,
                                          const Strategy& strategy,
                                          const SimulationConfig& config) {
  if (set.arms.empty())
    throw ConfigError("estimate_second_moment: empty arm set");
  return estimate_impl(set, strategy, config,
                       [](const TrajectoryStatistics& s) {
                         return s.scaled_deviation * s.scaled_deviation;
                       });
}

}  // namespace bandit
