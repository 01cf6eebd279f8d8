#include "bandit/obm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "bandit/arms.hpp"
#include "bandit/errors.hpp"
#include "bandit/rng.hpp"

namespace bandit {

namespace {

constexpr long long kChunk = 4096;

void validate(const ObmParams& params) {
  if (!(params.sigma_pos > 0.0) || !std::isfinite(params.sigma_pos) ||
      !(params.sigma_neg > 0.0) || !std::isfinite(params.sigma_neg))
    throw ConfigError("obm: both volatilities must be positive and finite");
}

}  // namespace

double obm_density(const ObmParams& params, double t, double y) {
  validate(params);
  if (!(t > 0.0)) throw ConfigError("obm: t must be positive");
  const double total = params.sigma_pos + params.sigma_neg;
  const double s = (y >= 0.0) ? params.sigma_pos : params.sigma_neg;
  const double weight =
      2.0 * ((y >= 0.0) ? params.sigma_neg : params.sigma_pos) / total;
  const double sd = s * std::sqrt(t);
  return weight * normal_pdf(y / sd) / sd;
}

double obm_prob_nonneg(const ObmParams& params) {
  validate(params);
  return params.sigma_neg / (params.sigma_pos + params.sigma_neg);
}

double obm_negative_second_moment(const ObmParams& params, double t) {
  validate(params);
  if (!(t > 0.0)) throw ConfigError("obm: t must be positive");
  return params.sigma_pos * params.sigma_neg * params.sigma_neg * t /
         (params.sigma_pos + params.sigma_neg);
}

double switch_value_semivariance(double mu1, double sigma1, double mu2,
                                 double sigma2, double alpha) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
    throw ConfigError("switch_value_semivariance: sigmas must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ConfigError("switch_value_semivariance: alpha must be >= 0");
  return (mu1 * sigma2 + mu2 * sigma1 - alpha * sigma1 * sigma2 * sigma2) /
         (sigma1 + sigma2);
}

double shortfall_switch_bound(double mu1, double sigma1, double mu2,
                              double sigma2) {
  return thresholds(mu1, sigma1, mu2, sigma2).alpha_low_prime;
}

ObmSimResult simulate_obm(const ObmParams& params, double t, int steps,
                          long long paths, std::uint64_t seed, int threads) {
  validate(params);
  if (!(t > 0.0)) throw ConfigError("obm: t must be positive");
  if (steps < 100) throw ConfigError("obm: steps must be >= 100");
  if (paths < 1) throw ConfigError("obm: paths must be >= 1");
  if (threads < 0) throw ConfigError("obm: negative thread count");
  if (threads == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }

  const double dt = t / steps;
  const double sqrt_dt = std::sqrt(dt);
  const long long chunks = (paths + kChunk - 1) / kChunk;

  struct Partial {
    long long nonneg = 0;
    double m2_sum = 0.0;
    double m2_sumsq = 0.0;
    long long nonfinite = 0;
  };
  std::vector<Partial> partials(static_cast<size_t>(chunks));
  std::atomic<long long> next_chunk{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    try {
      for (;;) {
        const long long c = next_chunk.fetch_add(1);
        if (c >= chunks) break;
        const long long begin = c * kChunk;
        const long long end = std::min(paths, begin + kChunk);
        Partial part;
        for (long long p = begin; p < end; ++p) {
          RngStream rng(seed, static_cast<std::uint64_t>(p));
          double w = 0.0;
          for (int s = 0; s < steps; ++s) {
            const double sig =
                (w >= 0.0) ? params.sigma_pos : params.sigma_neg;
            w += sig * sqrt_dt * rng.next_normal();
          }
          if (!std::isfinite(w)) {
            ++part.nonfinite;
            continue;
          }
          if (w >= 0.0) ++part.nonneg;
          const double m2 = (w < 0.0) ? w * w : 0.0;
          part.m2_sum += m2;
          part.m2_sumsq += m2 * m2;
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
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  long long nonneg = 0, nonfinite = 0;
  double m2_sum = 0.0, m2_sumsq = 0.0;
  for (const Partial& part : partials) {
    nonneg += part.nonneg;
    m2_sum += part.m2_sum;
    m2_sumsq += part.m2_sumsq;
    nonfinite += part.nonfinite;
  }
  if (nonfinite > 0) {
    std::ostringstream os;
    os << "obm: " << nonfinite << " path(s) were non-finite (of " << paths
       << " paths)";
    throw NumericalError(os.str());
  }

  ObmSimResult r;
  r.paths = paths;
  const double n = static_cast<double>(paths);
  r.prob_nonneg = static_cast<double>(nonneg) / n;
  r.prob_se = std::sqrt(
      std::max(0.0, r.prob_nonneg * (1.0 - r.prob_nonneg) / n));
  r.neg_second_moment = m2_sum / n;
  if (paths > 1) {
    const double var = std::max(
        0.0, (m2_sumsq - m2_sum * r.neg_second_moment) / (n - 1.0));
    r.neg_se = std::sqrt(var / n);
  }
  return r;
}

}  // namespace bandit
