#pragma once

#include <cstdint>

namespace bandit {

/// Diffusion that runs at sigma_pos above the origin and sigma_neg below it.
/// Arises as the limit of the deviation process under the sign-switching
/// rule when two arms share a mean but not a variance.
struct ObmParams {
  double sigma_pos = 1.0;  // volatility on {w >= 0}
  double sigma_neg = 1.0;  // volatility on {w < 0}
};

/// Marginal density of the process at time t started from 0:
///   q(t, y) = N(0, sigma_pos^2 t) pdf * 2 sigma_neg / (sigma_pos+sigma_neg),
///             y >= 0,
///   q(t, y) = N(0, sigma_neg^2 t) pdf * 2 sigma_pos / (sigma_pos+sigma_neg),
///             y < 0.
/// The jump at y = 0 is genuine.
double obm_density(const ObmParams& params, double t, double y);

/// P(W_t >= 0) = sigma_neg / (sigma_pos + sigma_neg) for every t > 0.
double obm_prob_nonneg(const ObmParams& params);

/// E[W_t^2 1{W_t < 0}] = sigma_pos sigma_neg^2 t / (sigma_pos + sigma_neg).
double obm_negative_second_moment(const ObmParams& params, double t);

/// Limiting value of the sign-switching rule under the semivariance index
/// for arms (mu1, sigma1^2), (mu2, sigma2^2) with sigma the std deviation:
///   (mu1 sigma2 + mu2 sigma1 - alpha sigma1 sigma2^2) / (sigma1 + sigma2).
double switch_value_semivariance(double mu1, double sigma1, double mu2,
                                 double sigma2, double alpha);

/// Under the shortfall index, switching beats specializing only below
///   2 (mu1 - mu2) sigma1 / (sigma1 - sigma2).
double shortfall_switch_bound(double mu1, double sigma1, double mu2,
                              double sigma2);

struct ObmSimResult {
  double prob_nonneg = 0.0;
  double prob_se = 0.0;
  double neg_second_moment = 0.0;
  double neg_se = 0.0;
  long long paths = 0;
};

/// Euler scheme with the volatility frozen at the left endpoint of each step.
/// Deterministic for a fixed seed regardless of thread count.
ObmSimResult simulate_obm(const ObmParams& params, double t, int steps,
                          long long paths, std::uint64_t seed,
                          int threads = 1);

}  // namespace bandit
