#pragma once

#include <cstdint>

namespace bandit {

/// Counter-based pseudo-random stream.
///
/// Each stream is keyed by (seed, stream index); draws are a pure function of
/// (key, counter), so stream s of a run never depends on how many other
/// streams exist or which thread consumes it. This is what makes Monte Carlo
/// estimates bit-identical across worker counts and stable when the path
/// count changes (path p always sees the same numbers).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform draw on the open interval (0,1), on the lattice
  /// (k + 0.5) * 2^-52. Mirrored draws satisfy u + u' == 1 exactly.
  double next_uniform();

  /// Standard normal via inverse-CDF; mirrored streams produce exact
  /// negations.
  double next_normal();

  /// Antithetic mirroring: subsequent uniforms are replaced by 1 - u.
  void set_mirror(bool m) { mirror_ = m; }
  bool mirror() const { return mirror_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool mirror_ = false;
};

/// Inverse of the standard normal CDF (Wichura's AS241, double precision).
/// Requires 0 < p < 1.
double inverse_normal_cdf(double p);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal density.
double normal_pdf(double z);

}  // namespace bandit
