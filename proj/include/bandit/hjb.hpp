#pragma once

#include <cstdint>
#include <vector>

#include "bandit/arms.hpp"
#include "bandit/utility.hpp"

namespace bandit {

/// Space-time grid for the terminal-value problem on [0,T] x [x_min,x_max] x
/// [y_min,y_max]. Defaults follow the moment envelope: x spans
/// +-(|mu_min|+|mu_max|+6*sigma_max), y spans +-6*sigma_max*sqrt(T), and the
/// time step obeys dt <= sf * min(dy^2/var_max, dx/max(|mu|,1)).
struct Grid {
  double x_min = -1.0, x_max = 1.0;
  double y_min = -1.0, y_max = 1.0;
  int x_points = 0, y_points = 0;
  int t_steps = 0;
  double T = 1.0;
  double dx = 0.0, dy = 0.0, dt = 0.0;

  /// Build a grid sized to `set` (pass the perturbed set when a degenerate
  /// arm set is lifted by epsilon). stability_factor must be <= 0.45.
  static Grid make(const ArmSet& set, int x_points, int y_points,
                   double stability_factor = 0.45, double T = 1.0);
};

enum class BoundaryPolicy {
  SecondDerivativeZero,  // default: linear extrapolation in y at the rim
  OneSidedUpwind,        // one-sided second difference at the y rim
};

struct SolverConfig {
  double epsilon_perturbation = 0.0;  // each variance gains epsilon^2
  BoundaryPolicy boundary = BoundaryPolicy::SecondDerivativeZero;
  double stability_factor = 0.45;
  int threads = 1;            // 0 = hardware concurrency
  bool record_control = true; // keep the t=0 argmax field
};

struct PdeSolution {
  Grid grid;
  std::vector<double> values;        // t=0 slice, row-major [ix*y_points+iy]
  std::vector<std::int8_t> control;  // argmax arm at t=0 (if recorded)
  double corner_value = 0.0;         // bilinear value at (x,y)=(0,0)

  double value_at(double x, double y) const;
};

/// Explicit monotone finite-difference solve of
///   d_t v + G(d_x v, d_yy v) = 0,  v(T,.) = u,
/// marching backward from T with per-arm upwinding in x and central second
/// differences in y. Bit-identical for every thread count.
PdeSolution solve_hjb(const ArmSet& set, const UtilityIndex& u,
                      const Grid& grid, const SolverConfig& config = {});

/// Quadrature route to the same limit for a single (mu, sigma2) arm.
double feynman_kac_value(double mu, double sigma2, const UtilityIndex& u,
                         int quadrature_order = 64);

/// Replace each arm's variance by variance + epsilon^2 (means unchanged).
ArmSet perturbed_driver(const ArmSet& set, double epsilon);

struct ExtremeReductionResult {
  double value_full = 0.0;
  double value_extreme = 0.0;
  double delta = 0.0;  // |full - extreme|
};

/// Solve twice, once over all arms and once restricted to hull vertices; the
/// corner values agree up to rounding.
ExtremeReductionResult extreme_reduction_check(const ArmSet& set,
                                               const UtilityIndex& u,
                                               const Grid& grid,
                                               const SolverConfig& config = {});

}  // namespace bandit
