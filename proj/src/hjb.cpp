#include "bandit/hjb.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "bandit/errors.hpp"

namespace bandit {

Grid Grid::make(const ArmSet& set, int x_points, int y_points,
                double stability_factor, double T) {
  if (set.arms.empty()) throw ConfigError("Grid::make: empty arm set");
  if (x_points < 4 || y_points < 4)
    throw ConfigError("Grid::make: need at least 4 points per axis");
  if (!(stability_factor > 0.0 && stability_factor <= 0.45))
    throw ConfigError("Grid::make: stability factor must lie in (0, 0.45]");
  if (!(T > 0.0)) throw ConfigError("Grid::make: T must be positive");
  if (!(set.var_max > 0.0))
    throw ConfigError(
        "Grid::make: all variances are zero; lift the set with an epsilon "
        "perturbation first");
  const double sbar = std::sqrt(set.var_max);
  Grid g;
  g.T = T;
  g.x_points = x_points;
  g.y_points = y_points;
  const double xr =
      std::fabs(set.mu_min) + std::fabs(set.mu_max) + 6.0 * sbar;
  const double yr = 6.0 * sbar * std::sqrt(T);
  g.x_min = -xr;
  g.x_max = xr;
  g.y_min = -yr;
  g.y_max = yr;
  g.dx = (g.x_max - g.x_min) / (x_points - 1);
  g.dy = (g.y_max - g.y_min) / (y_points - 1);
  const double mu_scale =
      std::max({std::fabs(set.mu_max), std::fabs(set.mu_min), 1.0});
  const double dt_max = stability_factor *
                        std::min(g.dy * g.dy / set.var_max, g.dx / mu_scale);
  g.t_steps = static_cast<int>(std::ceil(T / dt_max));
  g.dt = T / g.t_steps;
  return g;
}

double PdeSolution::value_at(double x, double y) const {
  const Grid& g = grid;
  if (x < g.x_min || x > g.x_max || y < g.y_min || y > g.y_max)
    throw ConfigError("PdeSolution::value_at: point outside the grid");
  int i = static_cast<int>((x - g.x_min) / g.dx);
  int j = static_cast<int>((y - g.y_min) / g.dy);
  i = std::clamp(i, 0, g.x_points - 2);
  j = std::clamp(j, 0, g.y_points - 2);
  const double tx = (x - (g.x_min + i * g.dx)) / g.dx;
  const double ty = (y - (g.y_min + j * g.dy)) / g.dy;
  const int ny = g.y_points;
  const double v00 = values[static_cast<size_t>(i * ny + j)];
  const double v10 = values[static_cast<size_t>((i + 1) * ny + j)];
  const double v01 = values[static_cast<size_t>(i * ny + j + 1)];
  const double v11 = values[static_cast<size_t>((i + 1) * ny + j + 1)];
  return (1.0 - tx) * (1.0 - ty) * v00 + tx * (1.0 - ty) * v10 +
         (1.0 - tx) * ty * v01 + tx * ty * v11;
}

ArmSet perturbed_driver(const ArmSet& set, double epsilon) {
  if (set.arms.empty()) throw ConfigError("perturbed_driver: empty arm set");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ConfigError("perturbed_driver: epsilon must be >= 0");
  if (epsilon == 0.0) return set;
  std::vector<Arm> arms;
  arms.reserve(set.arms.size());
  for (const Arm& a : set.arms)
    arms.push_back(Arm::make(
        a.id, PayoffDistribution::normal(a.mean,
                                         a.variance + epsilon * epsilon)));
  return compute_bounds(std::move(arms));
}

namespace {

struct ArmCoef {
  double mu;
  double half_var;
};

int resolve_threads(int requested) {
  if (requested < 0) throw ConfigError("solve_hjb: negative thread count");
  if (requested == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  return requested;
}

struct StepFailure {
  std::atomic<bool> hit{false};
  int step = 0, ix = 0, iy = 0;
  std::mutex m;

  void record(int s, int i, int j) {
    std::lock_guard<std::mutex> lock(m);
    if (hit.load()) return;
    step = s;
    ix = i;
    iy = j;
    hit.store(true);
  }
};

PdeSolution solve_restricted(const ArmSet& set, const UtilityIndex& u,
                             const Grid& grid, const SolverConfig& config,
                             bool restrict_to_extreme) {
  const ArmSet effective =
      config.epsilon_perturbation > 0.0
          ? perturbed_driver(set, config.epsilon_perturbation)
          : set;
  if (!(effective.var_max > 0.0))
    throw ConfigError(
        "solve_hjb: degenerate arm set (all variances zero); set "
        "epsilon_perturbation > 0");
  if (!(config.stability_factor > 0.0 && config.stability_factor <= 0.45))
    throw ConfigError("solve_hjb: stability factor must lie in (0, 0.45]");
  if (grid.x_points < 4 || grid.y_points < 4 || grid.t_steps < 1 ||
      !(grid.dx > 0.0) || !(grid.dy > 0.0) || !(grid.dt > 0.0))
    throw ConfigError("solve_hjb: malformed grid");
  const double mu_scale = std::max(
      {std::fabs(effective.mu_max), std::fabs(effective.mu_min), 1.0});
  const double dt_bound =
      config.stability_factor *
      std::min(grid.dy * grid.dy / effective.var_max, grid.dx / mu_scale);
  if (grid.dt > dt_bound * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "solve_hjb: dt=" << grid.dt << " violates the stability bound "
       << dt_bound << " for this arm set";
    throw ConfigError(os.str());
  }

  std::vector<ArmCoef> coefs;
  if (restrict_to_extreme) {
    for (int k : effective.extreme)
      coefs.push_back({effective[k].mean, 0.5 * effective[k].variance});
  } else {
    for (const Arm& a : effective.arms)
      coefs.push_back({a.mean, 0.5 * a.variance});
  }
  const int K = static_cast<int>(coefs.size());
  const int nx = grid.x_points, ny = grid.y_points;

  PdeSolution sol;
  sol.grid = grid;
  sol.values.resize(static_cast<size_t>(nx) * ny);
  if (config.record_control)
    sol.control.assign(static_cast<size_t>(nx) * ny, 0);

  for (int i = 0; i < nx; ++i) {
    const double x = grid.x_min + i * grid.dx;
    for (int j = 0; j < ny; ++j) {
      const double y = grid.y_min + j * grid.dy;
      const double val = u(x, y);
      if (!std::isfinite(val)) {
        std::ostringstream os;
        os << "solve_hjb: terminal value not finite at (x=" << x << ", y=" << y
           << ")";
        throw NumericalError(os.str());
      }
      sol.values[static_cast<size_t>(i) * ny + j] = val;
    }
  }

  std::vector<double> buf(sol.values.size());
  double* vold = sol.values.data();
  double* vnew = buf.data();
  const double inv_dx = 1.0 / grid.dx;
  const double inv_dy2 = 1.0 / (grid.dy * grid.dy);
  const bool one_sided = config.boundary == BoundaryPolicy::OneSidedUpwind;
  const int threads = resolve_threads(config.threads);
  StepFailure failure;

  auto update_rows = [&](int step, int i_begin, int i_end, double* src,
                         double* dst) {
    for (int i = i_begin; i < i_end; ++i) {
      const double* row = src + static_cast<size_t>(i) * ny;
      const double* up =
          src + static_cast<size_t>(std::min(i + 1, nx - 1)) * ny;
      const double* dn = src + static_cast<size_t>(std::max(i - 1, 0)) * ny;
      double* out = dst + static_cast<size_t>(i) * ny;
      for (int j = 0; j < ny; ++j) {
        double p_fwd, p_bwd;
        if (i == 0) {
          p_fwd = p_bwd = (up[j] - row[j]) * inv_dx;
        } else if (i == nx - 1) {
          p_fwd = p_bwd = (row[j] - dn[j]) * inv_dx;
        } else {
          p_fwd = (up[j] - row[j]) * inv_dx;
          p_bwd = (row[j] - dn[j]) * inv_dx;
        }
        double q;
        if (j > 0 && j < ny - 1) {
          q = (row[j + 1] - 2.0 * row[j] + row[j - 1]) * inv_dy2;
        } else if (one_sided && ny >= 3) {
          q = (j == 0) ? (row[2] - 2.0 * row[1] + row[0]) * inv_dy2
                       : (row[ny - 3] - 2.0 * row[ny - 2] + row[ny - 1]) *
                             inv_dy2;
        } else {
          q = 0.0;
        }
        double best = -std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int k = 0; k < K; ++k) {
          const double p = coefs[k].mu >= 0.0 ? p_fwd : p_bwd;
          const double g = coefs[k].mu * p + coefs[k].half_var * q;
          if (g > best) {
            best = g;
            arg = k;
          }
        }
        const double val = row[j] + grid.dt * best;
        if (!std::isfinite(val)) {
          failure.record(step, i, j);
          return;
        }
        out[j] = val;
        if (step == grid.t_steps - 1 && config.record_control)
          sol.control[static_cast<size_t>(i) * ny + j] =
              static_cast<std::int8_t>(arg);
      }
    }
  };

  for (int step = 0; step < grid.t_steps; ++step) {
    if (threads == 1 || nx < 4 * threads) {
      update_rows(step, 0, nx, vold, vnew);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<size_t>(threads));
      const int rows_per = (nx + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const int b = t * rows_per;
        const int e = std::min(nx, b + rows_per);
        if (b >= e) break;
        pool.emplace_back(
            [&, step, b, e] { update_rows(step, b, e, vold, vnew); });
      }
      for (std::thread& th : pool) th.join();
    }
    if (failure.hit.load()) {
      std::ostringstream os;
      os << "solve_hjb: non-finite value at step " << failure.step << ", node ("
         << failure.ix << "," << failure.iy << ")";
      throw NumericalError(os.str());
    }
    std::swap(vold, vnew);
  }
  if (vold != sol.values.data())
    std::copy(vold, vold + sol.values.size(), sol.values.data());

  // Map restricted argmax indices back to original arm ids.
  if (config.record_control && restrict_to_extreme) {
    for (auto& c : sol.control)
      c = static_cast<std::int8_t>(effective.extreme[static_cast<size_t>(c)]);
  }

  sol.corner_value = sol.value_at(0.0, 0.0);
  return sol;
}

}  // namespace

PdeSolution solve_hjb(const ArmSet& set, const UtilityIndex& u,
                      const Grid& grid, const SolverConfig& config) {
  if (config.record_control && set.size() > 127)
    throw ConfigError("solve_hjb: control recording supports <= 127 arms");
  return solve_restricted(set, u, grid, config, false);
}

double feynman_kac_value(double mu, double sigma2, const UtilityIndex& u,
                         int quadrature_order) {
  return single_arm_limit(u, mu, sigma2, quadrature_order);
}

ExtremeReductionResult extreme_reduction_check(const ArmSet& set,
                                               const UtilityIndex& u,
                                               const Grid& grid,
                                               const SolverConfig& config) {
  ExtremeReductionResult r;
  r.value_full = solve_restricted(set, u, grid, config, false).corner_value;
  r.value_extreme = solve_restricted(set, u, grid, config, true).corner_value;
  r.delta = std::fabs(r.value_full - r.value_extreme);
  return r;
}

}  // namespace bandit
