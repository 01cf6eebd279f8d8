#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bandit/arms.hpp"
#include "bandit/hjb.hpp"
#include "bandit/simulate.hpp"
#include "bandit/strategy.hpp"
#include "bandit/utility.hpp"

namespace bandit {

struct GridSpec {
  int x_points = 201;
  int y_points = 201;
  double stability_factor = 0.45;
  double epsilon = 0.0;  // variance lift, applied inside the solver
  BoundaryPolicy boundary = BoundaryPolicy::SecondDerivativeZero;
  double T = 1.0;
};

struct StrategySpec {
  std::string kind = "specialize";  // specialize|alternate|lambda_fraction|
                                    // sign_switch
  int arm = 0;
  int period = 2;
  double lambda = 0.5;
  double x_star = std::nan("");
  int arm_pos = 0;
  int arm_neg = 1;
};

struct SimulationSpec {
  std::vector<long long> horizons{1000};
  long long paths = 10000;
  std::uint64_t seed = 0;
  bool antithetic = false;
  int threads = 1;
  StrategySpec strategy;
};

struct DpSpec {
  int n = 8;
};

/// A fully validated experiment description. Parsing throws ConfigError with
/// the offending key in the message; numeric cross-checks (declared vs
/// computed moments) use a 1e-12 relative tolerance.
struct ExperimentConfig {
  ArmSet arms;
  std::optional<UtilityIndex> utility;
  GridSpec grid;
  SimulationSpec simulation;
  DpSpec dp;
  nlohmann::json resolved;  // every field, defaults filled in

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  /// The utility section, or a ConfigError naming the caller if absent.
  const UtilityIndex& require_utility(const char* who) const;

  Strategy build_strategy() const;
  Grid build_grid() const;  // sized to the (possibly lifted) arm set
  SolverConfig solver_config() const;
  SimulationConfig simulation_config(long long horizon) const;
};

/// Read and parse a JSON document; parse failures become ConfigError.
nlohmann::json load_json_file(const std::string& path);

}  // namespace bandit
