#include "bandit/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bandit/errors.hpp"

namespace bandit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw ConfigError("config: " + msg);
}

const json& require_key(const json& j, const char* key,
                        const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where + ": missing key \"" + key + "\"");
  return *it;
}

double get_number(const json& j, const char* key, const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_number()) fail(where + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

double get_number_or(const json& j, const char* key, double fallback,
                     const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) fail(where + ": \"" + key + "\" must be a number");
  return it->get<double>();
}

long long get_int_or(const json& j, const char* key, long long fallback,
                     const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer())
    fail(where + ": \"" + key + "\" must be an integer");
  return it->get<long long>();
}

bool get_bool_or(const json& j, const char* key, bool fallback,
                 const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) fail(where + ": \"" + key + "\" must be a boolean");
  return it->get<bool>();
}

std::string get_string_or(const json& j, const char* key,
                          const std::string& fallback,
                          const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) fail(where + ": \"" + key + "\" must be a string");
  return it->get<std::string>();
}

std::vector<double> get_double_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) fail(where + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

PayoffDistribution parse_distribution(const json& a, const std::string& where) {
  const std::string type =
      require_key(a, "type", where).is_string()
          ? a["type"].get<std::string>()
          : (fail(where + ": \"type\" must be a string"), "");
  if (type == "two_point")
    return PayoffDistribution::two_point(get_number(a, "lo", where),
                                         get_number(a, "hi", where),
                                         get_number(a, "p_hi", where));
  if (type == "discrete")
    return PayoffDistribution::discrete_finite(
        get_double_array(require_key(a, "values", where), where + ".values"),
        get_double_array(require_key(a, "probs", where), where + ".probs"));
  if (type == "normal")
    return PayoffDistribution::normal(get_number(a, "mean", where),
                                      get_number(a, "variance", where));
  if (type == "uniform")
    return PayoffDistribution::uniform(get_number(a, "a", where),
                                       get_number(a, "b", where));
  if (type == "constant")
    return PayoffDistribution::constant(get_number(a, "value", where));
  fail(where + ": unknown arm type \"" + type + "\"");
}

// Declared moments must agree with the distribution to 1e-12 (relative).
void cross_check(const json& a, const char* key, double computed,
                 const std::string& where) {
  auto it = a.find(key);
  if (it == a.end()) return;
  if (!it->is_number()) fail(where + ": \"" + key + "\" must be a number");
  const double declared = it->get<double>();
  const double tol = 1e-12 * std::max(1.0, std::fabs(computed));
  if (std::fabs(declared - computed) > tol) {
    std::ostringstream os;
    os << where << ": declared " << key << " " << declared
       << " disagrees with the distribution (" << computed << ")";
    fail(os.str());
  }
}

ArmSet parse_arms(const json& j) {
  const json& arr = require_key(j, "arms", "config");
  if (!arr.is_array() || arr.empty())
    fail("\"arms\" must be a non-empty array");
  std::vector<Arm> arms;
  arms.reserve(arr.size());
  int id = 0;
  for (const json& a : arr) {
    std::ostringstream w;
    w << "arms[" << id << "]";
    if (!a.is_object()) fail(w.str() + " must be an object");
    Arm arm = Arm::make(id, parse_distribution(a, w.str()));
    if (a["type"].get<std::string>() != "normal") {
      cross_check(a, "mean", arm.mean, w.str());
      cross_check(a, "variance", arm.variance, w.str());
    }
    arms.push_back(std::move(arm));
    ++id;
  }
  return compute_bounds(std::move(arms));
}

Phi parse_phi(const json& v, const std::string& where) {
  if (v.is_array()) return Phi::polynomial(get_double_array(v, where));
  if (!v.is_string())
    fail(where + ": \"phi\" must be a string or a coefficient array");
  const std::string s = v.get<std::string>();
  if (s == "identity") return Phi::identity();
  if (s == "exp(-x)") return Phi::exp_neg();
  const std::string prefix = "neg-quadratic-around(";
  if (s.rfind(prefix, 0) == 0 && s.back() == ')') {
    const std::string inner = s.substr(prefix.size(),
                                       s.size() - prefix.size() - 1);
    try {
      size_t used = 0;
      const double c = std::stod(inner, &used);
      if (used == inner.size()) return Phi::neg_quadratic_around(c);
    } catch (const std::exception&) {
    }
  }
  fail(where + ": unknown phi \"" + s + "\"");
}

std::optional<UtilityIndex> parse_utility(const json& j) {
  auto it = j.find("utility");
  if (it == j.end()) return std::nullopt;
  const json& u = *it;
  const std::string where = "utility";
  if (!u.is_object()) fail("\"utility\" must be an object");
  const std::string kind = get_string_or(u, "kind", "", where);
  if (kind.empty()) fail("utility: missing key \"kind\"");
  if (kind == "mean_variance")
    return UtilityIndex::mean_variance(get_number(u, "alpha", where));
  if (kind == "mean_semivariance")
    return UtilityIndex::mean_semivariance(get_number(u, "alpha", where));
  if (kind == "shortfall")
    return UtilityIndex::shortfall(get_number(u, "alpha", where),
                                   get_number_or(u, "delta", 0.0, where));
  if (kind == "additive")
    return UtilityIndex::additive(
        parse_phi(require_key(u, "phi", where), where),
        get_number(u, "alpha", where));
  if (kind == "blend")
    return UtilityIndex::blend(parse_phi(require_key(u, "phi", where), where),
                               get_number(u, "alpha", where));
  fail("utility: unknown kind \"" + kind + "\"");
}

BoundaryPolicy parse_boundary(const std::string& s) {
  if (s == "second_derivative_zero")
    return BoundaryPolicy::SecondDerivativeZero;
  if (s == "one_sided_upwind") return BoundaryPolicy::OneSidedUpwind;
  fail("grid: unknown boundary \"" + s +
       "\" (second_derivative_zero | one_sided_upwind)");
}

const char* boundary_name(BoundaryPolicy b) {
  return b == BoundaryPolicy::SecondDerivativeZero ? "second_derivative_zero"
                                                   : "one_sided_upwind";
}

GridSpec parse_grid(const json& j) {
  GridSpec g;
  auto it = j.find("grid");
  if (it == j.end()) return g;
  const json& v = *it;
  const std::string where = "grid";
  if (!v.is_object()) fail("\"grid\" must be an object");
  g.x_points = static_cast<int>(
      get_int_or(v, "x_points", g.x_points, where));
  g.y_points = static_cast<int>(
      get_int_or(v, "y_points", g.y_points, where));
  g.stability_factor =
      get_number_or(v, "stability_factor", g.stability_factor, where);
  g.epsilon = get_number_or(v, "epsilon", g.epsilon, where);
  g.T = get_number_or(v, "T", g.T, where);
  g.boundary = parse_boundary(
      get_string_or(v, "boundary", boundary_name(g.boundary), where));
  return g;
}

StrategySpec parse_strategy(const json& v) {
  StrategySpec s;
  const std::string where = "simulation.strategy";
  if (!v.is_object()) fail("\"strategy\" must be an object");
  s.kind = get_string_or(v, "kind", s.kind, where);
  if (s.kind != "specialize" && s.kind != "alternate" &&
      s.kind != "lambda_fraction" && s.kind != "sign_switch")
    fail("simulation.strategy: unknown kind \"" + s.kind + "\"");
  s.arm = static_cast<int>(get_int_or(v, "arm", s.arm, where));
  s.period = static_cast<int>(get_int_or(v, "period", s.period, where));
  s.lambda = get_number_or(v, "lambda", s.lambda, where);
  s.x_star = get_number_or(v, "x_star", s.x_star, where);
  s.arm_pos = static_cast<int>(get_int_or(v, "arm_pos", s.arm_pos, where));
  s.arm_neg = static_cast<int>(get_int_or(v, "arm_neg", s.arm_neg, where));
  return s;
}

SimulationSpec parse_simulation(const json& j) {
  SimulationSpec s;
  auto it = j.find("simulation");
  if (it == j.end()) return s;
  const json& v = *it;
  const std::string where = "simulation";
  if (!v.is_object()) fail("\"simulation\" must be an object");
  if (v.contains("n_sweep")) {
    if (v.contains("n")) fail("simulation: give \"n\" or \"n_sweep\", not both");
    const json& sweep = v["n_sweep"];
    if (!sweep.is_array() || sweep.empty())
      fail("simulation: \"n_sweep\" must be a non-empty array");
    s.horizons.clear();
    for (const json& e : sweep) {
      if (!e.is_number_integer())
        fail("simulation: \"n_sweep\" must contain integers");
      s.horizons.push_back(e.get<long long>());
    }
  } else {
    s.horizons = {get_int_or(v, "n", s.horizons[0], where)};
  }
  s.paths = get_int_or(v, "paths", s.paths, where);
  const long long seed = get_int_or(
      v, "seed", static_cast<long long>(s.seed), where);
  if (seed < 0) fail("simulation: \"seed\" must be >= 0");
  s.seed = static_cast<std::uint64_t>(seed);
  s.antithetic = get_bool_or(v, "antithetic", s.antithetic, where);
  s.threads = static_cast<int>(get_int_or(v, "threads", s.threads, where));
  if (v.contains("strategy")) s.strategy = parse_strategy(v["strategy"]);
  return s;
}

DpSpec parse_dp(const json& j) {
  DpSpec d;
  auto it = j.find("dp");
  if (it == j.end()) return d;
  if (!it->is_object()) fail("\"dp\" must be an object");
  d.n = static_cast<int>(get_int_or(*it, "n", d.n, "dp"));
  return d;
}

json arm_to_json(const Arm& arm) {
  json a = arm.distribution.visit([](const auto& p) -> json {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, PayoffDistribution::TwoPoint>)
      return {{"type", "two_point"}, {"lo", p.lo}, {"hi", p.hi},
              {"p_hi", p.p_hi}};
    else if constexpr (std::is_same_v<T, PayoffDistribution::DiscreteFinite>)
      return {{"type", "discrete"}, {"values", p.values}, {"probs", p.probs}};
    else if constexpr (std::is_same_v<T, PayoffDistribution::Normal>)
      return {{"type", "normal"}};
    else if constexpr (std::is_same_v<T, PayoffDistribution::Uniform>)
      return {{"type", "uniform"}, {"a", p.a}, {"b", p.b}};
    else
      return {{"type", "constant"}, {"value", p.c}};
  });
  a["mean"] = arm.mean;
  a["variance"] = arm.variance;
  return a;
}

json utility_to_json(const UtilityIndex& u) {
  json v;
  switch (u.kind()) {
    case UtilityKind::Additive:
      v["kind"] = "additive";
      break;
    case UtilityKind::Blend:
      v["kind"] = "blend";
      break;
    case UtilityKind::MeanVariance:
      v["kind"] = "mean_variance";
      break;
    case UtilityKind::MeanSemivariance:
      v["kind"] = "mean_semivariance";
      break;
    case UtilityKind::Shortfall:
      v["kind"] = "shortfall";
      v["delta"] = u.smoothing_width();
      break;
    case UtilityKind::Custom:
      v["kind"] = "custom";
      break;
  }
  v["alpha"] = u.alpha();
  if (u.kind() == UtilityKind::Additive || u.kind() == UtilityKind::Blend) {
    if (u.phi().kind() == Phi::Kind::Polynomial)
      v["phi"] = u.phi().coeffs();
    else
      v["phi"] = u.phi().describe();
  }
  return v;
}

json strategy_to_json(const StrategySpec& s) {
  json v{{"kind", s.kind}};
  if (s.kind == "specialize") v["arm"] = s.arm;
  if (s.kind == "alternate") v["period"] = s.period;
  if (s.kind == "lambda_fraction") {
    v["lambda"] = s.lambda;
    if (!std::isnan(s.x_star)) v["x_star"] = s.x_star;
  }
  if (s.kind == "sign_switch") {
    v["arm_pos"] = s.arm_pos;
    v["arm_neg"] = s.arm_neg;
  }
  return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail("top level must be a JSON object");
  ExperimentConfig cfg;
  cfg.arms = parse_arms(j);
  cfg.utility = parse_utility(j);
  cfg.grid = parse_grid(j);
  cfg.simulation = parse_simulation(j);
  cfg.dp = parse_dp(j);
  for (long long n : cfg.simulation.horizons)
    if (n < 1) fail("simulation: horizons must be >= 1");
  if (cfg.simulation.paths < 1) fail("simulation: \"paths\" must be >= 1");

  json resolved;
  resolved["arms"] = json::array();
  for (const Arm& a : cfg.arms.arms) {
    json aj = arm_to_json(a);
    if (aj["type"] == "normal") {
      aj["mean"] = a.mean;
      aj["variance"] = a.variance;
    }
    resolved["arms"].push_back(std::move(aj));
  }
  if (cfg.utility) resolved["utility"] = utility_to_json(*cfg.utility);
  resolved["grid"] = {
      {"x_points", cfg.grid.x_points},
      {"y_points", cfg.grid.y_points},
      {"stability_factor", cfg.grid.stability_factor},
      {"epsilon", cfg.grid.epsilon},
      {"boundary", boundary_name(cfg.grid.boundary)},
      {"T", cfg.grid.T},
  };
  resolved["simulation"] = {
      {"n_sweep", cfg.simulation.horizons},
      {"paths", cfg.simulation.paths},
      {"seed", cfg.simulation.seed},
      {"antithetic", cfg.simulation.antithetic},
      {"threads", cfg.simulation.threads},
      {"strategy", strategy_to_json(cfg.simulation.strategy)},
  };
  resolved["dp"] = {{"n", cfg.dp.n}};
  cfg.resolved = std::move(resolved);
  return cfg;
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  try {
    return from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("parse error: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_json(load_json_file(path));
}

const UtilityIndex& ExperimentConfig::require_utility(const char* who) const {
  if (!utility)
    throw ConfigError(std::string("config: a \"utility\" section is required "
                                  "for ") +
                      who);
  return *utility;
}

Strategy ExperimentConfig::build_strategy() const {
  const StrategySpec& s = simulation.strategy;
  const int K = arms.size();
  auto check_arm = [&](int a, const char* key) {
    if (a < 0 || a >= K) {
      std::ostringstream os;
      os << "config: strategy " << key << " " << a
         << " out of range (have " << K << " arms)";
      throw ConfigError(os.str());
    }
  };
  if (s.kind == "specialize") {
    check_arm(s.arm, "arm");
    return Strategy::specialize(s.arm);
  }
  if (s.kind == "alternate") {
    if (s.period < 1 || s.period > K)
      fail("strategy: period must lie in [1, number of arms]");
    return Strategy::alternate(s.period);
  }
  if (s.kind == "lambda_fraction") {
    if (K < 2) fail("strategy: lambda_fraction needs at least two arms");
    return Strategy::lambda_fraction(s.lambda, s.x_star);
  }
  if (s.kind == "sign_switch") {
    check_arm(s.arm_pos, "arm_pos");
    check_arm(s.arm_neg, "arm_neg");
    return Strategy::sign_switch(s.arm_pos, s.arm_neg);
  }
  fail("strategy: unknown kind \"" + s.kind + "\"");
}

Grid ExperimentConfig::build_grid() const {
  const ArmSet& effective =
      grid.epsilon > 0.0 ? perturbed_driver(arms, grid.epsilon) : arms;
  return Grid::make(effective, grid.x_points, grid.y_points,
                    grid.stability_factor, grid.T);
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig c;
  c.epsilon_perturbation = grid.epsilon;
  c.boundary = grid.boundary;
  c.stability_factor = grid.stability_factor;
  c.threads = simulation.threads;
  return c;
}

SimulationConfig ExperimentConfig::simulation_config(long long horizon) const {
  SimulationConfig c;
  c.horizon = horizon;
  c.paths = simulation.paths;
  c.seed = simulation.seed;
  c.antithetic = simulation.antithetic;
  c.threads = simulation.threads;
  return c;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open \"" + path + "\"");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail("parse error in \"" + path + "\": " + e.what());
  }
}

}  // namespace bandit
