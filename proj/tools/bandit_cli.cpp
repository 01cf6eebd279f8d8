// banditlab: command line front end for the bandit value laboratory.
//
// Subcommands:
//   value       limiting optimal index via the PDE solver, plus per-arm
//               quadrature values and (two arms) the regime classification
//   simulate    Monte Carlo estimates of the finite-horizon index
//   dp          exact finite-horizon value by backward induction
//   thresholds  two-arm threshold constants
//   hull        extreme arms of the (mean, variance) cloud
//   obm         two-sided diffusion limit of the sign-switching rule
//
// Exit codes: 0 ok, 2 bad configuration or input, 3 numerical failure,
// 4 resource bound exceeded.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bandit/arms.hpp"
#include "bandit/config.hpp"
#include "bandit/errors.hpp"
#include "bandit/exact_dp.hpp"
#include "bandit/hjb.hpp"
#include "bandit/obm.hpp"
#include "bandit/simulate.hpp"
#include "bandit/utility.hpp"

using nlohmann::json;
using namespace bandit;

namespace {

struct Opts {
  std::string config_path;
  std::string output = "table";
  std::string out;
  long long seed = -1;   // >= 0 overrides the config seed
  int threads = -1;      // >= 0 overrides the config thread count
  std::string dump_slice;
  std::string dump_trajectories;
  long long dump_count = 8;
  double obm_t = 1.0;
  long long obm_steps = 1000;
  long long obm_paths = 0;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw ConfigError("cannot open output file \"" + out_path + "\"");
  f << text;
}

void emit(const Opts& o, const char* command, const json& config,
          const json& results, const std::string& table,
          const std::string& csv) {
  if (o.output == "json") {
    json doc{{"schema_version", 1},
             {"command", command},
             {"config", config},
             {"results", results}};
    write_text(doc.dump(2) + "\n", o.out);
  } else if (o.output == "csv") {
    write_text(csv, o.out);
  } else {
    write_text(table, o.out);
  }
}

ExperimentConfig load_config(const Opts& o) {
  json j = load_json_file(o.config_path);
  if (o.seed >= 0) j["simulation"]["seed"] = o.seed;
  if (o.threads >= 0) j["simulation"]["threads"] = o.threads;
  return ExperimentConfig::from_json(j);
}

// Index of the higher-variance arm of a two-arm set, and its partner.
std::pair<int, int> risky_safe(const ArmSet& set) {
  if (set.size() != 2)
    throw ConfigError("this command needs exactly two arms");
  const int r = set[0].variance >= set[1].variance ? 0 : 1;
  return {r, 1 - r};
}

// Regime of the two-arm problem among the candidate rules (specialize on
// either arm, or switch on the deviation sign), decided by the thresholds.
std::string classify_regime(const UtilityIndex& u, const Thresholds& th,
                            int risky, int safe) {
  const double a = u.alpha();
  auto spec = [](int k) { return "specialize(" + std::to_string(k) + ")"; };
  switch (u.kind()) {
    case UtilityKind::MeanVariance:
      if (a < th.ratio) return spec(risky);
      if (a > th.ratio) return spec(safe);
      return "tie";
    case UtilityKind::MeanSemivariance:
      if (a < th.alpha_low) return spec(risky);
      if (a > th.alpha_high) return spec(safe);
      return "switching";
    case UtilityKind::Shortfall:
      return a < th.alpha_low_prime ? "switching" : spec(risky);
    default:
      return "";
  }
}

void cmd_value(const Opts& o) {
  ExperimentConfig cfg = load_config(o);
  const UtilityIndex& u = cfg.require_utility("value");
  const Grid grid = cfg.build_grid();
  const PdeSolution sol = solve_hjb(cfg.arms, u, grid, cfg.solver_config());

  json res;
  res["corner_value"] = sol.corner_value;
  res["grid"] = {{"x_points", grid.x_points}, {"y_points", grid.y_points},
                 {"t_steps", grid.t_steps},  {"dx", grid.dx},
                 {"dy", grid.dy},            {"dt", grid.dt}};
  res["extreme_arms"] = cfg.arms.extreme;

  json specs = json::array();
  double best = -std::numeric_limits<double>::infinity();
  int best_arm = 0;
  for (const Arm& a : cfg.arms.arms) {
    const double v = single_arm_limit(u, a.mean, a.variance);
    specs.push_back({{"arm", a.id}, {"value", v}});
    if (v > best) {
      best = v;
      best_arm = a.id;
    }
  }
  res["specializations"] = specs;
  res["best_specialization"] = {{"arm", best_arm}, {"value", best}};

  std::string regime_line;
  if (cfg.arms.size() == 2) {
    const auto [r, s] = risky_safe(cfg.arms);
    try {
      const Thresholds th = thresholds(cfg.arms[r], cfg.arms[s]);
      res["thresholds"] = {{"risky_arm", r},
                           {"safe_arm", s},
                           {"ratio", th.ratio},
                           {"alpha_low", th.alpha_low},
                           {"alpha_high", th.alpha_high},
                           {"alpha_low_prime", th.alpha_low_prime}};
      const std::string regime = classify_regime(u, th, r, s);
      if (!regime.empty()) {
        res["regime"] = regime;
        regime_line = "  regime: " + regime + "\n";
      }
    } catch (const ConfigError&) {
      // Orderings outside the threshold regime are fine; just no labels.
    }
  }

  if (!o.dump_slice.empty()) {
    std::ostringstream csv;
    csv << "x,y,value,arm\n";
    for (int i = 0; i < grid.x_points; ++i) {
      const double x = grid.x_min + i * grid.dx;
      for (int j = 0; j < grid.y_points; ++j) {
        const double y = grid.y_min + j * grid.dy;
        const size_t idx = static_cast<size_t>(i) * grid.y_points + j;
        csv << fmt(x) << ',' << fmt(y) << ',' << fmt(sol.values[idx]) << ','
            << (sol.control.empty() ? 0 : int(sol.control[idx])) << '\n';
      }
    }
    write_text(csv.str(), o.dump_slice);
  }

  std::ostringstream table;
  table << "limiting value (PDE corner estimate)\n"
        << "  arms: " << cfg.arms.size() << "  extreme:";
  for (int k : cfg.arms.extreme) table << ' ' << k;
  table << "\n  grid: " << grid.x_points << " x " << grid.y_points
        << ", t_steps " << grid.t_steps << ", dt " << fmt(grid.dt) << "\n"
        << "  corner value: " << fmt(sol.corner_value) << "\n"
        << "  specialization values (quadrature):\n";
  for (const json& s : specs)
    table << "    arm " << s["arm"].get<int>() << ": "
          << fmt(s["value"].get<double>()) << "\n";
  table << "  best specialization: arm " << best_arm << " (" << fmt(best)
        << ")\n";
  if (res.contains("thresholds")) {
    const json& th = res["thresholds"];
    table << "  thresholds (risky " << th["risky_arm"].get<int>() << " vs safe "
          << th["safe_arm"].get<int>() << "): ratio "
          << fmt(th["ratio"].get<double>()) << ", alpha_low "
          << fmt(th["alpha_low"].get<double>()) << ", alpha_high "
          << fmt(th["alpha_high"].get<double>()) << ", alpha_low_prime "
          << fmt(th["alpha_low_prime"].get<double>()) << "\n";
  }
  table << regime_line;

  std::ostringstream csv;
  csv << "key,value\n"
      << "corner_value," << fmt(sol.corner_value) << "\n"
      << "best_specialization_arm," << best_arm << "\n"
      << "best_specialization_value," << fmt(best) << "\n";
  for (const json& s : specs)
    csv << "specialization_" << s["arm"].get<int>() << ","
        << fmt(s["value"].get<double>()) << "\n";

  emit(o, "value", cfg.resolved, res, table.str(), csv.str());
}

void cmd_simulate(const Opts& o) {
  ExperimentConfig cfg = load_config(o);
  const UtilityIndex& u = cfg.require_utility("simulate");
  const Strategy strat = cfg.build_strategy();

  json rows = json::array();
  for (long long n : cfg.simulation.horizons) {
    const MonteCarloEstimate est =
        estimate_Un(cfg.arms, strat, u, cfg.simulation_config(n));
    rows.push_back({{"n", n},
                    {"mean", est.mean},
                    {"std_error", est.std_error},
                    {"ci_lo", est.ci_lo},
                    {"ci_hi", est.ci_hi},
                    {"paths", est.paths}});
  }
  json res;
  res["strategy"] = strat.name();
  res["estimates"] = rows;

  if (!o.dump_trajectories.empty()) {
    std::ostringstream csv;
    csv << "path,stage,arm,payoff,deviation_sum\n";
    const long long n0 = cfg.simulation.horizons.front();
    for (long long p = 0; p < o.dump_count; ++p) {
      RngStream rng(cfg.simulation.seed, static_cast<std::uint64_t>(p));
      const TrajectoryRecord rec =
          run_strategy_recorded(cfg.arms, strat, n0, rng);
      for (long long s = 0; s < n0; ++s)
        csv << p << ',' << (s + 1) << ',' << rec.arm[s] << ','
            << fmt(rec.payoff[s]) << ',' << fmt(rec.deviation_sum[s]) << '\n';
    }
    write_text(csv.str(), o.dump_trajectories);
  }

  std::ostringstream table;
  table << "Monte Carlo estimates\n"
        << "  strategy: " << strat.name() << "\n"
        << "  paths " << cfg.simulation.paths << ", seed "
        << cfg.simulation.seed
        << (cfg.simulation.antithetic ? ", antithetic\n" : "\n")
        << "       n          mean      std_err        ci95_lo      ci95_hi\n";
  for (const json& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%8lld  %12.6g %12.4g   %12.6g %12.6g\n",
                  r["n"].get<long long>(), r["mean"].get<double>(),
                  r["std_error"].get<double>(), r["ci_lo"].get<double>(),
                  r["ci_hi"].get<double>());
    table << line;
  }

  std::ostringstream csv;
  csv << "n,mean,std_error,ci_lo,ci_hi,paths\n";
  for (const json& r : rows)
    csv << r["n"].get<long long>() << ',' << fmt(r["mean"].get<double>())
        << ',' << fmt(r["std_error"].get<double>()) << ','
        << fmt(r["ci_lo"].get<double>()) << ','
        << fmt(r["ci_hi"].get<double>()) << ',' << r["paths"].get<long long>()
        << '\n';

  emit(o, "simulate", cfg.resolved, res, table.str(), csv.str());
}

void cmd_dp(const Opts& o) {
  ExperimentConfig cfg = load_config(o);
  const UtilityIndex& u = cfg.require_utility("dp");
  const DpResult r = exact_value_dp(cfg.arms, u, cfg.dp.n);

  json res{{"n", cfg.dp.n},
           {"value", r.value},
           {"first_arm", r.first_arm},
           {"exact", r.exact}};
  std::string closed_line;
  if (u.kind() == UtilityKind::MeanVariance) {
    double limit = -std::numeric_limits<double>::infinity();
    for (const Arm& a : cfg.arms.arms)
      limit = std::max(limit, a.mean - u.alpha() * a.variance);
    res["closed_form"] = limit;
    res["closed_form_gap"] = r.value - limit;
    closed_line = "  closed form max_k(mu_k - alpha var_k): " + fmt(limit) +
                  "  (gap " + fmt(r.value - limit) + ")\n";
  }

  std::ostringstream table;
  table << "exact finite-horizon value\n"
        << "  n: " << cfg.dp.n << "\n"
        << "  value: " << fmt(r.value)
        << (r.exact ? "  (rational arithmetic)\n" : "  (double arithmetic)\n")
        << "  optimal first arm: " << r.first_arm << "\n"
        << closed_line;

  std::ostringstream csv;
  csv << "key,value\n"
      << "n," << cfg.dp.n << "\n"
      << "value," << fmt(r.value) << "\n"
      << "first_arm," << r.first_arm << "\n"
      << "exact," << (r.exact ? 1 : 0) << "\n";
  if (res.contains("closed_form"))
    csv << "closed_form," << fmt(res["closed_form"].get<double>()) << "\n";

  emit(o, "dp", cfg.resolved, res, table.str(), csv.str());
}

void cmd_thresholds(const Opts& o) {
  ExperimentConfig cfg = load_config(o);
  const auto [r, s] = risky_safe(cfg.arms);
  const Thresholds th = thresholds(cfg.arms[r], cfg.arms[s]);

  json res{{"risky_arm", r},
           {"safe_arm", s},
           {"ratio", th.ratio},
           {"alpha_low", th.alpha_low},
           {"alpha_high", th.alpha_high},
           {"alpha_low_prime", th.alpha_low_prime}};

  std::ostringstream table;
  table << "two-arm thresholds (risky arm " << r << ", safe arm " << s
        << ")\n"
        << "  ratio            " << fmt(th.ratio) << "\n"
        << "  alpha_low        " << fmt(th.alpha_low) << "\n"
        << "  alpha_high       " << fmt(th.alpha_high) << "\n"
        << "  alpha_low_prime  " << fmt(th.alpha_low_prime) << "\n";

  std::ostringstream csv;
  csv << "key,value\n"
      << "risky_arm," << r << "\n"
      << "safe_arm," << s << "\n"
      << "ratio," << fmt(th.ratio) << "\n"
      << "alpha_low," << fmt(th.alpha_low) << "\n"
      << "alpha_high," << fmt(th.alpha_high) << "\n"
      << "alpha_low_prime," << fmt(th.alpha_low_prime) << "\n";

  emit(o, "thresholds", cfg.resolved, res, table.str(), csv.str());
}

void cmd_hull(const Opts& o) {
  ExperimentConfig cfg = load_config(o);
  json arms = json::array();
  for (const Arm& a : cfg.arms.arms) {
    const bool ext = std::find(cfg.arms.extreme.begin(),
                               cfg.arms.extreme.end(),
                               a.id) != cfg.arms.extreme.end();
    arms.push_back({{"id", a.id},
                    {"mean", a.mean},
                    {"variance", a.variance},
                    {"extreme", ext}});
  }
  json res{{"arms", arms},
           {"extreme", cfg.arms.extreme},
           {"envelope",
            {{"mu_min", cfg.arms.mu_min},
             {"mu_max", cfg.arms.mu_max},
             {"var_min", cfg.arms.var_min},
             {"var_max", cfg.arms.var_max}}}};

  std::ostringstream table;
  table << "extreme arms of the (mean, variance) cloud\n"
        << "    id        mean    variance  extreme\n";
  for (const json& a : arms) {
    char line[128];
    std::snprintf(line, sizeof line, "  %4d  %10.6g  %10.6g  %s\n",
                  a["id"].get<int>(), a["mean"].get<double>(),
                  a["variance"].get<double>(),
                  a["extreme"].get<bool>() ? "yes" : "no");
    table << line;
  }

  std::ostringstream csv;
  csv << "id,mean,variance,extreme\n";
  for (const json& a : arms)
    csv << a["id"].get<int>() << ',' << fmt(a["mean"].get<double>()) << ','
        << fmt(a["variance"].get<double>()) << ','
        << (a["extreme"].get<bool>() ? 1 : 0) << '\n';

  emit(o, "hull", cfg.resolved, res, table.str(), csv.str());
}

void cmd_obm(const Opts& o) {
  ExperimentConfig cfg = load_config(o);
  const auto [r, s] = risky_safe(cfg.arms);
  if (!(cfg.arms[r].variance > cfg.arms[s].variance))
    throw ConfigError("obm: the two arms need distinct positive variances");
  if (!(cfg.arms[s].variance > 0.0))
    throw ConfigError("obm: both variances must be positive");
  const ObmParams p{std::sqrt(cfg.arms[r].variance),
                    std::sqrt(cfg.arms[s].variance)};
  const double t = o.obm_t;

  json res{{"sigma_pos", p.sigma_pos},
           {"sigma_neg", p.sigma_neg},
           {"t", t},
           {"prob_nonneg", obm_prob_nonneg(p)},
           {"neg_second_moment", obm_negative_second_moment(p, t)},
           {"density_jump_ratio",
            (p.sigma_neg * p.sigma_neg) / (p.sigma_pos * p.sigma_pos)}};

  std::string extra_lines;
  if (cfg.utility && cfg.utility->kind() == UtilityKind::MeanSemivariance) {
    const double sv = switch_value_semivariance(
        cfg.arms[r].mean, p.sigma_pos, cfg.arms[s].mean, p.sigma_neg,
        cfg.utility->alpha());
    res["switch_value_semivariance"] = sv;
    extra_lines += "  switch value (semivariance, alpha " +
                   fmt(cfg.utility->alpha()) + "): " + fmt(sv) + "\n";
  }
  try {
    const double bound = shortfall_switch_bound(
        cfg.arms[r].mean, p.sigma_pos, cfg.arms[s].mean, p.sigma_neg);
    res["shortfall_switch_bound"] = bound;
    extra_lines += "  shortfall switch bound: " + fmt(bound) + "\n";
  } catch (const ConfigError&) {
  }

  std::string sim_lines;
  if (o.obm_paths > 0) {
    const ObmSimResult sim =
        simulate_obm(p, t, static_cast<int>(o.obm_steps), o.obm_paths,
                     cfg.simulation.seed, cfg.simulation.threads);
    res["simulation"] = {{"steps", o.obm_steps},
                         {"paths", sim.paths},
                         {"prob_nonneg", sim.prob_nonneg},
                         {"prob_se", sim.prob_se},
                         {"neg_second_moment", sim.neg_second_moment},
                         {"neg_se", sim.neg_se}};
    sim_lines = "  simulated (" + std::to_string(sim.paths) + " paths, " +
                std::to_string(o.obm_steps) + " steps):\n" +
                "    P(W >= 0): " + fmt(sim.prob_nonneg) + " +- " +
                fmt(sim.prob_se) + "\n" +
                "    E[W^2; W < 0]: " + fmt(sim.neg_second_moment) + " +- " +
                fmt(sim.neg_se) + "\n";
  }

  std::ostringstream table;
  table << "two-sided diffusion limit of the sign-switching rule\n"
        << "  sigma_pos " << fmt(p.sigma_pos) << " (arm " << r
        << "), sigma_neg " << fmt(p.sigma_neg) << " (arm " << s << "), t "
        << fmt(t) << "\n"
        << "  P(W_t >= 0): " << fmt(obm_prob_nonneg(p)) << "\n"
        << "  E[W_t^2; W_t < 0]: " << fmt(obm_negative_second_moment(p, t))
        << "\n"
        << "  density jump ratio q(0+)/q(0-): "
        << fmt(res["density_jump_ratio"].get<double>()) << "\n"
        << extra_lines << sim_lines;

  std::ostringstream csv;
  csv << "key,value\n";
  for (const auto& [k, v] : res.items())
    if (v.is_number()) csv << k << ',' << fmt(v.get<double>()) << '\n';

  emit(o, "obm", cfg.resolved, res, table.str(), csv.str());
}

void add_common(CLI::App* sc, Opts& o) {
  sc->add_option("--config", o.config_path, "experiment JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  sc->add_option("--output", o.output, "output format")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  sc->add_option("--out", o.out, "write output to this file");
  sc->add_option("--seed", o.seed, "override the config seed");
  sc->add_option("--threads", o.threads, "override the config thread count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bandit value laboratory"};
  app.require_subcommand(1);
  Opts o;

  CLI::App* value = app.add_subcommand(
      "value", "limiting optimal index via the PDE solver");
  add_common(value, o);
  value->add_option("--dump-slice", o.dump_slice,
                    "write the t=0 slice as CSV (x,y,value,arm)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo estimates of the index");
  add_common(simulate, o);
  simulate->add_option("--dump-trajectories", o.dump_trajectories,
                       "write sample paths as CSV");
  simulate->add_option("--dump-count", o.dump_count,
                       "number of paths to dump (first horizon)");

  CLI::App* dp =
      app.add_subcommand("dp", "exact finite-horizon value (tally DP)");
  add_common(dp, o);

  CLI::App* thresholds_cmd =
      app.add_subcommand("thresholds", "two-arm threshold constants");
  add_common(thresholds_cmd, o);

  CLI::App* hull = app.add_subcommand(
      "hull", "extreme arms of the (mean, variance) cloud");
  add_common(hull, o);

  CLI::App* obm = app.add_subcommand(
      "obm", "two-sided diffusion limit of the sign-switching rule");
  add_common(obm, o);
  obm->add_option("--t", o.obm_t, "time horizon of the diffusion");
  obm->add_option("--steps", o.obm_steps, "Euler steps per path");
  obm->add_option("--paths", o.obm_paths,
                  "simulate this many paths (0 = closed forms only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(value)) cmd_value(o);
    if (app.got_subcommand(simulate)) cmd_simulate(o);
    if (app.got_subcommand(dp)) cmd_dp(o);
    if (app.got_subcommand(thresholds_cmd)) cmd_thresholds(o);
    if (app.got_subcommand(hull)) cmd_hull(o);
    if (app.got_subcommand(obm)) cmd_obm(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
