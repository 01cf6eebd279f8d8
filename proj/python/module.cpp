#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bandit/arms.hpp"
#include "bandit/config.hpp"
#include "bandit/errors.hpp"
#include "bandit/exact_dp.hpp"
#include "bandit/hjb.hpp"
#include "bandit/obm.hpp"
#include "bandit/rng.hpp"
#include "bandit/simulate.hpp"
#include "bandit/strategy.hpp"
#include "bandit/utility.hpp"

namespace py = pybind11;
using namespace bandit;

namespace {

// Python callbacks may be invoked from worker threads while the GIL is
// released around the heavy entry points; re-acquire before touching Python.
std::function<double(double)> guard1(py::object f) {
  return [f = std::move(f)](double z) {
    py::gil_scoped_acquire gil;
    return f(z).cast<double>();
  };
}

std::function<double(double, double)> guard2(py::object f) {
  return [f = std::move(f)](double x, double y) {
    py::gil_scoped_acquire gil;
    return f(x, y).cast<double>();
  };
}

ArmSet make_arm_set(const std::vector<PayoffDistribution>& dists) {
  std::vector<Arm> arms;
  arms.reserve(dists.size());
  int id = 0;
  for (const auto& d : dists) arms.push_back(Arm::make(id++, d));
  return compute_bounds(std::move(arms));
}

}  // namespace

PYBIND11_MODULE(_banditlab, m) {
  m.doc() = "bandit value laboratory (C++ core)";
#ifdef BANDITLAB_VERSION
  m.attr("__version__") = BANDITLAB_VERSION;
#endif

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);
  py::register_exception<ResourceError>(m, "ResourceError",
                                        PyExc_RuntimeError);

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream") = 0)
      .def("next_uniform", &RngStream::next_uniform)
      .def("next_normal", &RngStream::next_normal)
      .def("set_mirror", &RngStream::set_mirror);

  py::class_<PayoffDistribution>(m, "PayoffDistribution")
      .def_static("two_point", &PayoffDistribution::two_point, py::arg("lo"),
                  py::arg("hi"), py::arg("p_hi"))
      .def_static("discrete", &PayoffDistribution::discrete_finite,
                  py::arg("values"), py::arg("probs"))
      .def_static("normal", &PayoffDistribution::normal, py::arg("mean"),
                  py::arg("variance"))
      .def_static("uniform", &PayoffDistribution::uniform, py::arg("a"),
                  py::arg("b"))
      .def_static("constant", &PayoffDistribution::constant, py::arg("value"))
      .def_property_readonly("mean", &PayoffDistribution::mean)
      .def_property_readonly("variance", &PayoffDistribution::variance)
      .def("sample", &PayoffDistribution::sample)
      .def("support", &PayoffDistribution::support)
      .def("__repr__", &PayoffDistribution::describe);

  py::class_<Arm>(m, "Arm")
      .def_static("make", &Arm::make, py::arg("id"), py::arg("distribution"))
      .def_readonly("id", &Arm::id)
      .def_readonly("mean", &Arm::mean)
      .def_readonly("variance", &Arm::variance)
      .def_readonly("distribution", &Arm::distribution);

  py::class_<ArmSet>(m, "ArmSet")
      .def(py::init(&make_arm_set), py::arg("distributions"))
      .def_readonly("arms", &ArmSet::arms)
      .def_readonly("mu_max", &ArmSet::mu_max)
      .def_readonly("mu_min", &ArmSet::mu_min)
      .def_readonly("var_max", &ArmSet::var_max)
      .def_readonly("var_min", &ArmSet::var_min)
      .def_readonly("extreme", &ArmSet::extreme)
      .def("__len__", &ArmSet::size);

  m.def("extreme_points", &extreme_points, py::arg("points"),
        "Sorted indices of the convex-hull vertices of a point cloud.");

  py::class_<GDriverResult>(m, "GDriverResult")
      .def_readonly("value", &GDriverResult::value)
      .def_readonly("argmax", &GDriverResult::argmax);
  m.def("g_driver", &g_driver, py::arg("arm_set"), py::arg("p"), py::arg("q"),
        py::arg("restrict_to_extreme") = false);

  py::class_<Thresholds>(m, "Thresholds")
      .def_readonly("ratio", &Thresholds::ratio)
      .def_readonly("alpha_low", &Thresholds::alpha_low)
      .def_readonly("alpha_high", &Thresholds::alpha_high)
      .def_readonly("alpha_low_prime", &Thresholds::alpha_low_prime);
  m.def("thresholds",
        py::overload_cast<double, double, double, double>(&thresholds),
        py::arg("mu1"), py::arg("sigma1"), py::arg("mu2"), py::arg("sigma2"));

  py::class_<Phi>(m, "Phi")
      .def_static("identity", &Phi::identity)
      .def_static("exp_neg", &Phi::exp_neg)
      .def_static("neg_quadratic_around", &Phi::neg_quadratic_around,
                  py::arg("center"))
      .def_static("polynomial", &Phi::polynomial, py::arg("coeffs"))
      .def_static(
          "callable",
          [](py::object f, std::string label) {
            return Phi::callable(guard1(std::move(f)), std::move(label));
          },
          py::arg("f"), py::arg("label") = "callable")
      .def("__call__", &Phi::operator())
      .def("__repr__", &Phi::describe);

  py::class_<UtilityIndex>(m, "UtilityIndex")
      .def_static("additive", &UtilityIndex::additive, py::arg("phi"),
                  py::arg("alpha"))
      .def_static("blend", &UtilityIndex::blend, py::arg("phi"),
                  py::arg("alpha"))
      .def_static("mean_variance", &UtilityIndex::mean_variance,
                  py::arg("alpha"))
      .def_static("mean_semivariance", &UtilityIndex::mean_semivariance,
                  py::arg("alpha"))
      .def_static("shortfall", &UtilityIndex::shortfall, py::arg("alpha"),
                  py::arg("delta") = 0.0)
      .def_static(
          "custom",
          [](py::object f, double growth_c, double growth_g,
             std::string label) {
            return UtilityIndex::custom(guard2(std::move(f)), growth_c,
                                        growth_g, std::move(label));
          },
          py::arg("f"), py::arg("growth_c") = 0.0, py::arg("growth_g") = 2.0,
          py::arg("label") = "custom")
      .def("__call__", &UtilityIndex::operator())
      .def_property_readonly("alpha", &UtilityIndex::alpha)
      .def_property_readonly("smoothing_width", &UtilityIndex::smoothing_width)
      .def("with_smoothing", &UtilityIndex::with_smoothing, py::arg("delta"))
      .def("__repr__", &UtilityIndex::describe);

  m.def("single_arm_limit", &single_arm_limit, py::arg("u"), py::arg("mu"),
        py::arg("sigma2"), py::arg("quadrature_order") = 64,
        "Integral of u(mu, .) against N(0, sigma2).");

  py::class_<Strategy>(m, "Strategy")
      .def_static("specialize", &Strategy::specialize, py::arg("arm"))
      .def_static("alternate", &Strategy::alternate, py::arg("period"))
      .def_static("lambda_fraction", &Strategy::lambda_fraction,
                  py::arg("lam"), py::arg("x_star") = std::nan(""))
      .def_static("sign_switch", &Strategy::sign_switch,
                  py::arg("arm_pos") = 0, py::arg("arm_neg") = 1)
      .def_static(
          "custom",
          [](py::object f, std::string name) {
            return Strategy::custom(
                [f = std::move(f)](const PolicyContext& ctx) {
                  py::gil_scoped_acquire gil;
                  return f(ctx.stage, *ctx.pulls, ctx.payoff_sum,
                           ctx.deviation_sum)
                      .cast<int>();
                },
                std::move(name));
          },
          py::arg("f"), py::arg("name") = "custom",
          "f(stage, pulls, payoff_sum, deviation_sum) -> arm index")
      .def_property_readonly("name", &Strategy::name);

  py::class_<TrajectoryStatistics>(m, "TrajectoryStatistics")
      .def_readonly("sample_mean", &TrajectoryStatistics::sample_mean)
      .def_readonly("scaled_deviation",
                    &TrajectoryStatistics::scaled_deviation)
      .def_readonly("n", &TrajectoryStatistics::n);

  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init([](long long horizon, long long paths, std::uint64_t seed,
                       bool antithetic, int threads) {
             SimulationConfig c;
             c.horizon = horizon;
             c.paths = paths;
             c.seed = seed;
             c.antithetic = antithetic;
             c.threads = threads;
             return c;
           }),
           py::arg("horizon") = 1000, py::arg("paths") = 10000,
           py::arg("seed") = 0, py::arg("antithetic") = false,
           py::arg("threads") = 1)
      .def_readwrite("horizon", &SimulationConfig::horizon)
      .def_readwrite("paths", &SimulationConfig::paths)
      .def_readwrite("seed", &SimulationConfig::seed)
      .def_readwrite("antithetic", &SimulationConfig::antithetic)
      .def_readwrite("threads", &SimulationConfig::threads);

  py::class_<MonteCarloEstimate>(m, "MonteCarloEstimate")
      .def_readonly("mean", &MonteCarloEstimate::mean)
      .def_readonly("std_error", &MonteCarloEstimate::std_error)
      .def_readonly("ci_lo", &MonteCarloEstimate::ci_lo)
      .def_readonly("ci_hi", &MonteCarloEstimate::ci_hi)
      .def_readonly("paths", &MonteCarloEstimate::paths);

  m.def("run_strategy", &run_strategy, py::arg("arm_set"), py::arg("strategy"),
        py::arg("n"), py::arg("rng"));
  m.def("estimate_Un", &estimate_Un, py::arg("arm_set"), py::arg("strategy"),
        py::arg("u"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("estimate_second_moment", &estimate_second_moment, py::arg("arm_set"),
        py::arg("strategy"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<DpResult>(m, "DpResult")
      .def_readonly("value", &DpResult::value)
      .def_readonly("first_arm", &DpResult::first_arm)
      .def_readonly("exact", &DpResult::exact);
  m.def("exact_value_dp", &exact_value_dp, py::arg("arm_set"), py::arg("u"),
        py::arg("n"), py::call_guard<py::gil_scoped_release>());

  py::class_<Grid>(m, "Grid")
      .def_static("make", &Grid::make, py::arg("arm_set"), py::arg("x_points"),
                  py::arg("y_points"), py::arg("stability_factor") = 0.45,
                  py::arg("T") = 1.0)
      .def_readonly("x_min", &Grid::x_min)
      .def_readonly("x_max", &Grid::x_max)
      .def_readonly("y_min", &Grid::y_min)
      .def_readonly("y_max", &Grid::y_max)
      .def_readonly("x_points", &Grid::x_points)
      .def_readonly("y_points", &Grid::y_points)
      .def_readonly("t_steps", &Grid::t_steps)
      .def_readonly("dx", &Grid::dx)
      .def_readonly("dy", &Grid::dy)
      .def_readonly("dt", &Grid::dt);

  py::enum_<BoundaryPolicy>(m, "BoundaryPolicy")
      .value("SecondDerivativeZero", BoundaryPolicy::SecondDerivativeZero)
      .value("OneSidedUpwind", BoundaryPolicy::OneSidedUpwind);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](double epsilon, BoundaryPolicy boundary,
                       double stability_factor, int threads,
                       bool record_control) {
             SolverConfig c;
             c.epsilon_perturbation = epsilon;
             c.boundary = boundary;
             c.stability_factor = stability_factor;
             c.threads = threads;
             c.record_control = record_control;
             return c;
           }),
           py::arg("epsilon_perturbation") = 0.0,
           py::arg("boundary") = BoundaryPolicy::SecondDerivativeZero,
           py::arg("stability_factor") = 0.45, py::arg("threads") = 1,
           py::arg("record_control") = true)
      .def_readwrite("epsilon_perturbation",
                     &SolverConfig::epsilon_perturbation)
      .def_readwrite("boundary", &SolverConfig::boundary)
      .def_readwrite("stability_factor", &SolverConfig::stability_factor)
      .def_readwrite("threads", &SolverConfig::threads)
      .def_readwrite("record_control", &SolverConfig::record_control);

  py::class_<PdeSolution>(m, "PdeSolution")
      .def_readonly("grid", &PdeSolution::grid)
      .def_readonly("values", &PdeSolution::values)
      .def_readonly("control", &PdeSolution::control)
      .def_readonly("corner_value", &PdeSolution::corner_value)
      .def("value_at", &PdeSolution::value_at, py::arg("x"), py::arg("y"));

  m.def("solve_hjb", &solve_hjb, py::arg("arm_set"), py::arg("u"),
        py::arg("grid"), py::arg("config") = SolverConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def("feynman_kac_value", &feynman_kac_value, py::arg("mu"),
        py::arg("sigma2"), py::arg("u"), py::arg("quadrature_order") = 64);
  m.def("perturbed_driver", &perturbed_driver, py::arg("arm_set"),
        py::arg("epsilon"));

  py::class_<ExtremeReductionResult>(m, "ExtremeReductionResult")
      .def_readonly("value_full", &ExtremeReductionResult::value_full)
      .def_readonly("value_extreme", &ExtremeReductionResult::value_extreme)
      .def_readonly("delta", &ExtremeReductionResult::delta);
  m.def("extreme_reduction_check", &extreme_reduction_check,
        py::arg("arm_set"), py::arg("u"), py::arg("grid"),
        py::arg("config") = SolverConfig{},
        py::call_guard<py::gil_scoped_release>());

  py::enum_<CertVerdict>(m, "CertVerdict")
      .value("Yes", CertVerdict::Yes)
      .value("No", CertVerdict::No)
      .value("Inconclusive", CertVerdict::Inconclusive);
  py::class_<SpecializationCertificate>(m, "SpecializationCertificate")
      .def_readonly("holds_for_arm1", &SpecializationCertificate::holds_for_arm1)
      .def_readonly("holds_for_arm2", &SpecializationCertificate::holds_for_arm2)
      .def_readonly("witness1", &SpecializationCertificate::witness1)
      .def_readonly("witness2", &SpecializationCertificate::witness2)
      .def_readonly("ratio_bound", &SpecializationCertificate::ratio_bound)
      .def_readonly("analytic", &SpecializationCertificate::analytic);
  m.def(
      "specialization_certificate",
      [](const UtilityIndex& u, const Arm& a1, const Arm& a2) {
        return specialization_certificate(u, a1, a2);
      },
      py::arg("u"), py::arg("arm1"), py::arg("arm2"));

  py::class_<ObmParams>(m, "ObmParams")
      .def(py::init([](double sigma_pos, double sigma_neg) {
             return ObmParams{sigma_pos, sigma_neg};
           }),
           py::arg("sigma_pos"), py::arg("sigma_neg"))
      .def_readwrite("sigma_pos", &ObmParams::sigma_pos)
      .def_readwrite("sigma_neg", &ObmParams::sigma_neg);
  py::class_<ObmSimResult>(m, "ObmSimResult")
      .def_readonly("prob_nonneg", &ObmSimResult::prob_nonneg)
      .def_readonly("prob_se", &ObmSimResult::prob_se)
      .def_readonly("neg_second_moment", &ObmSimResult::neg_second_moment)
      .def_readonly("neg_se", &ObmSimResult::neg_se)
      .def_readonly("paths", &ObmSimResult::paths);
  m.def("obm_density", &obm_density, py::arg("params"), py::arg("t"),
        py::arg("y"));
  m.def("obm_prob_nonneg", &obm_prob_nonneg, py::arg("params"));
  m.def("obm_negative_second_moment", &obm_negative_second_moment,
        py::arg("params"), py::arg("t"));
  m.def("switch_value_semivariance", &switch_value_semivariance,
        py::arg("mu1"), py::arg("sigma1"), py::arg("mu2"), py::arg("sigma2"),
        py::arg("alpha"));
  m.def("shortfall_switch_bound", &shortfall_switch_bound, py::arg("mu1"),
        py::arg("sigma1"), py::arg("mu2"), py::arg("sigma2"));
  m.def("simulate_obm", &simulate_obm, py::arg("params"), py::arg("t"),
        py::arg("steps"), py::arg("paths"), py::arg("seed"),
        py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
}
