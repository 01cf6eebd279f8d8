#include "bandit/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <mutex>

#include "bandit/errors.hpp"

namespace bandit {

namespace {

struct GslErrorSilencer {
  GslErrorSilencer() { gsl_set_error_handler_off(); }
};

void ensure_gsl_quiet() {
  static GslErrorSilencer s;
  (void)s;
}

double call_std_function(double x, void* params) {
  auto* f = static_cast<const std::function<double(double)>*>(params);
  return (*f)(x);
}

}  // namespace

double gauss_hermite_expectation(const std::function<double(double)>& f,
                                 double mean, double sigma2, int order) {
  ensure_gsl_quiet();
  if (order < 1) throw ConfigError("gauss_hermite_expectation: order < 1");
  if (!(sigma2 >= 0.0))
    throw ConfigError("gauss_hermite_expectation: sigma2 < 0");
  if (sigma2 == 0.0) return f(mean);

  // Weight exp(-b (x-a)^2) with b = 1/(2 sigma2) integrates the Gaussian
  // kernel; dividing by sqrt(2 pi sigma2) turns it into an expectation.
  gsl_integration_fixed_workspace* w = gsl_integration_fixed_alloc(
      gsl_integration_fixed_hermite, static_cast<size_t>(order), mean,
      1.0 / (2.0 * sigma2), 0.0, 0.0);
  if (w == nullptr)
    throw NumericalError("gauss_hermite_expectation: node allocation failed");
  gsl_function gf;
  gf.function = &call_std_function;
  gf.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0;
  const int status = gsl_integration_fixed(&gf, &result, w);
  gsl_integration_fixed_free(w);
  if (status != 0)
    throw NumericalError("gauss_hermite_expectation: quadrature failed");
  return result / std::sqrt(2.0 * M_PI * sigma2);
}

double integrate_real_line(const std::function<double(double)>& f,
                           double abs_tol, double rel_tol) {
  ensure_gsl_quiet();
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(4096);
  if (w == nullptr) throw ResourceError("integrate_real_line: allocation failed");
  gsl_function gf;
  gf.function = &call_std_function;
  gf.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0, abserr = 0.0;
  const int status =
      gsl_integration_qagi(&gf, abs_tol, rel_tol, 4096, w, &result, &abserr);
  gsl_integration_workspace_free(w);
  if (status != 0)
    throw NumericalError("integrate_real_line: adaptive quadrature failed");
  return result;
}

}  // namespace bandit
