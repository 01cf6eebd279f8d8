#pragma once

#include <functional>

namespace bandit {

/// Expectation of f under N(mean, sigma2) by fixed-order Gauss-Hermite
/// quadrature. Exact for polynomials of degree < 2*order.
double gauss_hermite_expectation(const std::function<double(double)>& f,
                                 double mean, double sigma2, int order = 64);

/// Adaptive integral of f over (-inf, inf) (used as an independent check
/// against closed-form normalizations).
double integrate_real_line(const std::function<double(double)>& f,
                           double abs_tol = 1e-10, double rel_tol = 1e-10);

}  // namespace bandit
