#pragma once

#include <span>

namespace alps {

/// log(sum(exp(v))); returns -inf for an empty span or all -inf entries.
double logsumexp(std::span<const double> v);

/// Standard normal log-density.
double log_normal_pdf(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// log Phi(x), accurate in the far left tail (no underflow down to -1e4).
double log_normal_cdf(double x);

/// phi(x) / Phi(x), the derivative of log Phi.
double normal_hazard(double x);

/// Regularised lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Quantile of the chi-squared distribution with `dof` degrees of freedom.
/// Wilson-Hilferty starting guess, then bisection on P(dof/2, x/2).
double chi_squared_quantile(double p, double dof);

}  // namespace alps
