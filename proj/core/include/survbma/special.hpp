#pragma once

#include <span>

namespace survbma::special {

/// log(1 + e^x) without overflow.
double log1p_exp(double x);

/// log(e^a + e^b); handles -inf arguments.
double log_sum_exp(double a, double b);
double log_sum_exp(std::span<const double> xs);

double normal_pdf(double z);
double normal_logpdf(double z);
double normal_cdf(double z);

/// log Phi(z), accurate far into the lower tail (asymptotic expansion below z = -36).
double normal_logcdf(double z);

/// Inverse standard normal CDF (Wichura's PPND16 rational approximations).
double normal_quantile(double p);

/// log(Phi(b) - Phi(a)) for standardized bounds a < b, either possibly infinite.
double normal_logmass(double a, double b);

/// Regularized lower/upper incomplete gamma P(shape, x), Q(shape, x) and log Q.
/// Series expansion below x = shape + 1, continued fraction above.
double gamma_p(double shape, double x);
double gamma_q(double shape, double x);
double log_gamma_q(double shape, double x);

/// Inverse of P(shape, .): u with P(shape, u) = p, relative tolerance 1e-10.
double gamma_p_inverse(double shape, double p);

}  // namespace survbma::special
