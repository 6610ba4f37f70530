#pragma once

namespace riskphase {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF Phi(x). Absolute error below 1e-12 for |x| <= 8.
/// Throws std::domain_error for non-finite input.
double norm_cdf(double x);

/**
 * Inverse standard normal CDF.
 *
 * Acklam's rational approximation refined by one Newton step against
 * norm_cdf, evaluated in the lower tail to avoid cancellation. Absolute
 * error below 1e-12 for p in [1e-12, 1 - 1e-12].
 *
 * Throws std::domain_error unless 0 < p < 1.
 */
double norm_inv_cdf(double p);

/// Gaussian Expected Shortfall tail factor
///   exp(-z^2/2) / ((1 - alpha) sqrt(2 pi)),  z = Phi^{-1}(alpha),
/// i.e. the mean of a standard normal beyond its alpha-quantile.
/// Strictly increasing in alpha. Throws std::domain_error unless 0 < alpha < 1.
double es_tail_factor(double alpha);

}  // namespace riskphase
