#pragma once

#include <vector>

#include "riskphase/mcharness.hpp"

namespace riskphase {

/// Probit-shaped feasibility curve g(x) = 1 - Phi((x - mu) / sigma) fitted to
/// binomial phase points by maximum likelihood. Standard errors come from the
/// observed information at the optimum.
struct ProbitFit {
  double mu_fit = 0.0;     // midpoint in r = N/T: g(mu_fit) = 0.5
  double sigma_fit = 0.0;  // curve width, > 0
  double se_mu = 0.0;
  double se_sigma = 0.0;
  double log_likelihood = 0.0;
  int n_points = 0;  // points entering the fit (structural zeros excluded)
};

/// g(x) for given curve parameters.
double probit_curve(double mu, double sigma, double x);
double probit_curve(const ProbitFit& fit, double x);

/**
 * Maximum-likelihood probit fit to phase points sharing (N, phi).
 *
 * The binomial log-likelihood sum_k [L_k log g(x_k) + (K_k - L_k) log(1 - g(x_k))]
 * with x = N/T is maximized by damped Newton in (mu, log sigma), initialized
 * from the two points bracketing p = 0.5, with a coordinate-search fallback.
 * Points with T - 1 < N are structurally infeasible and excluded.
 *
 * Throws UnidentifiableFitError when every usable point is saturated at 0 or 1,
 * ConvergenceError when the gradient norm cannot be brought below 1e-8.
 */
ProbitFit fit_probit(const std::vector<PhasePoint>& points);

/// Aspect ratio r at which the fitted curve passes p_target:
/// r = mu_fit + sigma_fit * Phi^{-1}(1 - p_target).
double contour_r(const ProbitFit& fit, double p_target);

/// Unique crossing of two fitted curves,
/// r* = (mu_a sigma_b - mu_b sigma_a) / (sigma_b - sigma_a);
/// near-equal widths raise NoIntersectionError.
double critical_point_intersection(const ProbitFit& fit_a, const ProbitFit& fit_b);

}  // namespace riskphase
