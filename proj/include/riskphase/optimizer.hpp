#pragma once

#include "riskphase/risk.hpp"
#include "riskphase/spdlinalg.hpp"

namespace riskphase {

enum class FeasibilityStatus { Feasible, InfeasibleDiscriminant, InfeasibleSingular };

/// Outcome of the existence test for the risk minimum: the covariance must
/// factorize and the discriminant b^2 - a*c + a*phi^2 must be positive.
struct FeasibilityReport {
  FeasibilityStatus status = FeasibilityStatus::InfeasibleSingular;
  double discriminant = 0.0;  // NaN when the covariance is singular
  QuadScalars scalars;

  bool feasible() const { return status == FeasibilityStatus::Feasible; }
};

/// Closed-form minimizer of phi * sqrt(w' Sigma w) - mu' w on the budget
/// hyperplane, with its multipliers and scalar diagnostics.
struct OptimalPortfolio {
  Portfolio portfolio;
  double lambda_star = 0.0;  // budget multiplier; risk_value = -lambda_star * budget
  double eta_star = 0.0;     // variance multiplier, recovered from stationarity
  double z_star = 0.0;       // w*' Sigma w*
  double risk_value = 0.0;
  QuadScalars scalars;
};

/// q0 = true risk of the estimated optimum over the true optimal risk; >= 1.
struct EstimationError {
  double q0 = 1.0;
  double q0_squared = 1.0;
};

/// b^2 - a*c + a*phi^2.
double feasibility_discriminant(const QuadScalars& s, double phi);

/// Relative guard below which a discriminant is not treated as positive:
/// 1e-12 * max(1, b^2 + |a*c| + a*phi^2).
double feasibility_tolerance(const QuadScalars& s, double phi);

FeasibilityReport check_feasibility(const MomentParams& m, const RiskSpec& spec);
FeasibilityReport check_feasibility(const CholeskyFactor& factor, const Vector& mu,
                                    const RiskSpec& spec);

/**
 * Closed-form optimum for a feasible problem.
 *
 * lambda* solves the stationarity quadratic (smaller root); the weights are
 * Sigma^-1 (mu - lambda* 1) rescaled to meet the budget exactly; eta* follows
 * from 2 eta* Sigma w* = mu - lambda* 1. Throws ContractViolationError when
 * called on an infeasible problem and std::domain_error for budget 0.
 */
OptimalPortfolio optimize(const MomentParams& m, const RiskSpec& spec, double budget = 1.0);
OptimalPortfolio optimize_with_factor(const CholeskyFactor& factor, const Vector& mu,
                                      const RiskSpec& spec, double budget = 1.0);

/// Certificate of infeasibility: a budget-neutral direction u (1'u = 0) along
/// which the risk decreases without bound. Only valid when check_feasibility
/// reports InfeasibleDiscriminant; otherwise ContractViolationError.
Vector infeasibility_witness(const MomentParams& m, const RiskSpec& spec);

/// Estimation-error ratio q0 of an estimated portfolio against the true
/// optimum, both evaluated under the true parameters and normalized to unit
/// budget first (the ratio is budget-convention invariant).
EstimationError q0_ratio(const MomentParams& true_m, const RiskSpec& true_spec,
                         const Portfolio& estimated_w);

}  // namespace riskphase
