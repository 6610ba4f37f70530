#include "riskphase/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "riskphase/errors.hpp"

namespace riskphase {

double feasibility_discriminant(const QuadScalars& s, double phi) {
  return s.b * s.b - s.a * s.c + s.a * phi * phi;
}

double feasibility_tolerance(const QuadScalars& s, double phi) {
  return 1e-12 * std::max(1.0, s.b * s.b + std::abs(s.a * s.c) + s.a * phi * phi);
}

FeasibilityReport check_feasibility(const CholeskyFactor& factor, const Vector& mu,
                                    const RiskSpec& spec) {
  FeasibilityReport report;
  report.scalars = quad_scalars(factor, mu);
  report.discriminant = feasibility_discriminant(report.scalars, spec.phi());
  report.status = report.discriminant > feasibility_tolerance(report.scalars, spec.phi())
                      ? FeasibilityStatus::Feasible
                      : FeasibilityStatus::InfeasibleDiscriminant;
  return report;
}

FeasibilityReport check_feasibility(const MomentParams& m, const RiskSpec& spec) {
  if (m.sigma.rows() != m.dim() || m.sigma.cols() != m.dim()) {
    throw ShapeError("check_feasibility: dimension mismatch");
  }
  try {
    return check_feasibility(cholesky(m.sigma), m.mu, spec);
  } catch (const NotPositiveDefiniteError&) {
    FeasibilityReport report;
    report.status = FeasibilityStatus::InfeasibleSingular;
    report.discriminant = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
}

OptimalPortfolio optimize_with_factor(const CholeskyFactor& factor, const Vector& mu,
                                      const RiskSpec& spec, double budget) {
  if (budget == 0.0) {
    throw std::domain_error("optimize: budget must be nonzero");
  }
  const FeasibilityReport report = check_feasibility(factor, mu, spec);
  if (!report.feasible()) {
    throw ContractViolationError("optimize called on an infeasible problem (discriminant " +
                                 std::to_string(report.discriminant) + ")");
  }
  const QuadScalars& s = report.scalars;
  const double root = std::sqrt(report.discriminant);
  const double sign = budget > 0.0 ? 1.0 : -1.0;
  // Smaller root for positive budgets; mirrored for negative ones.
  const double lambda = (s.b - sign * root) / s.a;

  OptimalPortfolio opt;
  opt.scalars = s;
  opt.lambda_star = lambda;
  const Vector direction =
      spd_solve(factor, mu - Vector::Constant(factor.dim(), lambda));
  const double direction_sum = direction.sum();  // analytically sign * sqrt(disc)
  opt.portfolio.budget = budget;
  opt.portfolio.weights = direction * (budget / direction_sum);
  opt.eta_star = direction_sum / (2.0 * budget);
  opt.z_star =
      (factor.lower.transpose().triangularView<Eigen::Upper>() * opt.portfolio.weights)
          .squaredNorm();
  opt.risk_value = spec.phi() * std::sqrt(opt.z_star) - mu.dot(opt.portfolio.weights);
  return opt;
}

OptimalPortfolio optimize(const MomentParams& m, const RiskSpec& spec, double budget) {
  if (m.sigma.rows() != m.dim() || m.sigma.cols() != m.dim()) {
    throw ShapeError("optimize: dimension mismatch");
  }
  CholeskyFactor factor;
  try {
    factor = cholesky(m.sigma);
  } catch (const NotPositiveDefiniteError&) {
    throw ContractViolationError("optimize called with a singular covariance");
  }
  return optimize_with_factor(factor, m.mu, spec, budget);
}

Vector infeasibility_witness(const MomentParams& m, const RiskSpec& spec) {
  CholeskyFactor factor;
  try {
    factor = cholesky(m.sigma);
  } catch (const NotPositiveDefiniteError&) {
    throw ContractViolationError(
        "infeasibility_witness: covariance is singular, not discriminant-infeasible");
  }
  const FeasibilityReport report = check_feasibility(factor, m.mu, spec);
  if (report.status != FeasibilityStatus::InfeasibleDiscriminant) {
    throw ContractViolationError("infeasibility_witness called on a feasible problem");
  }
  const Vector v_mu = spd_solve(factor, m.mu);
  const Vector v_one = spd_solve(factor, Vector::Ones(m.dim()));
  return v_mu - (report.scalars.b / report.scalars.a) * v_one;
}

EstimationError q0_ratio(const MomentParams& true_m, const RiskSpec& true_spec,
                         const Portfolio& estimated_w) {
  validate_portfolio(estimated_w);
  if (estimated_w.weights.size() != true_m.dim()) {
    throw ShapeError("q0_ratio: dimension mismatch");
  }
  if (!(estimated_w.budget > 0.0)) {
    throw std::domain_error("q0_ratio: estimated portfolio budget must be positive");
  }
  const OptimalPortfolio true_opt = optimize(true_m, true_spec, 1.0);
  if (!(true_opt.risk_value > 0.0)) {
    throw DegenerateDenominatorError("q0_ratio: true optimal risk is not positive (" +
                                     std::to_string(true_opt.risk_value) + ")");
  }
  Portfolio unit;
  unit.budget = 1.0;
  unit.weights = estimated_w.weights / estimated_w.budget;
  EstimationError err;
  err.q0 = portfolio_risk(unit, true_m, true_spec) / true_opt.risk_value;
  err.q0_squared = err.q0 * err.q0;
  return err;
}

}  // namespace riskphase
