#pragma once

#include <numbers>

#include "riskphase/spdlinalg.hpp"

namespace riskphase {

enum class Measure { VaR, ES, Semivariance, RawPhi };

/// Tail factor of the parametric semivariance risk measure, sigma/sqrt(2) - mu.
inline constexpr double kSemivariancePhi = std::numbers::sqrt2 / 2.0;

/// Tail factor phi(alpha) of the parametric risk form phi * sigma - mu:
///   VaR:          Phi^{-1}(alpha),            alpha in (0.5, 1)
///   ES:           Gaussian tail mean factor,  alpha in (0, 1)
///   Semivariance: the constant 1/sqrt(2)      (alpha ignored)
/// Throws std::domain_error for out-of-domain alpha or kind RawPhi.
double phi_of_alpha(Measure kind, double alpha);

/// Inverse of phi_of_alpha for VaR and ES; the ES branch brackets and bisects
/// the monotone tail factor. Result satisfies |phi_of_alpha(kind, alpha) - phi|
/// <= 1e-9 whenever alpha is representable with that much slack.
/// Throws std::domain_error for Semivariance/RawPhi or non-bracketable phi.
double alpha_of_phi(Measure kind, double phi);

/// Which risk measure is being optimized and its single tail parameter.
class RiskSpec {
public:
  static RiskSpec var(double alpha);
  static RiskSpec es(double alpha);
  static RiskSpec semivariance();
  static RiskSpec raw_phi(double phi);

  Measure kind() const { return kind_; }
  double phi() const { return phi_; }
  bool has_alpha() const;
  double alpha() const;  // throws std::domain_error when no alpha applies

private:
  RiskSpec(Measure kind, double phi, double alpha) : kind_(kind), phi_(phi), alpha_(alpha) {}
  Measure kind_;
  double phi_;
  double alpha_;
};

enum class MomentOrigin { True, Estimated };

/// Mean vector and covariance matrix, true or estimated.
struct MomentParams {
  Vector mu;
  Matrix sigma;
  MomentOrigin origin = MomentOrigin::True;
  Index dim() const { return mu.size(); }
};

/// Weights plus the value their sum is constrained to (1 unless stated).
struct Portfolio {
  Vector weights;
  double budget = 1.0;
};

/// Throws ContractViolationError unless the weights sum to the budget within
/// 1e-10 * max(1, |budget|).
void validate_portfolio(const Portfolio& p);

/// Parametric portfolio risk phi * sqrt(w' Sigma w) - mu' w.
/// Quadratic-form values below a small negative roundoff band raise
/// NotPositiveDefiniteError; values inside the band clamp to zero.
double portfolio_risk(const Portfolio& p, const MomentParams& m, const RiskSpec& spec);

}  // namespace riskphase
