#include "riskphase/risk.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "riskphase/errors.hpp"
#include "riskphase/special.hpp"

namespace riskphase {

double phi_of_alpha(Measure kind, double alpha) {
  switch (kind) {
    case Measure::VaR:
      if (!(alpha > 0.5 && alpha < 1.0)) {
        throw std::domain_error("VaR confidence level must lie in (0.5, 1), got " +
                                std::to_string(alpha));
      }
      return norm_inv_cdf(alpha);
    case Measure::ES:
      return es_tail_factor(alpha);  // domain check inside
    case Measure::Semivariance:
      return kSemivariancePhi;
    case Measure::RawPhi:
      throw std::domain_error("phi_of_alpha: RawPhi carries no confidence level");
  }
  throw std::domain_error("phi_of_alpha: unknown measure");
}

double alpha_of_phi(Measure kind, double phi) {
  if (!(phi > 0.0)) {
    throw std::domain_error("alpha_of_phi: phi must be positive, got " + std::to_string(phi));
  }
  if (kind == Measure::Semivariance || kind == Measure::RawPhi) {
    throw std::domain_error("alpha_of_phi: measure has no alpha parameterization");
  }
  if (kind == Measure::VaR) {
    const double alpha = norm_cdf(phi);
    if (!(alpha < 1.0)) {
      throw std::domain_error("alpha_of_phi: VaR level for phi = " + std::to_string(phi) +
                              " is not representable below 1");
    }
    return alpha;
  }
  // ES: bisection on the strictly increasing tail factor.
  double lo = 1e-12;
  double hi = std::nextafter(1.0, 0.0);
  if (es_tail_factor(lo) >= phi || es_tail_factor(hi) <= phi) {
    throw std::domain_error("alpha_of_phi: ES tail factor " + std::to_string(phi) +
                            " not bracketable in representable (0, 1)");
  }
  for (int iter = 0; iter < 200 && hi - lo > std::numeric_limits<double>::epsilon() * hi;
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (es_tail_factor(mid) < phi ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);
  if (std::abs(es_tail_factor(alpha) - phi) > 1e-9) {
    throw ConvergenceError("alpha_of_phi: residual above 1e-9 at phi = " + std::to_string(phi));
  }
  return alpha;
}

RiskSpec RiskSpec::var(double alpha) {
  return RiskSpec(Measure::VaR, phi_of_alpha(Measure::VaR, alpha), alpha);
}

RiskSpec RiskSpec::es(double alpha) {
  return RiskSpec(Measure::ES, phi_of_alpha(Measure::ES, alpha), alpha);
}

RiskSpec RiskSpec::semivariance() {
  return RiskSpec(Measure::Semivariance, kSemivariancePhi,
                  std::numeric_limits<double>::quiet_NaN());
}

RiskSpec RiskSpec::raw_phi(double phi) {
  if (!(phi > 0.0)) {
    throw std::domain_error("RiskSpec: phi must be positive, got " + std::to_string(phi));
  }
  return RiskSpec(Measure::RawPhi, phi, std::numeric_limits<double>::quiet_NaN());
}

bool RiskSpec::has_alpha() const { return kind_ == Measure::VaR || kind_ == Measure::ES; }

double RiskSpec::alpha() const {
  if (!has_alpha()) {
    throw std::domain_error("RiskSpec: measure carries no confidence level");
  }
  return alpha_;
}

void validate_portfolio(const Portfolio& p) {
  const double sum = p.weights.sum();
  const double tol = 1e-10 * std::max(1.0, std::abs(p.budget));
  if (!(std::abs(sum - p.budget) <= tol)) {
    throw ContractViolationError("portfolio weights sum to " + std::to_string(sum) +
                                 ", budget is " + std::to_string(p.budget));
  }
}

double portfolio_risk(const Portfolio& p, const MomentParams& m, const RiskSpec& spec) {
  if (p.weights.size() != m.dim() || m.sigma.rows() != m.dim() || m.sigma.cols() != m.dim()) {
    throw ShapeError("portfolio_risk: dimension mismatch");
  }
  double quad = p.weights.dot(m.sigma * p.weights);
  if (quad < 0.0) {
    const double scale =
        std::max(1.0, m.sigma.cwiseAbs().maxCoeff() * p.weights.squaredNorm());
    if (quad < -1e-12 * scale) {
      throw NotPositiveDefiniteError("portfolio_risk: quadratic form is negative (" +
                                     std::to_string(quad) + ")");
    }
    quad = 0.0;
  }
  return spec.phi() * std::sqrt(quad) - m.mu.dot(p.weights);
}

}  // namespace riskphase
