#pragma once

#include <stdexcept>
#include <string>

#include "riskphase/errors.hpp"
#include "riskphase/risk.hpp"

namespace riskphase {

/// Critical aspect ratio r_c(phi) = phi^2 / (phi^2 + 1) separating the
/// feasible phase (r < r_c) from the unfeasible one in the large-N limit.
inline double phase_boundary_rc(double phi) {
  if (!(phi > 0.0)) {
    throw std::domain_error("phase_boundary_rc: phi must be positive, got " +
                            std::to_string(phi));
  }
  const double phi2 = phi * phi;
  return phi2 / (phi2 + 1.0);
}

/// Phase boundary in the confidence-level parameterization of VaR or ES.
inline double phase_boundary_rc_alpha(Measure kind, double alpha) {
  if (kind != Measure::VaR && kind != Measure::ES) {
    throw std::domain_error("phase_boundary_rc_alpha: measure must be VaR or ES");
  }
  return phase_boundary_rc(phi_of_alpha(kind, alpha));
}

/// Large-N conditional average of q0^2 at aspect ratio r = N/T:
///   r_c / (r_c - r),  defined for 0 <= r < r_c;
/// diverges as r approaches r_c (DivergenceError at or beyond it).
inline double expected_q0_squared(double phi, double r) {
  const double rc = phase_boundary_rc(phi);
  if (!(r >= 0.0)) {
    throw std::domain_error("expected_q0_squared: r must be nonnegative, got " +
                            std::to_string(r));
  }
  if (r >= rc) {
    throw DivergenceError("expected_q0_squared diverges: r = " + std::to_string(r) +
                          " >= r_c = " + std::to_string(rc));
  }
  return rc / (rc - r);
}

/// Algebraically identical form phi^2 / ((1 - r) phi^2 - r); kept separate so
/// the two evaluations can be compared.
inline double expected_q0_squared_phi_form(double phi, double r) {
  const double rc = phase_boundary_rc(phi);
  if (!(r >= 0.0)) {
    throw std::domain_error("expected_q0_squared: r must be nonnegative, got " +
                            std::to_string(r));
  }
  if (r >= rc) {
    throw DivergenceError("expected_q0_squared diverges: r = " + std::to_string(r) +
                          " >= r_c = " + std::to_string(rc));
  }
  const double phi2 = phi * phi;
  return phi2 / ((1.0 - r) * phi2 - r);
}

/// Classical benchmark for variance minimization: E q0^2 = 1 / (1 - r),
/// diverging at r = 1.
inline double variance_benchmark_q0_squared(double r) {
  if (!(r >= 0.0)) {
    throw std::domain_error("variance_benchmark_q0_squared: r must be nonnegative, got " +
                            std::to_string(r));
  }
  if (r >= 1.0) {
    throw DivergenceError("variance_benchmark_q0_squared diverges at r >= 1, got " +
                          std::to_string(r));
  }
  return 1.0 / (1.0 - r);
}

}  // namespace riskphase
