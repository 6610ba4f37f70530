#include "riskphase/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "riskphase/errors.hpp"
#include "riskphase/special.hpp"

namespace riskphase {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
constexpr double kTailCut = 30.0;

double log_norm_cdf(double t) {
  if (t > -kTailCut) {
    return std::log(0.5 * std::erfc(-t / kSqrt2));
  }
  // Deep lower tail: asymptotic expansion of log Phi(t).
  const double t2 = t * t;
  return -0.5 * t2 - std::log(-t) - kLogSqrt2Pi + std::log1p(-1.0 / t2 + 3.0 / (t2 * t2));
}

// phi(t) / Phi(t); the deep tail uses the inverse Mills expansion.
double inv_mills(double t) {
  if (t > -kTailCut) {
    return norm_pdf(t) / (0.5 * std::erfc(-t / kSqrt2));
  }
  return -t - 1.0 / t;
}

struct FitPoint {
  double x = 0.0;  // r = N/T
  double successes = 0.0;
  double failures = 0.0;
};

struct Derivs {
  double value = 0.0;
  double g_mu = 0.0, g_s = 0.0;
  double h_mumu = 0.0, h_mus = 0.0, h_ss = 0.0;
};

double log_likelihood(const std::vector<FitPoint>& pts, double mu, double s) {
  const double sigma = std::exp(s);
  double ll = 0.0;
  for (const FitPoint& p : pts) {
    double t = (p.x - mu) / sigma;
    t = std::clamp(t, -37.0, 37.0);
    ll += p.successes * log_norm_cdf(-t) + p.failures * log_norm_cdf(t);
  }
  return ll;
}

Derivs derivatives(const std::vector<FitPoint>& pts, double mu, double s) {
  const double sigma = std::exp(s);
  Derivs d;
  for (const FitPoint& p : pts) {
    double t = (p.x - mu) / sigma;
    t = std::clamp(t, -37.0, 37.0);
    const double h0 = inv_mills(t);    // phi/Phi(t)
    const double h1 = inv_mills(-t);   // phi/Phi(-t)
    const double lp = -p.successes * h1 + p.failures * h0;
    const double lpp = -t * lp - p.successes * h1 * h1 - p.failures * h0 * h0;
    d.value += p.successes * log_norm_cdf(-t) + p.failures * log_norm_cdf(t);
    d.g_mu += lp * (-1.0 / sigma);
    d.g_s += lp * (-t);
    d.h_mumu += lpp / (sigma * sigma);
    d.h_mus += (lpp * t + lp) / sigma;
    d.h_ss += lpp * t * t + lp * t;
  }
  return d;
}

// Newton ascent step from the (damped) negated Hessian; returns false when the
// 2x2 system is too degenerate to solve.
bool newton_step(const Derivs& d, double ridge, double& dmu, double& ds) {
  const double m00 = -d.h_mumu + ridge;
  const double m01 = -d.h_mus;
  const double m11 = -d.h_ss + ridge;
  const double det = m00 * m11 - m01 * m01;
  if (!(m00 > 0.0) || !(det > 0.0)) return false;
  dmu = (m11 * d.g_mu - m01 * d.g_s) / det;
  ds = (m00 * d.g_s - m01 * d.g_mu) / det;
  return std::isfinite(dmu) && std::isfinite(ds);
}

double grad_norm(const Derivs& d) { return std::hypot(d.g_mu, d.g_s); }

bool newton_solve(const std::vector<FitPoint>& pts, double& mu, double& s, int max_iter) {
  for (int iter = 0; iter < max_iter; ++iter) {
    const Derivs d = derivatives(pts, mu, s);
    if (grad_norm(d) <= 1e-8) return true;
    const double scale = std::max({1.0, std::abs(d.h_mumu), std::abs(d.h_ss)});
    double ridge = 0.0;
    double dmu = 0.0, ds = 0.0;
    while (!newton_step(d, ridge, dmu, ds)) {
      ridge = (ridge == 0.0) ? 1e-10 * scale : ridge * 100.0;
      if (ridge > 1e20 * scale) return false;
    }
    // Full Newton step whenever it contracts the gradient; near the optimum
    // the likelihood is flat to rounding and an Armijo search would crawl.
    const Derivs at_full = derivatives(pts, mu + dmu, s + ds);
    if (grad_norm(at_full) <= 0.5 * grad_norm(d)) {
      mu += dmu;
      s += ds;
      continue;
    }
    double step = 1.0;
    const double ascent = d.g_mu * dmu + d.g_s * ds;
    bool moved = false;
    for (int half = 0; half < 50; ++half) {
      const double ll = log_likelihood(pts, mu + step * dmu, s + step * ds);
      if (ll >= d.value + 1e-4 * step * ascent) {
        mu += step * dmu;
        s += step * ds;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return false;
  }
  return grad_norm(derivatives(pts, mu, s)) <= 1e-8;
}

void coordinate_search(const std::vector<FitPoint>& pts, double& mu, double& s) {
  double best = log_likelihood(pts, mu, s);
  double step = 0.25;
  while (step > 1e-13) {
    bool improved = false;
    const double cand_mu[2] = {mu - step, mu + step};
    const double cand_s[2] = {s - step, s + step};
    for (double m : cand_mu) {
      const double ll = log_likelihood(pts, m, s);
      if (ll > best) { best = ll; mu = m; improved = true; }
    }
    for (double v : cand_s) {
      const double ll = log_likelihood(pts, mu, v);
      if (ll > best) { best = ll; s = v; improved = true; }
    }
    if (!improved) step *= 0.5;
  }
}

}  // namespace

double probit_curve(double mu, double sigma, double x) {
  return 1.0 - norm_cdf((x - mu) / sigma);
}

double probit_curve(const ProbitFit& fit, double x) {
  return probit_curve(fit.mu_fit, fit.sigma_fit, x);
}

ProbitFit fit_probit(const std::vector<PhasePoint>& points) {
  if (points.size() < 2) {
    throw std::domain_error("fit_probit: need at least 2 points");
  }
  const Index n_assets = points.front().n_assets;
  const double phi = points.front().phi;
  std::vector<FitPoint> pts;
  pts.reserve(points.size());
  for (const PhasePoint& p : points) {
    if (p.n_assets != n_assets || p.phi != phi) {
      throw ShapeError("fit_probit: points must share (N, phi)");
    }
    if (p.n_obs - 1 < p.n_assets) continue;  // structural zero, outside the model
    FitPoint fp;
    fp.x = p.r();
    fp.successes = static_cast<double>(p.successes);
    fp.failures = static_cast<double>(p.trials - p.successes);
    pts.push_back(fp);
  }
  if (pts.size() < 2) {
    throw std::domain_error("fit_probit: fewer than 2 usable points after exclusions");
  }
  std::sort(pts.begin(), pts.end(), [](const FitPoint& a, const FitPoint& b) { return a.x < b.x; });
  bool any_interior = false;
  for (const FitPoint& p : pts) {
    if (p.successes > 0.0 && p.failures > 0.0) any_interior = true;
  }
  if (!any_interior) {
    throw UnidentifiableFitError("fit_probit: every point is saturated at 0 or 1");
  }
  const double span = pts.back().x - pts.front().x;
  if (!(span > 0.0)) {
    throw UnidentifiableFitError("fit_probit: all points share one abscissa");
  }

  // Initializer: linear interpolation between the two points bracketing
  // p = 0.5, slope-matched width; midpoint-of-range fallback.
  double mu0 = 0.5 * (pts.front().x + pts.back().x);
  double sigma0 = 0.5 * span;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double p_lo = pts[i].successes / (pts[i].successes + pts[i].failures);
    const double p_hi = pts[i + 1].successes / (pts[i + 1].successes + pts[i + 1].failures);
    if (p_lo >= 0.5 && p_hi < 0.5) {
      const double dx = pts[i + 1].x - pts[i].x;
      mu0 = pts[i].x + (p_lo - 0.5) / (p_lo - p_hi) * dx;
      const double slope = (p_hi - p_lo) / dx;
      sigma0 = -norm_pdf(0.0) / slope;
      break;
    }
  }
  sigma0 = std::clamp(sigma0, 1e-4 * span, 10.0 * span);

  double mu = mu0;
  double s = std::log(sigma0);
  bool converged = newton_solve(pts, mu, s, 500);
  if (!converged) {
    coordinate_search(pts, mu, s);
    converged = newton_solve(pts, mu, s, 500);
  }
  if (!converged) {
    throw ConvergenceError("fit_probit: gradient norm not reduced below 1e-8");
  }

  const Derivs d = derivatives(pts, mu, s);
  ProbitFit fit;
  fit.mu_fit = mu;
  fit.sigma_fit = std::exp(s);
  fit.log_likelihood = d.value;
  fit.n_points = static_cast<int>(pts.size());
  const double m00 = -d.h_mumu, m01 = -d.h_mus, m11 = -d.h_ss;
  const double det = m00 * m11 - m01 * m01;
  if (det > 0.0 && m00 > 0.0) {
    fit.se_mu = std::sqrt(m11 / det);
    fit.se_sigma = fit.sigma_fit * std::sqrt(m00 / det);
  } else {
    fit.se_mu = std::numeric_limits<double>::quiet_NaN();
    fit.se_sigma = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

double contour_r(const ProbitFit& fit, double p_target) {
  if (!(p_target > 0.0 && p_target < 1.0)) {
    throw std::domain_error("contour_r: p_target must lie strictly inside (0, 1)");
  }
  return fit.mu_fit + fit.sigma_fit * norm_inv_cdf(1.0 - p_target);
}

double critical_point_intersection(const ProbitFit& fit_a, const ProbitFit& fit_b) {
  const double sep = std::abs(fit_a.sigma_fit - fit_b.sigma_fit);
  if (sep <= 1e-6 * std::max(fit_a.sigma_fit, fit_b.sigma_fit)) {
    throw NoIntersectionError("critical_point_intersection: curve widths are too close (" +
                              std::to_string(fit_a.sigma_fit) + " vs " +
                              std::to_string(fit_b.sigma_fit) + ")");
  }
  return (fit_a.mu_fit * fit_b.sigma_fit - fit_b.mu_fit * fit_a.sigma_fit) /
         (fit_b.sigma_fit - fit_a.sigma_fit);
}

}  // namespace riskphase
