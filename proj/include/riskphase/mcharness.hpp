#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "riskphase/optimizer.hpp"
#include "riskphase/risk.hpp"
#include "riskphase/sampling.hpp"

namespace riskphase {

/// Outcome of one Monte Carlo trial: whether the sample problem was feasible,
/// and if so the squared estimation error of its optimum.
struct TrialRecord {
  bool feasible = false;
  std::optional<double> q0_squared;
};

/// One measured point of the feasibility phase diagram.
struct PhasePoint {
  Index n_assets = 0;
  Index n_obs = 0;
  double phi = 0.0;
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double p_hat = 0.0;  // successes / trials, exactly
  std::uint64_t master_seed = 0;

  double r() const { return static_cast<double>(n_assets) / static_cast<double>(n_obs); }
  /// sqrt(p(1-p)/K) evaluated at p_hat.
  double binomial_stderr() const;
};

/// Conditional statistics of q0^2 over the feasible trials only.
struct QZeroStats {
  std::int64_t n_trials = 0;
  std::int64_t n_feasible = 0;
  double mean_q0_squared = 0.0;      // NaN when no feasible trials
  double variance_q0_squared = 0.0;  // unbiased; NaN when fewer than 2
  std::vector<double> samples;       // per-feasible-trial q0^2, in trial order

  bool has_stats() const { return n_feasible > 0; }
};

/// One cell of a phase-diagram scan.
struct GridCell {
  Index n_assets = 0;
  Index n_obs = 0;
  double phi = 0.0;
};

/// Data-generating truth prepared for repeated trials: parameters, their
/// Cholesky factor, and the true optimum at unit budget.
struct TruthModel {
  MomentParams params;
  CholeskyFactor factor;
  OptimalPortfolio optimum;
  bool iid = false;  // mu = 0 and sigma = I: sampling can skip the transform
};

/// Standard iid truth: zero means and unit covariance.
MomentParams iid_truth(Index n_assets);

/// Prepares a TruthModel; throws ContractViolationError when the truth itself
/// is infeasible under the given measure.
TruthModel make_truth_model(const MomentParams& params, const RiskSpec& spec);

/**
 * One trial: draw an N x T sample from the truth, estimate moments with the
 * unbiased estimators, test feasibility of the estimated problem, and when
 * feasible optimize it and evaluate q0^2 against the truth.
 *
 * Pure function of (n_obs, spec, seed, truth); infeasibility is a recorded
 * outcome, not an error.
 */
TrialRecord run_trial(Index n_obs, const RiskSpec& spec, const SeedSpec& seed,
                      const TruthModel& truth);
TrialRecord run_trial(Index n_assets, Index n_obs, const RiskSpec& spec, const SeedSpec& seed,
                      const MomentParams& truth);

/// Runs `count` independent tasks on `workers` threads (0 = hardware
/// concurrency). Tasks must write only to their own slot; any task exception
/// is rethrown on the calling thread.
void parallel_for_index(std::size_t count, unsigned workers,
                        const std::function<void(std::size_t)>& task);

/// Feasibility probability at one (N, T, phi) point over `trials` samples,
/// trial k seeded by (master_seed, k). Identical output for any worker count.
PhasePoint estimate_feasibility_prob(Index n_assets, Index n_obs, const RiskSpec& spec,
                                     std::int64_t trials, std::uint64_t master_seed,
                                     unsigned workers = 0);
PhasePoint estimate_feasibility_prob(Index n_obs, const RiskSpec& spec, std::int64_t trials,
                                     std::uint64_t master_seed, const TruthModel& truth,
                                     unsigned workers = 0);

/// Conditional mean and variance of q0^2 over feasible trials at one point.
QZeroStats measure_q0(Index n_assets, Index n_obs, const RiskSpec& spec, std::int64_t trials,
                      std::uint64_t master_seed, const MomentParams& truth,
                      unsigned workers = 0);

/// Scans a grid of (N, T, phi) cells; cell i uses the substream seed
/// derive_substream_seed(master_seed, i), so a one-cell grid reproduces
/// estimate_feasibility_prob at that derived seed. truth_sigma, when present,
/// is a zero-mean correlated truth and must match every cell's N.
std::vector<PhasePoint> scan_phase_grid(const std::vector<GridCell>& grid, std::int64_t trials,
                                        std::uint64_t master_seed,
                                        const std::optional<Matrix>& truth_sigma = std::nullopt,
                                        unsigned workers = 0);

}  // namespace riskphase
