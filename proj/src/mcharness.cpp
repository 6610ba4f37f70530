#include "riskphase/mcharness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "riskphase/errors.hpp"

namespace riskphase {

double PhasePoint::binomial_stderr() const {
  if (trials <= 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

MomentParams iid_truth(Index n_assets) {
  MomentParams m;
  m.mu = Vector::Zero(n_assets);
  m.sigma = Matrix::Identity(n_assets, n_assets);
  m.origin = MomentOrigin::True;
  return m;
}

TruthModel make_truth_model(const MomentParams& params, const RiskSpec& spec) {
  TruthModel truth;
  truth.params = params;
  try {
    truth.factor = cholesky(params.sigma);
  } catch (const NotPositiveDefiniteError&) {
    throw ContractViolationError("make_truth_model: true covariance must be SPD");
  }
  truth.optimum = optimize_with_factor(truth.factor, params.mu, spec, 1.0);
  truth.iid = params.mu.isZero(0.0) && params.sigma.isIdentity(0.0);
  return truth;
}

TrialRecord run_trial(Index n_obs, const RiskSpec& spec, const SeedSpec& seed,
                      const TruthModel& truth) {
  const Index n_assets = truth.params.dim();
  ReturnSample sample = truth.iid ? gen_iid_sample(n_assets, n_obs, seed)
                                  : gen_correlated_sample(n_assets, n_obs, truth.factor, seed);
  if (!truth.iid && !truth.params.mu.isZero(0.0)) {
    sample.data.colwise() += truth.params.mu;
  }
  const MomentParams estimated = estimate_moments(sample);

  TrialRecord record;
  CholeskyFactor factor;
  try {
    factor = cholesky(estimated.sigma);
  } catch (const NotPositiveDefiniteError&) {
    return record;
  }
  const FeasibilityReport report = check_feasibility(factor, estimated.mu, spec);
  if (!report.feasible()) {
    return record;
  }
  record.feasible = true;
  const OptimalPortfolio estimated_opt =
      optimize_with_factor(factor, estimated.mu, spec, 1.0);
  const double true_risk = portfolio_risk(estimated_opt.portfolio, truth.params, spec);
  const double q0 = true_risk / truth.optimum.risk_value;
  record.q0_squared = q0 * q0;
  return record;
}

TrialRecord run_trial(Index n_assets, Index n_obs, const RiskSpec& spec, const SeedSpec& seed,
                      const MomentParams& truth) {
  if (truth.dim() != n_assets) {
    throw ShapeError("run_trial: truth dimension does not match n_assets");
  }
  return run_trial(n_obs, spec, seed, make_truth_model(truth, spec));
}

void parallel_for_index(std::size_t count, unsigned workers,
                        const std::function<void(std::size_t)>& task) {
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::vector<TrialRecord> run_trials(Index n_obs, const RiskSpec& spec, std::int64_t trials,
                                    std::uint64_t master_seed, const TruthModel& truth,
                                    unsigned workers) {
  if (trials < 1) {
    throw std::domain_error("trial count must be at least 1, got " + std::to_string(trials));
  }
  std::vector<TrialRecord> records(static_cast<std::size_t>(trials));
  parallel_for_index(records.size(), workers, [&](std::size_t k) {
    records[k] = run_trial(n_obs, spec, SeedSpec{master_seed, static_cast<std::uint64_t>(k)},
                           truth);
  });
  return records;
}

}  // namespace

PhasePoint estimate_feasibility_prob(Index n_obs, const RiskSpec& spec, std::int64_t trials,
                                     std::uint64_t master_seed, const TruthModel& truth,
                                     unsigned workers) {
  const std::vector<TrialRecord> records =
      run_trials(n_obs, spec, trials, master_seed, truth, workers);
  PhasePoint point;
  point.n_assets = truth.params.dim();
  point.n_obs = n_obs;
  point.phi = spec.phi();
  point.trials = trials;
  point.master_seed = master_seed;
  for (const TrialRecord& rec : records) {
    point.successes += rec.feasible ? 1 : 0;
  }
  point.p_hat = static_cast<double>(point.successes) / static_cast<double>(point.trials);
  return point;
}

PhasePoint estimate_feasibility_prob(Index n_assets, Index n_obs, const RiskSpec& spec,
                                     std::int64_t trials, std::uint64_t master_seed,
                                     unsigned workers) {
  return estimate_feasibility_prob(n_obs, spec, trials, master_seed,
                                   make_truth_model(iid_truth(n_assets), spec), workers);
}

QZeroStats measure_q0(Index n_assets, Index n_obs, const RiskSpec& spec, std::int64_t trials,
                      std::uint64_t master_seed, const MomentParams& truth, unsigned workers) {
  if (truth.dim() != n_assets) {
    throw ShapeError("measure_q0: truth dimension does not match n_assets");
  }
  const TruthModel model = make_truth_model(truth, spec);
  const std::vector<TrialRecord> records =
      run_trials(n_obs, spec, trials, master_seed, model, workers);

  QZeroStats stats;
  stats.n_trials = trials;
  for (const TrialRecord& rec : records) {
    if (rec.feasible) {
      stats.samples.push_back(*rec.q0_squared);
    }
  }
  stats.n_feasible = static_cast<std::int64_t>(stats.samples.size());
  if (stats.n_feasible == 0) {
    stats.mean_q0_squared = std::numeric_limits<double>::quiet_NaN();
    stats.variance_q0_squared = std::numeric_limits<double>::quiet_NaN();
    return stats;
  }
  double sum = 0.0;
  for (double v : stats.samples) sum += v;
  stats.mean_q0_squared = sum / static_cast<double>(stats.n_feasible);
  if (stats.n_feasible >= 2) {
    double ss = 0.0;
    for (double v : stats.samples) {
      const double d = v - stats.mean_q0_squared;
      ss += d * d;
    }
    stats.variance_q0_squared = ss / static_cast<double>(stats.n_feasible - 1);
  } else {
    stats.variance_q0_squared = std::numeric_limits<double>::quiet_NaN();
  }
  return stats;
}

std::vector<PhasePoint> scan_phase_grid(const std::vector<GridCell>& grid, std::int64_t trials,
                                        std::uint64_t master_seed,
                                        const std::optional<Matrix>& truth_sigma,
                                        unsigned workers) {
  if (grid.empty()) {
    throw std::domain_error("scan_phase_grid: empty grid");
  }
  std::optional<CholeskyFactor> shared_factor;
  if (truth_sigma) {
    for (const GridCell& cell : grid) {
      if (cell.n_assets != truth_sigma->rows()) {
        throw ShapeError("scan_phase_grid: covariance dimension " +
                         std::to_string(truth_sigma->rows()) + " does not match cell N = " +
                         std::to_string(cell.n_assets));
      }
    }
    shared_factor = cholesky(*truth_sigma);
  }

  std::vector<PhasePoint> points;
  points.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const GridCell& cell = grid[i];
    const RiskSpec spec = RiskSpec::raw_phi(cell.phi);
    TruthModel truth;
    if (truth_sigma) {
      MomentParams params;
      params.mu = Vector::Zero(cell.n_assets);
      params.sigma = *truth_sigma;
      params.origin = MomentOrigin::True;
      truth.params = std::move(params);
      truth.factor = *shared_factor;
      truth.optimum = optimize_with_factor(truth.factor, truth.params.mu, spec, 1.0);
      truth.iid = truth.params.sigma.isIdentity(0.0);
    } else {
      truth = make_truth_model(iid_truth(cell.n_assets), spec);
    }
    points.push_back(estimate_feasibility_prob(
        cell.n_obs, spec, trials, derive_substream_seed(master_seed, i), truth, workers));
  }
  return points;
}

}  // namespace riskphase
