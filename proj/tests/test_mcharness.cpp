#include "riskphase/mcharness.hpp"

#include <cmath>

#include "doctest.h"
#include "riskphase/errors.hpp"
#include "riskphase/replica.hpp"
#include "support/instances.hpp"

using namespace riskphase;

TEST_CASE("undersampled trials are never feasible") {
  const TruthModel truth = make_truth_model(iid_truth(4), RiskSpec::raw_phi(2.0));
  for (std::uint64_t k = 0; k < 100; ++k) {
    const TrialRecord rec = run_trial(3, RiskSpec::raw_phi(2.0), SeedSpec{123, k}, truth);
    CHECK_FALSE(rec.feasible);
    CHECK_FALSE(rec.q0_squared.has_value());
  }
}

TEST_CASE("trial feasibility far from the boundary") {
  const RiskSpec spec = RiskSpec::raw_phi(2.0);  // r_c = 0.8
  SUBCASE("deep in the feasible phase: r = 0.5") {
    const PhasePoint p = estimate_feasibility_prob(64, 128, spec, 200, 42);
    CHECK(p.p_hat >= 0.99);
  }
  SUBCASE("deep in the unfeasible phase: r ~ 0.94") {
    const PhasePoint p = estimate_feasibility_prob(64, 68, spec, 200, 42);
    CHECK(p.p_hat <= 0.05);
  }
}

TEST_CASE("feasible trials carry q0^2 >= 1") {
  const TruthModel truth = make_truth_model(iid_truth(16), RiskSpec::raw_phi(2.0));
  int feasible = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const TrialRecord rec = run_trial(64, RiskSpec::raw_phi(2.0), SeedSpec{7, k}, truth);
    if (rec.feasible) {
      ++feasible;
      CHECK(*rec.q0_squared >= 1.0 - 1e-10);
    }
  }
  CHECK(feasible > 0);
}

TEST_CASE("run_trial agrees with the public q0_ratio on feasible samples") {
  const RiskSpec spec = RiskSpec::raw_phi(2.0);
  const MomentParams truth_params = iid_truth(8);
  const TruthModel truth = make_truth_model(truth_params, spec);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const SeedSpec seed{99, k};
    const TrialRecord rec = run_trial(40, spec, seed, truth);
    REQUIRE(rec.feasible);
    const MomentParams est = estimate_moments(gen_iid_sample(8, 40, seed));
    const OptimalPortfolio opt = optimize(est, spec, 1.0);
    const EstimationError err = q0_ratio(truth_params, spec, opt.portfolio);
    CHECK(*rec.q0_squared == doctest::Approx(err.q0_squared).epsilon(1e-12));
  }
}

TEST_CASE("estimate_feasibility_prob bookkeeping and domain checks") {
  const PhasePoint p = estimate_feasibility_prob(6, 5, RiskSpec::raw_phi(1.0), 64, 5);
  CHECK(p.p_hat == 0.0);  // T - 1 < N, structurally singular
  CHECK(p.successes == 0);
  CHECK(p.trials == 64);
  CHECK(p.n_assets == 6);
  CHECK(p.n_obs == 5);
  CHECK_THROWS_AS(estimate_feasibility_prob(6, 12, RiskSpec::raw_phi(1.0), 0, 5),
                  std::domain_error);
}

TEST_CASE("identical results for any worker count") {
  const RiskSpec spec = RiskSpec::raw_phi(2.0);
  const PhasePoint serial = estimate_feasibility_prob(24, 40, spec, 300, 31337, 1);
  for (unsigned workers : {2u, 4u, 8u}) {
    const PhasePoint parallel = estimate_feasibility_prob(24, 40, spec, 300, 31337, workers);
    CHECK(parallel.successes == serial.successes);
    CHECK(parallel.p_hat == serial.p_hat);
  }
  const QZeroStats serial_q =
      measure_q0(16, 80, spec, 100, 2718, iid_truth(16), 1);
  const QZeroStats parallel_q =
      measure_q0(16, 80, spec, 100, 2718, iid_truth(16), 8);
  CHECK(serial_q.samples == parallel_q.samples);
}

TEST_CASE("paper point: N = 128, T = 160, phi = 2 sits near p = 0.52") {
  const PhasePoint p = estimate_feasibility_prob(128, 160, RiskSpec::raw_phi(2.0), 2000, 1);
  CHECK(std::abs(p.p_hat - 0.52) <= 0.06);
}

TEST_CASE("binomial scatter of p_hat across master seeds") {
  const RiskSpec spec = RiskSpec::raw_phi(2.0);
  const std::int64_t trials = 200;
  std::vector<double> phats;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    phats.push_back(estimate_feasibility_prob(32, 41, spec, trials, seed).p_hat);
  }
  double mean = 0.0;
  for (double p : phats) mean += p;
  mean /= static_cast<double>(phats.size());
  double var = 0.0;
  for (double p : phats) var += (p - mean) * (p - mean);
  var /= static_cast<double>(phats.size() - 1);
  const double expected_sd = std::sqrt(mean * (1.0 - mean) / static_cast<double>(trials));
  CHECK(std::sqrt(var) >= 0.4 * expected_sd);
  CHECK(std::sqrt(var) <= 2.5 * expected_sd);
}

TEST_CASE("measure_q0 in the vanishing-r limit approaches 1") {
  const QZeroStats stats =
      measure_q0(32, 6400, RiskSpec::raw_phi(2.0), 200, 11, iid_truth(32));
  CHECK(stats.n_feasible == 200);
  CHECK(stats.mean_q0_squared >= 0.98);
  CHECK(stats.mean_q0_squared <= 1.02);
}

TEST_CASE("measure_q0 tracks the theoretical law at moderate r") {
  // r = 0.4, r_c = 0.8: theory gives 2.0, finite-N bias allowed for
  const QZeroStats stats =
      measure_q0(64, 160, RiskSpec::raw_phi(2.0), 400, 12, iid_truth(64));
  CHECK(stats.n_feasible == 400);
  CHECK(std::abs(stats.mean_q0_squared - 2.0) <= 0.25);
}

TEST_CASE("measure_q0 with no feasible trials signals empty statistics") {
  const QZeroStats stats =
      measure_q0(8, 6, RiskSpec::raw_phi(2.0), 20, 3, iid_truth(8));
  CHECK(stats.n_feasible == 0);
  CHECK_FALSE(stats.has_stats());
  CHECK(std::isnan(stats.mean_q0_squared));
}

TEST_CASE("q0^2 sample variance shrinks as N doubles (self-averaging trend)") {
  const RiskSpec spec = RiskSpec::raw_phi(2.0);
  for (std::uint64_t seed : {101u, 202u, 303u}) {
    const QZeroStats small = measure_q0(64, 160, spec, 120, seed, iid_truth(64));
    const QZeroStats large = measure_q0(256, 640, spec, 120, seed, iid_truth(256));
    CHECK(large.variance_q0_squared < small.variance_q0_squared);
  }
}

TEST_CASE("one-cell scan reduces to estimate_feasibility_prob on the derived seed") {
  const std::vector<GridCell> grid{{32, 52, 2.0}};
  const std::vector<PhasePoint> scan = scan_phase_grid(grid, 150, 777);
  REQUIRE(scan.size() == 1);
  const PhasePoint direct = estimate_feasibility_prob(
      32, 52, RiskSpec::raw_phi(2.0), 150, derive_substream_seed(777, 0));
  CHECK(scan[0].successes == direct.successes);
  CHECK(scan[0].master_seed == direct.master_seed);
  CHECK_THROWS_AS(scan_phase_grid({}, 10, 1), std::domain_error);
}

TEST_CASE("p_hat is nonincreasing in r along a scan, within noise") {
  std::vector<GridCell> grid;
  for (int t : {64, 48, 40, 36, 33, 30}) {
    grid.push_back({32, t, 2.0});
  }
  const std::vector<PhasePoint> points = scan_phase_grid(grid, 400, 2025);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double allowance =
        3.0 * std::hypot(points[i].binomial_stderr(), points[i + 1].binomial_stderr());
    CHECK(points[i + 1].p_hat <= points[i].p_hat + allowance);
  }
}

TEST_CASE("an identity covariance truth equals the iid scan bit for bit") {
  const std::vector<GridCell> grid{{12, 20, 2.0}, {12, 16, 2.0}};
  const std::vector<PhasePoint> iid = scan_phase_grid(grid, 200, 5150);
  const std::vector<PhasePoint> corr =
      scan_phase_grid(grid, 200, 5150, Matrix::Identity(12, 12));
  REQUIRE(iid.size() == corr.size());
  for (std::size_t i = 0; i < iid.size(); ++i) {
    CHECK(iid[i].successes == corr[i].successes);
  }
}

TEST_CASE("correlations do not move the feasibility curve") {
  testsupport::InstanceRng rng(909);
  const Matrix sigma = rng.spd_matrix(16, 0.5);
  std::vector<GridCell> grid;
  for (int t : {40, 26, 21, 18}) grid.push_back({16, t, 2.0});
  const std::vector<PhasePoint> iid = scan_phase_grid(grid, 300, 64);
  const std::vector<PhasePoint> corr = scan_phase_grid(grid, 300, 64, sigma);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double allowance =
        3.0 * std::hypot(iid[i].binomial_stderr(), corr[i].binomial_stderr());
    CHECK(std::abs(iid[i].p_hat - corr[i].p_hat) <= std::max(allowance, 1.0 / 300.0));
  }
}

TEST_CASE("scan validates covariance dimensions") {
  const std::vector<GridCell> grid{{8, 20, 2.0}};
  CHECK_THROWS_AS(scan_phase_grid(grid, 10, 1, Matrix::Identity(4, 4)), ShapeError);
}

TEST_CASE("correlated truth q0 uses the general ratio") {
  testsupport::InstanceRng rng(4242);
  const Matrix sigma = rng.spd_matrix(12, 0.5);
  MomentParams truth;
  truth.mu = Vector::Zero(12);
  truth.sigma = sigma;
  const QZeroStats stats = measure_q0(12, 120, RiskSpec::raw_phi(2.0), 200, 6, truth);
  CHECK(stats.n_feasible > 150);
  // r = 0.1 -> theory 0.8/0.7 ~ 1.14; generous finite-N allowance
  CHECK(std::abs(stats.mean_q0_squared - expected_q0_squared(2.0, 0.1)) <= 0.2);
}
