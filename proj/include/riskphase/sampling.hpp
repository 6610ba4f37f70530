#pragma once

#include <cstdint>

#include "riskphase/risk.hpp"
#include "riskphase/spdlinalg.hpp"

namespace riskphase {

/// Identifies one independent random stream. Distinct (master_seed, trial_index)
/// pairs map to uncorrelated streams via a 64-bit mixing function.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

/// Stateless 64-bit mixing finalizer (splitmix64).
std::uint64_t mix64(std::uint64_t z);

/// Stream key for a SeedSpec; the whole generation pipeline is a pure
/// function of this value, so samples are reproducible bit-for-bit no matter
/// how trials are scheduled.
std::uint64_t stream_key(const SeedSpec& seed);

/// Derives an independent master seed for a labeled substream (e.g. one grid
/// cell of a scan), to be combined with per-trial indices downstream.
std::uint64_t derive_substream_seed(std::uint64_t master_seed, std::uint64_t label);

/// Counter-based uniform generator: output k is a fixed mix of (key, k), with
/// no sequential state beyond the counter.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : state_(key) {}
  std::uint64_t next_u64();
  /// Uniform deviate strictly inside (0, 1).
  double next_open01();

private:
  std::uint64_t state_;
};

/// An N x T matrix of returns x_it (asset i, period t) plus the seed that
/// regenerates it exactly.
struct ReturnSample {
  Matrix data;
  SeedSpec seed_info;
  Index n_assets() const { return data.rows(); }
  Index n_obs() const { return data.cols(); }
};

/// iid standard normal sample, filled column by column with Box-Muller pairs
/// drawn from the seed's counter stream. Requires n_assets >= 1, n_obs >= 2.
ReturnSample gen_iid_sample(Index n_assets, Index n_obs, const SeedSpec& seed);

/// Zero-mean correlated sample: each column is D x_t for the Cholesky factor
/// D of sigma and x_t iid standard normal. With sigma = I the output equals
/// gen_iid_sample for the same seed bit-for-bit.
ReturnSample gen_correlated_sample(Index n_assets, Index n_obs, const Matrix& sigma,
                                   const SeedSpec& seed);
ReturnSample gen_correlated_sample(Index n_assets, Index n_obs, const CholeskyFactor& factor,
                                   const SeedSpec& seed);

/// Unbiased moment estimators: mu_i = mean_t x_it, sigma_ij with 1/(T-1).
/// The returned covariance is exactly symmetric. Requires n_obs >= 2.
MomentParams estimate_moments(const ReturnSample& s);

}  // namespace riskphase
