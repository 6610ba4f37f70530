#include "riskphase/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "riskphase/errors.hpp"

namespace riskphase {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ull;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(const SeedSpec& seed) {
  return mix64(mix64(seed.master_seed + kGolden) ^ (seed.trial_index * kStreamSalt + kGolden));
}

std::uint64_t derive_substream_seed(std::uint64_t master_seed, std::uint64_t label) {
  return mix64(mix64(master_seed ^ kStreamSalt) + label * kGolden);
}

std::uint64_t CounterRng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double CounterRng::next_open01() {
  // 53 mantissa bits, offset by half a step: values lie in (0, 1) strictly.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

ReturnSample gen_iid_sample(Index n_assets, Index n_obs, const SeedSpec& seed) {
  if (n_assets < 1) {
    throw std::domain_error("gen_iid_sample: need at least one asset");
  }
  if (n_obs < 2) {
    throw std::domain_error("gen_iid_sample: need at least two observations, got " +
                            std::to_string(n_obs));
  }
  ReturnSample s;
  s.seed_info = seed;
  s.data.resize(n_assets, n_obs);
  CounterRng rng(stream_key(seed));
  double* out = s.data.data();
  const Index total = n_assets * n_obs;
  for (Index k = 0; k < total; k += 2) {
    const double u1 = rng.next_open01();
    const double u2 = rng.next_open01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi * u2;
    out[k] = radius * std::cos(angle);
    if (k + 1 < total) {
      out[k + 1] = radius * std::sin(angle);
    }
  }
  return s;
}

ReturnSample gen_correlated_sample(Index n_assets, Index n_obs, const CholeskyFactor& factor,
                                   const SeedSpec& seed) {
  if (factor.dim() != n_assets) {
    throw ShapeError("gen_correlated_sample: factor dimension " + std::to_string(factor.dim()) +
                     " does not match n_assets " + std::to_string(n_assets));
  }
  ReturnSample s = gen_iid_sample(n_assets, n_obs, seed);
  s.data = factor.lower.triangularView<Eigen::Lower>() * s.data;
  return s;
}

ReturnSample gen_correlated_sample(Index n_assets, Index n_obs, const Matrix& sigma,
                                   const SeedSpec& seed) {
  return gen_correlated_sample(n_assets, n_obs, cholesky(sigma), seed);
}

MomentParams estimate_moments(const ReturnSample& s) {
  const Index n = s.n_assets();
  const Index t = s.n_obs();
  if (t < 2) {
    throw std::domain_error("estimate_moments: need at least two observations");
  }
  MomentParams m;
  m.origin = MomentOrigin::Estimated;
  m.mu = s.data.rowwise().mean();
  const Matrix centered = s.data.colwise() - m.mu;
  m.sigma = Matrix::Zero(n, n);
  m.sigma.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0 / static_cast<double>(t - 1));
  m.sigma.triangularView<Eigen::StrictlyUpper>() =
      m.sigma.triangularView<Eigen::StrictlyLower>().transpose();
  return m;
}

}  // namespace riskphase
