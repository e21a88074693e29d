#pragma once

// Exact samplers for the discrete laws the simulator is built on.
//
// Every sampler takes the generator by reference; nothing here holds state, so
// concurrent use is safe as long as each thread owns its generator.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace lenski {

using Rng = std::mt19937_64;

/// Seed for replicate `index` under `master_seed`. BLAKE2b of the pair, so
/// neighbouring indices give unrelated streams.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

inline Rng make_rng(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(derive_seed(master_seed, index));
}

/// Uniform on the open interval (0, 1).
double uniform_open(Rng& rng);

/// Failures before the first success, success probability p in (0, 1].
std::int64_t sample_geometric_failures(Rng& rng, double p);

/// Negative binomial: failures before the n-th success, success probability
/// p in (0, 1]. Sums geometrics for n <= 64, gamma-Poisson mixture above.
std::int64_t sample_negative_binomial(Rng& rng, std::int64_t n, double p);

std::int64_t sample_binomial(Rng& rng, std::int64_t trials, double p);

std::int64_t sample_poisson(Rng& rng, double mean);

/// Number of marked items in `draws` draws without replacement from an urn of
/// `total` items of which `marked` are marked. Ratio-of-uniforms (HRUA) when the
/// smaller side of the sample is at least 10, sequential urn draws otherwise.
std::int64_t sample_hypergeometric(Rng& rng, std::int64_t draws, std::int64_t marked,
                                   std::int64_t total);

/// Draw `draws` items without replacement from categories with the given
/// counts; returns the per-category tally. Small urns with many categories are
/// sampled by partial shuffle, everything else by conditional hypergeometrics.
std::vector<std::int64_t> sample_multivariate_hypergeometric(
    Rng& rng, std::span<const std::int64_t> counts, std::int64_t draws);

}  // namespace lenski
