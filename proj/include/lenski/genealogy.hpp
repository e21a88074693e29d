#pragma once

// Neutral genealogy: offspring vectors of one daily cycle, coalescence
// probabilities and the backward ancestral partition chain.

#include <cstdint>
#include <vector>

#include "lenski/random.hpp"

namespace lenski {

/// End-of-day family sizes of N founders: iid Geometric(1/gamma) on {1,2,...}.
/// The growth rate cancels out of the law because the day lasts ln(gamma)/r.
std::vector<std::uint32_t> sample_family_sizes(std::int64_t N, double gamma, Rng& rng);

/// Offspring counts (nu_1..nu_N) after diluting the families back to N.
std::vector<std::int64_t> sample_offspring_vector(std::int64_t N, double gamma, double r, Rng& rng);

struct CoalescenceEstimate {
  double estimate = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t replicates = 0;
};

/// E[sum C(Y_i,2) / C(Z,2)] from raw family sizes.
CoalescenceEstimate estimate_pair_coalescence(std::int64_t N, double gamma, double r, std::int64_t replicates,
                                              Rng& rng);
/// E[sum C(Y_i,3) / C(Z,3)].
CoalescenceEstimate estimate_triple_coalescence(std::int64_t N, double gamma, double r, std::int64_t replicates,
                                                Rng& rng);

/// 2 (1 - 1/gamma) / N.
double pair_coalescence_asymptotic(std::int64_t N, double gamma);

/// Block label of each sampled lineage; labels are the smallest member of the
/// block, so equal partitions compare equal.
using Partition = std::vector<int>;

int block_count(const Partition& p);
/// True when every block of `fine` lies inside a block of `coarse`.
bool is_coarsening(const Partition& fine, const Partition& coarse);

/// Traces n lineages back `generations` days; element g is the partition after g
/// generations (element 0 is all singletons).
std::vector<Partition> ancestral_chain(std::int64_t N, int n, std::int64_t generations, double gamma, double r,
                                       Rng& rng);

struct FirstMerger {
  std::int64_t generation = 0;  // generations back until the first merger
  int lineages_merged = 0;      // lineages lost at that merger plus one (2 = binary)
  bool multiple = false;        // more than one merger event in the same generation
};

/// Runs the backward chain for n lineages until the first merger.
FirstMerger first_merger(std::int64_t N, int n, double gamma, double r, Rng& rng,
                         std::int64_t max_generations = 100000000);

}  // namespace lenski
