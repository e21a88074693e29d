#pragma once

// Intraday growth: Yule-process size laws and the two rules that end a day.

#include <cstdint>
#include <span>
#include <vector>

#include "lenski/random.hpp"

namespace lenski {

struct YuleLaw {
  std::int64_t founders = 1;
  double rate = 1.0;
  double time = 0.0;
};

enum class StoppingRule {
  Expectation,  // deterministic day length at which the expected total is gamma*N
  Hitting,      // random first time the total reaches ceil(gamma*N)
};

struct DayClock {
  double sigma = 0.0;
  StoppingRule rule = StoppingRule::Expectation;
};

/// Founders plus a class growth rate; the unit the day-length solvers work on.
struct GrowthClass {
  std::int64_t count = 0;
  double rate = 1.0;
};

/// Size at `time` of a Yule population started from `founders` individuals:
/// founders + NB(founders, exp(-rate*time)).
std::int64_t sample_yule_size(const YuleLaw& law, Rng& rng);

struct HittingResult {
  double time = 0.0;
  std::vector<std::int64_t> sizes;
};

/// Event-driven pure-birth race over classes until the total reaches `threshold`.
HittingResult sample_hitting_time(std::span<const GrowthClass> classes, std::int64_t threshold, Rng& rng);

/// Solves sum_c count_c * exp(rate_c * s) = gamma * N for s, with N the total
/// count. Empty classes are ignored.
double day_length(std::span<const GrowthClass> classes, double gamma);

/// Day length with k mutants at rate r+rho and N-k residents at rate r.
double sigma_k(std::int64_t N, std::int64_t k, double r, double rho, double gamma);

/// exp((r+rho) * sigma_k): expected end-of-day size of one mutant founder.
double growth_factor(std::int64_t k, std::int64_t N, double r, double rho, double gamma);

}  // namespace lenski
