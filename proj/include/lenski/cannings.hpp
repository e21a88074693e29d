#pragma once

// One daily cycle: Yule growth of every class, then uniform dilution back to N.

#include <cstdint>
#include <vector>

#include "lenski/params.hpp"
#include "lenski/random.hpp"
#include "lenski/yule.hpp"

namespace lenski {

struct RateClassState {
  double rate = 1.0;
  std::int64_t count = 0;
  std::int64_t lineage_id = 0;
};

struct PopulationState {
  std::vector<RateClassState> classes;
  std::int64_t N = 0;

  static PopulationState homogeneous(std::int64_t N, double rate, std::int64_t lineage_id = 0);
  /// Throws std::invalid_argument when counts do not sum to N, a rate is not
  /// positive or lineage ids repeat.
  void check() const;
};

struct DayOutcome {
  std::vector<std::int64_t> end_sizes;
  double day_length = 0.0;
  PopulationState post_sample;
};

/// Mutants (rate r0+rho) versus residents (rate r0), k mutants at dawn.
/// Returns the mutant count after dilution.
std::int64_t two_type_step(std::int64_t k, const ModelParams& p, Rng& rng,
                           StoppingRule rule = StoppingRule::Expectation);

struct TwoTypeDay {
  std::int64_t k_next = 0;
  DayOutcome outcome;
};

/// As two_type_step but also reports the end-of-day sizes (mutants first).
TwoTypeDay day_transition_two_type(std::int64_t k, const ModelParams& p, Rng& rng,
                                   StoppingRule rule = StoppingRule::Expectation);

/// General day over any number of classes; classes emptied by dilution are dropped.
PopulationState day_transition_multitype(const PopulationState& state, const ModelParams& p, Rng& rng,
                                         StoppingRule rule = StoppingRule::Expectation,
                                         DayOutcome* outcome = nullptr);

/// E[K' | K = k] = (k / gamma) * growth_factor(k).
double expected_next_mutants(std::int64_t k, const ModelParams& p);

/// The same transition written as sequential acceptance of the mutants, each
/// accepted with probability (N - accepted so far) / (Gamma*N - (j-1)).
/// Growth draws come from `growth_rng` and acceptance uniforms from
/// `uniform_rng`, so runs can share either stream.
std::int64_t sequential_sampling_transition(std::int64_t k, const ModelParams& p, Rng& growth_rng,
                                            Rng& uniform_rng);
inline std::int64_t sequential_sampling_transition(std::int64_t k, const ModelParams& p, Rng& rng) {
  return sequential_sampling_transition(k, p, rng, rng);
}

/// Sequential acceptance given the end-of-day sizes directly.
std::int64_t sequential_accept(std::int64_t mutants_end, std::int64_t total_end, std::int64_t N, Rng& rng);

struct CoupledTripleState {
  std::int64_t k_lower = 1;
  std::int64_t k_mid = 1;
  std::int64_t k_upper = 1;
  double alpha = 0.4;
  double epsilon = 0.05;
};

struct CoupledStep {
  CoupledTripleState next;
  bool ordered = true;           // k_lower <= k_mid <= k_upper after the step
  bool within_window = true;     // recursive threshold stayed in [1/gamma -+ N^-alpha] over the mutants
};

inline constexpr std::int64_t kMaxForestFounders = 10000;

/// One joint step of the lower / true / upper chains on a shared Yule forest
/// grown at rate r0+rho to sigma_0, with shared acceptance uniforms.
CoupledStep coupled_triple_step(const CoupledTripleState& state, const ModelParams& p, Rng& rng);

}  // namespace lenski
