#pragma once

// Long-horizon mutation-selection chain: daily mutation arrivals on top of the
// multitype day transition, lineage tracking and relative fitness.

#include <cstdint>
#include <string>
#include <vector>

#include "lenski/cannings.hpp"
#include "lenski/params.hpp"
#include "lenski/sweep.hpp"

namespace lenski {

struct TrajectoryRow {
  std::int64_t day = 0;
  double F = 1.0;
  std::int64_t H = 0;
  std::int64_t n_classes = 1;
  bool interference = false;  // some interfering pair has started by this day
};

struct MutationEvent {
  std::int64_t id = 0;
  std::int64_t day = 0;
  std::int64_t parent_lineage = 0;
  double parent_rate = 0.0;
  double new_rate = 0.0;
  bool interfered = false;  // arrived while the population was heterogeneous in rate
};

struct FixationEvent {
  std::int64_t day = 0;
  std::int64_t lineage_id = 0;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  std::vector<MutationEvent> mutations;
  std::vector<FixationEvent> fixations;
  std::vector<SweepRecord> sweeps;  // one per mutation, same order
  std::vector<std::string> warnings;
  std::int64_t final_day = 0;
  std::int64_t max_classes = 1;
  bool bounds_held = true;  // min rate / r0 <= F <= max rate / r0 on every day visited
};

struct EvolutionOptions {
  double epsilon = 0.05;
  /// Stop once this many mutations have fixed (0: run to the horizon).
  std::int64_t stop_after_fixations = 0;
  /// Skip runs of mutation-free days while the population is a single class.
  bool fast_forward = true;
  bool assumption_a = false;
};

/// log((1/N) sum count e^{rate u}) / (r0 u), stable in the largest rate.
double relative_fitness(const PopulationState& state, double r0, double u);

Trajectory run_experiment(const ModelParams& p, std::int64_t horizon_days, std::int64_t record_every, Rng& rng,
                          const EvolutionOptions& opt = {});

/// Start days of the mutations that fixed, sorted; H(i) counts entries <= i.
struct SuccessSteps {
  std::vector<std::int64_t> jump_days;
  std::int64_t censored = 0;
  std::int64_t at(std::int64_t day) const;
};

SuccessSteps successful_mutation_count(const Trajectory& traj);

struct InterferenceReport {
  /// (earlier, later) mutation ids for successive pairs that interfere.
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  std::int64_t successive_pairs = 0;
  double frequency = 0.0;
};

InterferenceReport detect_interference(const Trajectory& traj);

}  // namespace lenski
