#pragma once

// Fixation of a single beneficial mutant: Monte Carlo estimates, sweep-stage
// bookkeeping, the exact absorbing-chain solve for small N, and stage-2 paths.

#include <cstdint>
#include <vector>

#include "lenski/cannings.hpp"
#include "lenski/limits.hpp"
#include "lenski/params.hpp"

namespace lenski {

enum class SweepOutcome { Fixed, Lost, Censored };

const char* outcome_name(SweepOutcome o);

struct SweepRecord {
  std::int64_t lineage_id = 0;
  std::int64_t start_day = 0;
  std::int64_t t1 = -1;       // first day with count >= eps N, -1 if never
  std::int64_t t2 = -1;       // first day with count >= (1 - eps) N, -1 if never
  std::int64_t end_day = -1;  // absorption day, -1 if censored
  SweepOutcome outcome = SweepOutcome::Censored;
};

/// rho C(gamma) / r.
double theoretical_fixation(double rho, double r, double gamma);

/// Hard cap on sweep length: 1e3 rho^-1.5 days (none for rho = 0).
std::int64_t sweep_day_cap(double rho);

struct SweepOptions {
  std::int64_t k0 = 1;
  double epsilon = 0.05;
  std::int64_t max_days = 0;  // 0 means sweep_day_cap(rho)
  StoppingRule rule = StoppingRule::Expectation;
};

/// One two-type run from k0 mutants until absorption or the cap.
SweepRecord run_sweep(const ModelParams& p, const SweepOptions& opt, Rng& rng);

struct FixationEstimate {
  double p_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double theoretical = 0.0;
  std::int64_t replicates = 0;
  std::int64_t fixed = 0;
  std::int64_t lost = 0;
  std::int64_t censored = 0;
  double tail_fraction = 0.0;  // P(absorption time > rho^-1.5); censored runs count as exceeding
  std::vector<SweepRecord> records;
};

/// Replicate i uses make_rng(master_seed, i).
FixationEstimate estimate_fixation(const ModelParams& p, std::int64_t replicates, std::uint64_t master_seed,
                                   const SweepOptions& opt = {}, unsigned threads = 0);

struct StageSummary {
  std::int64_t fixed_runs = 0;
  double bound = 0.0;  // rho^-1.1
  double stage1_within = 0.0;
  double stage2_within = 0.0;
  double stage3_within = 0.0;
  double mean_stage1 = 0.0;
  double mean_stage2 = 0.0;
  double mean_stage3 = 0.0;
  bool ordered = true;  // start <= T1 <= T2 <= end for every fixed record
};

StageSummary stage_decomposition(const std::vector<SweepRecord>& records, double rho);

struct ExactChain {
  std::vector<double> fixation;  // h(k), k = 0..N
};

/// Exact two-type transition matrix (NB growth laws truncated per component at
/// quantile 1 - tail, rows renormalised) and the fixation probabilities from
/// every state by a dense linear solve. Intended for N up to a few dozen.
std::vector<std::vector<double>> exact_transition_matrix(const ModelParams& p, double tail = 1e-12);
ExactChain exact_fixation_probabilities(const ModelParams& p, double tail = 1e-12);

struct Stage2Paths {
  std::vector<double> t;          // rescaled time rho * day
  std::vector<double> mean_path;  // mean K / N
  std::vector<double> logistic;   // g(t) from the same start
  double sup_distance = 0.0;
  std::int64_t runs = 0;
  std::int64_t lost = 0;
};

/// Runs started at ceil(x0 N) mutants for `days` days; absorbed runs are held
/// at their absorbing value.
Stage2Paths stage2_paths(const ModelParams& p, double x0, std::int64_t days, std::int64_t runs,
                         std::uint64_t master_seed, unsigned threads = 0);

/// Fixation frequencies over a grid of rho with common random numbers: every
/// grid point of replicate i reuses the same growth and acceptance streams.
std::vector<double> fixation_over_rho_crn(const ModelParams& p, const std::vector<double>& rhos,
                                          std::int64_t replicates, std::uint64_t master_seed);

}  // namespace lenski
