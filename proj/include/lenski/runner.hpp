#pragma once

// Experiment orchestration behind the command-line tool. Each experiment
// writes results.csv, summary.json and manifest.json into the output directory.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lenski/params.hpp"

namespace lenski {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"neutral-day", "fixation", "sweep-stages", "genealogy",
                                              "gw",          "evolve",   "curves",       "compare"};
  return names;
}

struct RunConfig {
  std::string experiment;
  ModelParams params;
  std::int64_t replicates = 1000;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  std::int64_t record_every = 1;
  unsigned threads = 0;
  std::string tolerance_profile = "default";

  // Experiment-specific knobs.
  std::int64_t k0 = 1;             // neutral-day, fixation: mutants at dawn
  double epsilon = 0.05;           // sweep stage thresholds
  double alpha = 0.4;              // gw: thinning offset exponent
  std::int64_t horizon_days = 0;   // evolve: 0 means 2 rho^-2 mu^-1
  std::int64_t lineages = 2;       // genealogy: sample size n
  double t_max = 10.0;             // curves
  double t_step = 0.1;             // curves
  std::string curve = "auto";      // curves: auto, fitness, epistatic, logistic
  bool hitting_rule = false;       // neutral-day, fixation: end days at the hitting time
  bool assumption_a = false;       // evolve: enforce a > 3b
  std::vector<std::string> compare_dirs;

  /// Throws ConfigError.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Relative tolerance used by `compare` for a profile name.
double profile_tolerance(const std::string& profile);

/// Runs one experiment; returns the summary that was written.
nlohmann::json run(const RunConfig& config, std::ostream& log);

/// Merges summaries of completed runs and writes a pass/fail table.
nlohmann::json compare(const std::vector<std::string>& run_dirs, const std::string& output_dir,
                       const std::string& profile, std::ostream& log);

}  // namespace lenski
