#pragma once

// Galton-Watson tools for the binomially thinned geometric offspring law:
// each individual leaves Geometric(p) descendants on {1,2,...}, each kept
// independently with probability c.

#include <cstdint>
#include <vector>

#include "lenski/random.hpp"

namespace lenski {

struct OffspringLaw {
  double p = 0.5;  // geometric parameter
  double c = 0.5;  // thinning probability
};

struct GWAsymptotics {
  double beta = 0.0;    // mean - 1
  double sigma2 = 0.0;  // variance
};

struct OffspringMoments {
  double mean = 0.0;
  double variance = 0.0;
  double third_raw = 0.0;
};

/// Upper law of the coupled chain: p = exp(-(r+rho)*sigma_0), c = 1/gamma + N^-alpha.
OffspringLaw upper_offspring_law(std::int64_t N, double gamma, double r, double rho, double alpha);
/// Lower law: p = exp(-(r+rho)*sigma_{ceil(eps N)}), c = 1/gamma - N^-alpha.
OffspringLaw lower_offspring_law(std::int64_t N, double gamma, double r, double rho, double alpha, double epsilon);

double offspring_pgf(const OffspringLaw& law, double s);
double offspring_pmf(const OffspringLaw& law, std::int64_t k);
OffspringMoments offspring_moments(const OffspringLaw& law);
GWAsymptotics asymptotics(const OffspringLaw& law);

/// 1 - q with q the smallest root of f(q) = q, by iteration from 0. Returns 0
/// for mean <= 1. When `iterates` is given the visited q values are stored.
double survival_probability_exact(const OffspringLaw& law, double tol = 1e-12,
                                  std::vector<double>* iterates = nullptr);

/// Closed form for this linear-fractional law: q = p(1-c) / ((1-p)c).
double survival_probability_closed_form(const OffspringLaw& law);

/// 2 beta / sigma^2.
double survival_probability_asymptotic(const GWAsymptotics& asym);

struct GWRun {
  std::vector<std::int64_t> sizes;  // generation 0 first
  std::int64_t extinct_at = -1;     // generation of extinction, -1 if alive at the end
  bool capped = false;              // stopped early at the population cap
  bool survived() const { return extinct_at < 0; }
};

inline constexpr std::int64_t kGWPopulationCap = 100000000;

/// One tree from a single ancestor, at most `max_generations` generations.
GWRun simulate_gw(const OffspringLaw& law, std::int64_t max_generations, Rng& rng,
                  std::int64_t cap = kGWPopulationCap);

/// Offspring total of `parents` individuals in one generation.
std::int64_t gw_generation(const OffspringLaw& law, std::int64_t parents, Rng& rng);

struct HittingTail {
  std::int64_t replicates = 0;
  std::int64_t reached = 0;
  std::int64_t extinct = 0;
  std::int64_t unresolved = 0;
  double horizon = 0.0;          // beta^(-1-delta)
  double reach_frequency = 0.0;
  double p_reach_late = 0.0;     // P(omega > horizon | reach)
  double p_extinct_late = 0.0;   // P(upsilon > horizon | extinct)
};

/// Runs trees until they reach `threshold` or die out.
HittingTail hitting_time_tail(const OffspringLaw& law, std::int64_t threshold, double delta,
                              std::int64_t replicates, Rng& rng);

}  // namespace lenski
