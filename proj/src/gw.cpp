#include "lenski/gw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lenski/yule.hpp"

namespace lenski {

namespace {

void check_law(const OffspringLaw& law) {
  if (!(law.p > 0.0 && law.p < 1.0)) throw std::invalid_argument("offspring law: p must lie in (0, 1)");
  if (!(law.c > 0.0 && law.c <= 1.0)) throw std::invalid_argument("offspring law: c must lie in (0, 1]");
}

}  // namespace

OffspringLaw upper_offspring_law(std::int64_t N, double gamma, double r, double rho, double alpha) {
  const double s0 = std::log(gamma) / r;
  return {std::exp(-(r + rho) * s0), 1.0 / gamma + std::pow(static_cast<double>(N), -alpha)};
}

OffspringLaw lower_offspring_law(std::int64_t N, double gamma, double r, double rho, double alpha, double epsilon) {
  const auto k = static_cast<std::int64_t>(std::ceil(epsilon * static_cast<double>(N)));
  const double s = sigma_k(N, std::min(k, N), r, rho, gamma);
  return {std::exp(-(r + rho) * s), 1.0 / gamma - std::pow(static_cast<double>(N), -alpha)};
}

double offspring_pgf(const OffspringLaw& law, double s) {
  check_law(law);
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("offspring_pgf: s must lie in [0, 1]");
  const double w = 1.0 - law.c + law.c * s;
  return law.p * w / (1.0 - (1.0 - law.p) * w);
}

double offspring_pmf(const OffspringLaw& law, std::int64_t k) {
  check_law(law);
  if (k < 0) return 0.0;
  const double d = law.p + law.c - law.p * law.c;
  const double p0 = law.p * (1.0 - law.c) / d;
  if (k == 0) return p0;
  const double theta = (1.0 - law.p) * law.c / d;
  return (1.0 - p0) * (1.0 - theta) * std::pow(theta, static_cast<double>(k - 1));
}

OffspringMoments offspring_moments(const OffspringLaw& law) {
  check_law(law);
  const double p = law.p, c = law.c;
  // Factorial moments n! c^n (1-p)^(n-1) / p^n.
  const double f1 = c / p;
  const double f2 = 2.0 * c * c * (1.0 - p) / (p * p);
  const double f3 = 6.0 * c * c * c * (1.0 - p) * (1.0 - p) / (p * p * p);
  OffspringMoments m;
  m.mean = f1;
  m.variance = f2 + f1 - f1 * f1;
  m.third_raw = f3 + 3.0 * f2 + f1;
  return m;
}

GWAsymptotics asymptotics(const OffspringLaw& law) {
  const auto m = offspring_moments(law);
  return {m.mean - 1.0, m.variance};
}

double survival_probability_exact(const OffspringLaw& law, double tol, std::vector<double>* iterates) {
  check_law(law);
  if (law.c / law.p <= 1.0) return 0.0;
  double q = 0.0;
  double prev_step = 0.0;
  if (iterates != nullptr) iterates->assign(1, q);
  for (long it = 0; it < 100000000L; ++it) {
    const double next = offspring_pgf(law, q);
    if (iterates != nullptr) iterates->push_back(next);
    const double step = next - q;
    q = next;
    if (step <= 0.0) break;
    // Linear convergence: bound the remaining tail by step * rho / (1 - rho)
    // with rho estimated from consecutive steps, relative to 1 - q.
    if (prev_step > 0.0) {
      const double rho = step / prev_step;
      if (rho < 1.0 && step * rho / (1.0 - rho) <= tol * (1.0 - q)) break;
    }
    prev_step = step;
  }
  return 1.0 - q;
}

double survival_probability_closed_form(const OffspringLaw& law) {
  check_law(law);
  if (law.c / law.p <= 1.0) return 0.0;
  return 1.0 - law.p * (1.0 - law.c) / ((1.0 - law.p) * law.c);
}

double survival_probability_asymptotic(const GWAsymptotics& asym) {
  if (!(asym.sigma2 > 0.0)) throw std::invalid_argument("survival_probability_asymptotic: sigma2 must be positive");
  if (asym.beta <= 0.0) return 0.0;
  return 2.0 * asym.beta / asym.sigma2;
}

std::int64_t gw_generation(const OffspringLaw& law, std::int64_t parents, Rng& rng) {
  if (parents <= 0) return 0;
  const std::int64_t born = parents + sample_negative_binomial(rng, parents, law.p);
  return sample_binomial(rng, born, law.c);
}

GWRun simulate_gw(const OffspringLaw& law, std::int64_t max_generations, Rng& rng, std::int64_t cap) {
  check_law(law);
  GWRun run;
  std::int64_t g = 1;
  run.sizes.push_back(g);
  for (std::int64_t gen = 1; gen <= max_generations; ++gen) {
    g = gw_generation(law, g, rng);
    run.sizes.push_back(g);
    if (g == 0) {
      run.extinct_at = gen;
      return run;
    }
    if (g >= cap) {
      run.capped = true;
      return run;
    }
  }
  return run;
}

HittingTail hitting_time_tail(const OffspringLaw& law, std::int64_t threshold, double delta, std::int64_t replicates,
                              Rng& rng) {
  check_law(law);
  if (threshold < 2 || replicates < 1 || !(delta > 0.0)) throw std::invalid_argument("hitting_time_tail: bad arguments");
  HittingTail out;
  out.replicates = replicates;
  const double beta = law.c / law.p - 1.0;
  out.horizon = beta > 0.0 ? std::pow(beta, -1.0 - delta) : 0.0;
  const std::int64_t max_gen =
      beta > 0.0 ? static_cast<std::int64_t>(std::min(1e7, 100.0 * out.horizon)) : 10000000;
  std::int64_t reach_late = 0, extinct_late = 0;
  for (std::int64_t rep = 0; rep < replicates; ++rep) {
    std::int64_t g = 1;
    std::int64_t gen = 0;
    for (; gen < max_gen && g > 0 && g < threshold; ++gen) g = gw_generation(law, g, rng);
    if (g >= threshold) {
      ++out.reached;
      if (static_cast<double>(gen) > out.horizon) ++reach_late;
    } else if (g == 0) {
      ++out.extinct;
      if (beta > 0.0 && static_cast<double>(gen) > out.horizon) ++extinct_late;
    } else {
      ++out.unresolved;
    }
  }
  out.reach_frequency = static_cast<double>(out.reached) / static_cast<double>(replicates);
  out.p_reach_late = out.reached > 0 ? static_cast<double>(reach_late) / static_cast<double>(out.reached) : 0.0;
  out.p_extinct_late = out.extinct > 0 ? static_cast<double>(extinct_late) / static_cast<double>(out.extinct) : 0.0;
  return out;
}

}  // namespace lenski
