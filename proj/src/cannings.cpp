#include "lenski/cannings.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace lenski {

namespace {

std::int64_t day_threshold(std::int64_t N, double gamma) {
  return static_cast<std::int64_t>(std::ceil(gamma * static_cast<double>(N)));
}

void check_k(std::int64_t k, const ModelParams& p) {
  if (k < 0 || k > p.N) throw std::invalid_argument("mutant count outside [0, N]");
}

// End-of-day sizes (mutants, residents) under either rule.
std::pair<std::int64_t, std::int64_t> grow_two_type(std::int64_t k, const ModelParams& p, Rng& rng,
                                                    StoppingRule rule, double& length) {
  const std::int64_t n = p.N - k;
  if (rule == StoppingRule::Hitting) {
    const GrowthClass cls[2] = {{k, p.r0 + p.rho}, {n, p.r0}};
    const auto hit = sample_hitting_time(cls, day_threshold(p.N, p.gamma), rng);
    length = hit.time;
    return {hit.sizes[0], hit.sizes[1]};
  }
  length = sigma_k(p.N, k, p.r0, p.rho, p.gamma);
  const std::int64_t m = k + sample_negative_binomial(rng, k, std::exp(-(p.r0 + p.rho) * length));
  const std::int64_t z = n + sample_negative_binomial(rng, n, std::exp(-p.r0 * length));
  return {m, z};
}

}  // namespace

PopulationState PopulationState::homogeneous(std::int64_t N, double rate, std::int64_t lineage_id) {
  PopulationState s;
  s.N = N;
  s.classes.push_back({rate, N, lineage_id});
  return s;
}

void PopulationState::check() const {
  std::int64_t total = 0;
  std::set<std::int64_t> ids;
  for (const auto& c : classes) {
    if (!(c.rate > 0.0)) throw std::invalid_argument("population state: rates must be positive");
    if (c.count < 0) throw std::invalid_argument("population state: negative count");
    if (!ids.insert(c.lineage_id).second) throw std::invalid_argument("population state: repeated lineage id");
    total += c.count;
  }
  if (total != N) throw std::invalid_argument("population state: counts do not sum to N");
}

std::int64_t two_type_step(std::int64_t k, const ModelParams& p, Rng& rng, StoppingRule rule) {
  check_k(k, p);
  if (k == 0 || k == p.N) return k;
  double length = 0.0;
  const auto [m, z] = grow_two_type(k, p, rng, rule, length);
  return sample_hypergeometric(rng, p.N, m, m + z);
}

TwoTypeDay day_transition_two_type(std::int64_t k, const ModelParams& p, Rng& rng, StoppingRule rule) {
  check_k(k, p);
  TwoTypeDay out;
  if (k == 0 || k == p.N) {
    // Absorbed: growth still happens but the type composition cannot change.
    const double rate = k == 0 ? p.r0 : p.r0 + p.rho;
    double length = std::log(p.gamma) / rate;
    std::int64_t end = p.N + sample_negative_binomial(rng, p.N, std::exp(-rate * length));
    if (rule == StoppingRule::Hitting) {
      const GrowthClass cls[1] = {{p.N, rate}};
      const auto hit = sample_hitting_time(cls, day_threshold(p.N, p.gamma), rng);
      length = hit.time;
      end = hit.sizes[0];
    }
    out.k_next = k;
    out.outcome.day_length = length;
    out.outcome.end_sizes = {k == 0 ? 0 : end, k == 0 ? end : 0};
  } else {
    double length = 0.0;
    const auto [m, z] = grow_two_type(k, p, rng, rule, length);
    out.k_next = sample_hypergeometric(rng, p.N, m, m + z);
    out.outcome.day_length = length;
    out.outcome.end_sizes = {m, z};
  }
  out.outcome.post_sample.N = p.N;
  if (out.k_next > 0) out.outcome.post_sample.classes.push_back({p.r0 + p.rho, out.k_next, 1});
  if (out.k_next < p.N) out.outcome.post_sample.classes.push_back({p.r0, p.N - out.k_next, 0});
  return out;
}

PopulationState day_transition_multitype(const PopulationState& state, const ModelParams& p, Rng& rng,
                                         StoppingRule rule, DayOutcome* outcome) {
  std::vector<GrowthClass> growth;
  growth.reserve(state.classes.size());
  for (const auto& c : state.classes) growth.push_back({c.count, c.rate});

  std::vector<std::int64_t> end(state.classes.size(), 0);
  double length = 0.0;
  if (rule == StoppingRule::Hitting) {
    auto hit = sample_hitting_time(growth, day_threshold(state.N, p.gamma), rng);
    length = hit.time;
    end = std::move(hit.sizes);
  } else {
    length = day_length(growth, p.gamma);
    for (std::size_t i = 0; i < growth.size(); ++i) {
      const auto n = growth[i].count;
      end[i] = n + (n > 0 ? sample_negative_binomial(rng, n, std::exp(-growth[i].rate * length)) : 0);
    }
  }

  PopulationState next;
  next.N = state.N;
  if (state.classes.size() == 1) {
    next.classes = state.classes;
  } else {
    const auto drawn = sample_multivariate_hypergeometric(rng, end, state.N);
    for (std::size_t i = 0; i < drawn.size(); ++i)
      if (drawn[i] > 0) next.classes.push_back({state.classes[i].rate, drawn[i], state.classes[i].lineage_id});
  }
  if (outcome != nullptr) {
    outcome->end_sizes = std::move(end);
    outcome->day_length = length;
    outcome->post_sample = next;
  }
  return next;
}

double expected_next_mutants(std::int64_t k, const ModelParams& p) {
  check_k(k, p);
  if (p.rho == 0.0 || k == 0 || k == p.N) return static_cast<double>(k);
  return static_cast<double>(k) / p.gamma * growth_factor(k, p.N, p.r0, p.rho, p.gamma);
}

std::int64_t sequential_accept(std::int64_t mutants_end, std::int64_t total_end, std::int64_t N, Rng& rng) {
  if (total_end < N || mutants_end > total_end) throw std::invalid_argument("sequential_accept: bad sizes");
  std::int64_t accepted = 0;
  for (std::int64_t j = 0; j < mutants_end; ++j) {
    const double thr = static_cast<double>(N - accepted) / static_cast<double>(total_end - j);
    if (uniform_open(rng) < thr) ++accepted;
  }
  return accepted;
}

std::int64_t sequential_sampling_transition(std::int64_t k, const ModelParams& p, Rng& growth_rng,
                                            Rng& uniform_rng) {
  check_k(k, p);
  if (k == 0 || k == p.N) return k;
  double length = 0.0;
  const auto [m, z] = grow_two_type(k, p, growth_rng, StoppingRule::Expectation, length);
  return sequential_accept(m, m + z, p.N, uniform_rng);
}

CoupledStep coupled_triple_step(const CoupledTripleState& state, const ModelParams& p, Rng& rng) {
  const std::int64_t kl = state.k_lower, km = state.k_mid, ku = state.k_upper;
  if (kl < 0 || km < 0 || ku < 0 || km > p.N) throw std::invalid_argument("coupled_triple_step: bad counts");
  if (!(state.epsilon > 0.0 && state.epsilon < 1.0)) throw std::invalid_argument("coupled_triple_step: bad epsilon");
  const std::int64_t founders = std::max({kl, km, ku});
  if (founders > kMaxForestFounders) throw std::invalid_argument("coupled_triple_step: forest capped at 1e4 founders");

  CoupledStep out;
  out.next = state;
  const double a = p.r0 + p.rho;
  const std::int64_t eps_n = static_cast<std::int64_t>(std::ceil(state.epsilon * static_cast<double>(p.N)));
  const double t_low = sigma_k(p.N, std::min(eps_n, p.N), p.r0, p.rho, p.gamma);
  const double t_mid = sigma_k(p.N, km, p.r0, p.rho, p.gamma);
  const double t_up = std::log(p.gamma) / p.r0;

  // Per-tree sizes at the three marks; born-before-t means birth rank <= size(t).
  std::vector<std::int64_t> s_low(static_cast<std::size_t>(founders)), s_mid(s_low.size()), s_up(s_low.size());
  const double times[3] = {t_low, t_mid, t_up};
  int order[3] = {0, 1, 2};
  std::sort(order, order + 3, [&](int x, int y) { return times[x] < times[y]; });
  std::int64_t mid_total = 0;
  for (std::size_t l = 0; l < s_low.size(); ++l) {
    std::int64_t size = 1;
    double t = 0.0;
    std::int64_t* slots[3] = {&s_low[l], &s_mid[l], &s_up[l]};
    for (int o : order) {
      const double dt = times[o] - t;
      if (dt > 0.0) size += sample_negative_binomial(rng, size, std::exp(-a * dt));
      t = std::max(t, times[o]);
      *slots[o] = size;
    }
    if (static_cast<std::int64_t>(l) < km) mid_total += s_mid[l];
  }

  // Residents of the true chain only enter through Gamma.
  const std::int64_t residents = p.N - km;
  const std::int64_t z =
      residents + (residents > 0 ? sample_negative_binomial(rng, residents, std::exp(-p.r0 * t_mid)) : 0);
  const std::int64_t total_end = mid_total + z;

  const double shift = std::pow(static_cast<double>(p.N), -state.alpha);
  const double thr_low = 1.0 / p.gamma - shift;
  const double thr_up = 1.0 / p.gamma + shift;

  std::int64_t low = 0, mid = 0, up = 0, accepted = 0, j = 0;
  // Mid-set members take the first indices so they follow the recursive rule.
  for (std::size_t l = 0; l < static_cast<std::size_t>(km); ++l) {
    for (std::int64_t rank = 1; rank <= s_mid[l]; ++rank, ++j) {
      const double u = uniform_open(rng);
      const double thr = static_cast<double>(p.N - accepted) / static_cast<double>(total_end - j);
      if (thr < thr_low || thr > thr_up) out.within_window = false;
      if (u < thr) {
        ++accepted;
        ++mid;
      }
      if (static_cast<std::int64_t>(l) < ku && rank <= s_up[l] && u < thr_up) ++up;
      if (static_cast<std::int64_t>(l) < kl && rank <= s_low[l] && u < thr_low) ++low;
    }
  }
  for (std::size_t l = 0; l < static_cast<std::size_t>(std::max(kl, ku)); ++l) {
    const std::int64_t first = static_cast<std::int64_t>(l) < km ? s_mid[l] + 1 : 1;
    const std::int64_t last = std::max(static_cast<std::int64_t>(l) < ku ? s_up[l] : 0,
                                       static_cast<std::int64_t>(l) < kl ? s_low[l] : 0);
    for (std::int64_t rank = first; rank <= last; ++rank) {
      const double u = uniform_open(rng);
      if (static_cast<std::int64_t>(l) < ku && rank <= s_up[l] && u < thr_up) ++up;
      if (static_cast<std::int64_t>(l) < kl && rank <= s_low[l] && u < thr_low) ++low;
    }
  }

  out.next.k_lower = low;
  out.next.k_mid = mid;
  out.next.k_upper = up;
  out.ordered = low <= mid && mid <= up;
  return out;
}

}  // namespace lenski
