#include "lenski/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lenski/kernels.hpp"
#include "lenski/stats.hpp"

namespace lenski {

namespace {

void check_args(std::int64_t N, double gamma) {
  if (N < 2) throw std::invalid_argument("genealogy: N must be at least 2");
  if (!(gamma > 1.0)) throw std::invalid_argument("genealogy: gamma must exceed 1");
}

// Parents of n distinct uniformly chosen offspring slots in one generation.
std::vector<std::int64_t> parents_of_lineages(std::int64_t N, int n, double gamma, Rng& rng) {
  const auto nu = sample_offspring_vector(N, gamma, 1.0, rng);
  std::vector<std::int64_t> slot_parent;
  slot_parent.reserve(static_cast<std::size_t>(N));
  for (std::size_t j = 0; j < nu.size(); ++j)
    slot_parent.insert(slot_parent.end(), static_cast<std::size_t>(nu[j]), static_cast<std::int64_t>(j));
  // Partial Fisher-Yates picks n distinct slots.
  std::vector<std::int64_t> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto j = i + std::uniform_int_distribution<std::int64_t>(0, N - 1 - i)(rng);
    std::swap(slot_parent[static_cast<std::size_t>(i)], slot_parent[static_cast<std::size_t>(j)]);
    out[static_cast<std::size_t>(i)] = slot_parent[static_cast<std::size_t>(i)];
  }
  return out;
}

CoalescenceEstimate estimate_merger(std::int64_t N, double gamma, std::int64_t replicates, Rng& rng, int order) {
  check_args(N, gamma);
  if (replicates < 1) throw std::invalid_argument("coalescence estimate: replicates must be positive");
  std::vector<double> values(static_cast<std::size_t>(replicates));
  for (auto& v : values) {
    const auto ys = sample_family_sizes(N, gamma, rng);
    const FamilySums s = family_sums(ys);
    const double z = s.s1;
    if (order == 2) v = s.s2 / (z * (z - 1.0) / 2.0);
    else v = s.s3 / (z * (z - 1.0) * (z - 2.0) / 6.0);
  }
  const auto m = mean_se(values);
  return {m.mean, m.se, m.mean - 1.96 * m.se, m.mean + 1.96 * m.se, replicates};
}

}  // namespace

std::vector<std::uint32_t> sample_family_sizes(std::int64_t N, double gamma, Rng& rng) {
  check_args(N, gamma);
  std::vector<std::uint32_t> ys(static_cast<std::size_t>(N));
  const double p = 1.0 / gamma;
  for (auto& y : ys) y = static_cast<std::uint32_t>(1 + sample_geometric_failures(rng, p));
  return ys;
}

std::vector<std::int64_t> sample_offspring_vector(std::int64_t N, double gamma, double r, Rng& rng) {
  if (!(r > 0.0)) throw std::invalid_argument("sample_offspring_vector: r must be positive");
  const auto ys = sample_family_sizes(N, gamma, rng);
  const std::vector<std::int64_t> counts(ys.begin(), ys.end());
  return sample_multivariate_hypergeometric(rng, counts, N);
}

CoalescenceEstimate estimate_pair_coalescence(std::int64_t N, double gamma, double r, std::int64_t replicates,
                                              Rng& rng) {
  if (!(r > 0.0)) throw std::invalid_argument("estimate_pair_coalescence: r must be positive");
  return estimate_merger(N, gamma, replicates, rng, 2);
}

CoalescenceEstimate estimate_triple_coalescence(std::int64_t N, double gamma, double r, std::int64_t replicates,
                                                Rng& rng) {
  if (!(r > 0.0)) throw std::invalid_argument("estimate_triple_coalescence: r must be positive");
  if (N < 3) throw std::invalid_argument("estimate_triple_coalescence: N must be at least 3");
  return estimate_merger(N, gamma, replicates, rng, 3);
}

double pair_coalescence_asymptotic(std::int64_t N, double gamma) {
  return 2.0 * (1.0 - 1.0 / gamma) / static_cast<double>(N);
}

int block_count(const Partition& p) {
  int count = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] == static_cast<int>(i)) ++count;
  return count;
}

bool is_coarsening(const Partition& fine, const Partition& coarse) {
  if (fine.size() != coarse.size()) return false;
  for (std::size_t i = 0; i < fine.size(); ++i)
    if (coarse[i] != coarse[static_cast<std::size_t>(fine[i])]) return false;
  return true;
}

std::vector<Partition> ancestral_chain(std::int64_t N, int n, std::int64_t generations, double gamma, double r,
                                       Rng& rng) {
  check_args(N, gamma);
  if (!(r > 0.0)) throw std::invalid_argument("ancestral_chain: r must be positive");
  if (n < 1 || n > N) throw std::invalid_argument("ancestral_chain: need 1 <= n <= N");
  Partition current(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) current[static_cast<std::size_t>(i)] = i;
  std::vector<Partition> chain{current};
  chain.reserve(static_cast<std::size_t>(generations) + 1);
  for (std::int64_t g = 0; g < generations; ++g) {
    // Representatives of the current blocks, in label order.
    std::vector<int> reps;
    for (int i = 0; i < n; ++i)
      if (current[static_cast<std::size_t>(i)] == i) reps.push_back(i);
    if (reps.size() > 1) {
      const auto parents = parents_of_lineages(N, static_cast<int>(reps.size()), gamma, rng);
      std::map<std::int64_t, int> parent_label;
      std::vector<int> relabel(static_cast<std::size_t>(n));
      for (std::size_t b = 0; b < reps.size(); ++b) {
        auto [it, fresh] = parent_label.emplace(parents[b], reps[b]);
        relabel[static_cast<std::size_t>(reps[b])] = it->second;
        (void)fresh;
      }
      for (auto& label : current) label = relabel[static_cast<std::size_t>(label)];
    }
    chain.push_back(current);
  }
  return chain;
}

FirstMerger first_merger(std::int64_t N, int n, double gamma, double r, Rng& rng, std::int64_t max_generations) {
  check_args(N, gamma);
  if (!(r > 0.0)) throw std::invalid_argument("first_merger: r must be positive");
  if (n < 2 || n > N) throw std::invalid_argument("first_merger: need 2 <= n <= N");
  FirstMerger out;
  for (std::int64_t g = 1; g <= max_generations; ++g) {
    auto parents = parents_of_lineages(N, n, gamma, rng);
    std::sort(parents.begin(), parents.end());
    int groups = 0, largest = 1, run = 1;
    for (std::size_t i = 1; i <= parents.size(); ++i) {
      if (i < parents.size() && parents[i] == parents[i - 1]) {
        ++run;
      } else {
        if (run > 1) ++groups;
        largest = std::max(largest, run);
        run = 1;
      }
    }
    if (groups > 0) {
      out.generation = g;
      out.lineages_merged = largest;
      out.multiple = groups > 1;
      return out;
    }
  }
  out.generation = -1;
  return out;
}

}  // namespace lenski
