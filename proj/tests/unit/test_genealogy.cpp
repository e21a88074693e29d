#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lenski/genealogy.hpp"
#include "lenski/stats.hpp"

using namespace lenski;

TEST_CASE("offspring vectors sum to N and are exchangeable") {
  Rng rng(71);
  const std::int64_t N = 200;
  std::vector<double> first, second;
  for (int i = 0; i < 20000; ++i) {
    const auto nu = sample_offspring_vector(N, 3.0, 1.0, rng);
    REQUIRE(std::accumulate(nu.begin(), nu.end(), std::int64_t{0}) == N);
    first.push_back(static_cast<double>(nu[0]));
    second.push_back(static_cast<double>(nu[1]));
  }
  const auto m = mean_se(first);
  CHECK(std::abs(m.mean - 1.0) < 3 * m.se);
  CHECK(ks_two_sample(first, second).p_value > 0.01);
}

TEST_CASE("family sizes are geometric(1/gamma)") {
  Rng rng(72);
  const double gamma = 4.0;
  std::vector<std::int64_t> counts(60, 0);
  std::vector<double> probs(60);
  std::int64_t tail = 0;
  for (int rep = 0; rep < 200; ++rep)
    for (auto y : sample_family_sizes(500, gamma, rng)) {
      if (y <= 60) ++counts[y - 1];
      else ++tail;
    }
  for (int k = 1; k <= 60; ++k) probs[static_cast<std::size_t>(k - 1)] = std::pow(1 - 1 / gamma, k - 1) / gamma;
  CHECK(chi_square_gof(counts, probs, tail).p_value > 0.01);
}

TEST_CASE("pair coalescence probability scales like 2(1-1/gamma)/N") {
  Rng rng(73);
  const auto c = estimate_pair_coalescence(500, 10.0, 1.0, 20000, rng);
  CHECK(500 * c.estimate == doctest::Approx(1.8).epsilon(0.05));
  const auto big = estimate_pair_coalescence(500, 1e4, 1.0, 5000, rng);
  CHECK(500 * big.estimate == doctest::Approx(2.0).epsilon(0.05));
  const auto small = estimate_pair_coalescence(500, 1.1, 1.0, 20000, rng);
  CHECK(500 * small.estimate == doctest::Approx(2 * (1 - 1 / 1.1)).epsilon(0.10));
  for (std::int64_t N : {250L, 1000L}) {
    const auto e = estimate_pair_coalescence(N, 10.0, 1.0, 20000, rng);
    CHECK(static_cast<double>(N) * e.estimate == doctest::Approx(1.8).epsilon(0.10));
  }
}

TEST_CASE("triple mergers are of smaller order") {
  Rng rng(74);
  const auto c = estimate_pair_coalescence(500, 10.0, 1.0, 20000, rng);
  const auto d = estimate_triple_coalescence(500, 10.0, 1.0, 20000, rng);
  CHECK(d.estimate / c.estimate < 0.05);
  std::vector<double> scaled;
  for (std::int64_t N : {250L, 500L, 1000L}) {
    const auto e = estimate_triple_coalescence(N, 10.0, 1.0, 20000, rng);
    scaled.push_back(e.estimate * static_cast<double>(N) * static_cast<double>(N));
  }
  CHECK(scaled[1] / scaled[0] < 2.0);
  CHECK(scaled[2] / scaled[1] < 2.0);
  const double slope = std::log(scaled[2] / (1000.0 * 1000.0) / (scaled[0] / (250.0 * 250.0))) / std::log(4.0);
  CHECK(std::abs(slope + 2.0) < 0.3);
  const auto tiny = estimate_triple_coalescence(500, 1.01, 1.0, 2000, rng);
  CHECK(tiny.estimate > 0.0);
  CHECK(std::isfinite(tiny.estimate));
}

TEST_CASE("ancestral partitions coarsen") {
  Rng rng(75);
  const auto chain = ancestral_chain(50, 6, 200, 3.0, 1.0, rng);
  REQUIRE(chain.size() == 201);
  CHECK(block_count(chain.front()) == 6);
  for (std::size_t g = 1; g < chain.size(); ++g) {
    REQUIRE(is_coarsening(chain[g - 1], chain[g]));
    REQUIRE(block_count(chain[g]) <= block_count(chain[g - 1]));
  }
  CHECK(block_count(chain.back()) < 6);
  const auto single = ancestral_chain(50, 1, 20, 3.0, 1.0, rng);
  for (const auto& p : single) CHECK(p == Partition{0});
}

TEST_CASE("one backward step merges a pair with probability c_N") {
  Rng rng(76);
  const std::int64_t N = 100;
  const auto c = estimate_pair_coalescence(N, 10.0, 1.0, 50000, rng);
  std::int64_t merged = 0;
  const int trials = 40000;
  for (int i = 0; i < trials; ++i) merged += block_count(ancestral_chain(N, 2, 1, 10.0, 1.0, rng)[1]) == 1;
  const auto pr = proportion(merged, trials);
  CHECK(std::abs(pr.mean - c.estimate) < 4 * std::hypot(pr.se, c.se));
}

TEST_CASE("first merger of three lineages is binary") {
  Rng rng(77);
  int non_binary = 0;
  for (int i = 0; i < 300; ++i) {
    const auto m = first_merger(500, 3, 10.0, 1.0, rng);
    REQUIRE(m.generation > 0);
    non_binary += m.lineages_merged > 2 || m.multiple;
  }
  CHECK(non_binary / 300.0 < 0.03);
}
