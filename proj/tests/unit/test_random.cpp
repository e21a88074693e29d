#include <doctest.h>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/hypergeometric.hpp>
#include <boost/math/distributions/negative_binomial.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "lenski/random.hpp"
#include "lenski/stats.hpp"

using namespace lenski;

namespace {

template <class Sampler, class Pmf>
double chi_square_p(Sampler sample, Pmf pmf, std::int64_t lo, std::int64_t hi, int n) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(hi - lo + 1), 0);
  std::vector<double> probs(counts.size());
  std::int64_t tail = 0;
  for (int i = 0; i < n; ++i) {
    const auto x = sample();
    REQUIRE(x >= lo);
    if (x <= hi) ++counts[static_cast<std::size_t>(x - lo)];
    else ++tail;
  }
  for (std::int64_t x = lo; x <= hi; ++x) probs[static_cast<std::size_t>(x - lo)] = pmf(x);
  return chi_square_gof(counts, probs, tail).p_value;
}

}  // namespace

TEST_CASE("seed derivation is deterministic and spreads neighbouring indices") {
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
  CHECK(derive_seed(42, 7) != derive_seed(42, 8));
  CHECK(derive_seed(42, 7) != derive_seed(43, 7));
  Rng a = make_rng(1, 0), b = make_rng(1, 0);
  CHECK(a() == b());
}

TEST_CASE("uniform_open stays strictly inside (0, 1)") {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform_open(rng);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("geometric failures match the pmf") {
  Rng rng(2);
  const double p = 0.3;
  const double pv = chi_square_p([&] { return sample_geometric_failures(rng, p); },
                                 [&](std::int64_t k) { return p * std::pow(1 - p, static_cast<double>(k)); }, 0, 40,
                                 100000);
  CHECK(pv > 0.01);
  CHECK(sample_geometric_failures(rng, 1.0) == 0);
  CHECK_THROWS(sample_geometric_failures(rng, 0.0));
}

TEST_CASE("negative binomial matches the pmf in both regimes") {
  Rng rng(3);
  for (std::int64_t n : {5L, 200L}) {
    const double p = 0.4;
    boost::math::negative_binomial_distribution<double> nb(static_cast<double>(n), p);
    const auto hi = static_cast<std::int64_t>(boost::math::quantile(nb, 1 - 1e-6));
    const double pv = chi_square_p([&] { return sample_negative_binomial(rng, n, p); },
                                   [&](std::int64_t k) { return boost::math::pdf(nb, static_cast<double>(k)); }, 0,
                                   hi, 100000);
    CHECK_MESSAGE(pv > 0.01, "n=" << n);
  }
  CHECK(sample_negative_binomial(rng, 1000, 1.0) == 0);
  CHECK(sample_negative_binomial(rng, 0, 0.5) == 0);
}

TEST_CASE("negative binomial mean for a huge founder count") {
  Rng rng(4);
  const std::int64_t n = 5000000;
  const double p = 0.5;
  std::vector<double> xs;
  for (int i = 0; i < 2000; ++i) xs.push_back(static_cast<double>(sample_negative_binomial(rng, n, p)));
  const auto m = mean_se(xs);
  CHECK(std::abs(m.mean - n * (1 - p) / p) < 5 * m.se);
}

TEST_CASE("hypergeometric matches the pmf in urn, ratio-of-uniforms and complement regimes") {
  Rng rng(5);
  struct Case {
    std::int64_t draws, marked, total;
  };
  for (const auto c : {Case{5, 30, 100}, Case{50, 300, 1000}, Case{995, 400, 1000}, Case{400, 20, 1000}}) {
    boost::math::hypergeometric_distribution<double> h(static_cast<unsigned>(c.marked), static_cast<unsigned>(c.draws),
                                                       static_cast<unsigned>(c.total));
    const std::int64_t lo = std::max<std::int64_t>(0, c.draws + c.marked - c.total);
    const std::int64_t hi = std::min(c.draws, c.marked);
    const double pv = chi_square_p([&] { return sample_hypergeometric(rng, c.draws, c.marked, c.total); },
                                   [&](std::int64_t k) { return boost::math::pdf(h, static_cast<unsigned>(k)); }, lo,
                                   hi, 100000);
    CHECK_MESSAGE(pv > 0.01, "draws=" << c.draws << " marked=" << c.marked << " total=" << c.total);
  }
}

TEST_CASE("hypergeometric handles totals near 1e9 and the degenerate urns") {
  Rng rng(6);
  const std::int64_t total = 1000000000, marked = 300000000, draws = 2000000;
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(static_cast<double>(sample_hypergeometric(rng, draws, marked, total)));
  const auto m = mean_se(xs);
  CHECK(std::abs(m.mean - 600000.0) < 5 * m.se);
  CHECK(sample_hypergeometric(rng, 10, 0, 100) == 0);
  CHECK(sample_hypergeometric(rng, 10, 100, 100) == 10);
  CHECK(sample_hypergeometric(rng, 100, 37, 100) == 37);
  CHECK_THROWS(sample_hypergeometric(rng, 101, 37, 100));
}

TEST_CASE("multivariate hypergeometric tallies are consistent in both code paths") {
  Rng rng(7);
  for (std::size_t categories : {4u, 40u}) {
    std::vector<std::int64_t> counts(categories);
    for (std::size_t i = 0; i < categories; ++i) counts[i] = static_cast<std::int64_t>(3 + 5 * i);
    const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    for (std::int64_t draws : {total / 3, (3 * total) / 4}) {
      std::vector<double> first;
      for (int rep = 0; rep < 20000; ++rep) {
        const auto x = sample_multivariate_hypergeometric(rng, counts, draws);
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < categories; ++i) {
          REQUIRE(x[i] >= 0);
          REQUIRE(x[i] <= counts[i]);
          sum += x[i];
        }
        REQUIRE(sum == draws);
        first.push_back(static_cast<double>(x.back()));
      }
      const auto m = mean_se(first);
      const double expect = static_cast<double>(draws) * static_cast<double>(counts.back()) / static_cast<double>(total);
      CHECK_MESSAGE(std::abs(m.mean - expect) < 4 * m.se, "categories=" << categories << " draws=" << draws);
    }
  }
}
