#include "lenski/random.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace lenski {

namespace {

bool sodium_ready() {
  static const bool ok = sodium_init() >= 0;
  return ok;
}

// log(k!) with a table for small k; lgamma beyond.
double log_factorial(std::int64_t k) {
  static const auto table = [] {
    std::array<double, 128> t{};
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (k < static_cast<std::int64_t>(table.size())) return table[static_cast<std::size_t>(k)];
  return std::lgamma(static_cast<double>(k) + 1.0);
}

std::int64_t uniform_index(Rng& rng, std::int64_t max_inclusive) {
  return std::uniform_int_distribution<std::int64_t>(0, max_inclusive)(rng);
}

// Draw `sample` items one at a time; O(min(sample, total - sample)).
std::int64_t hypergeometric_urn(Rng& rng, std::int64_t good, std::int64_t bad, std::int64_t sample) {
  const std::int64_t total = good + bad;
  const bool complement = sample > total / 2;
  std::int64_t left = complement ? total - sample : sample;
  std::int64_t remaining_total = total;
  std::int64_t remaining_good = good;
  while (left > 0 && remaining_good > 0 && remaining_total > remaining_good) {
    --remaining_total;
    if (uniform_index(rng, remaining_total) < remaining_good) --remaining_good;
    --left;
  }
  if (remaining_total == remaining_good) remaining_good -= left;
  return complement ? remaining_good : good - remaining_good;
}

// Stadlober's ratio-of-uniforms sampler (HRUA).
std::int64_t hypergeometric_hrua(Rng& rng, std::int64_t good, std::int64_t bad, std::int64_t sample) {
  constexpr double d1 = 1.7155277699214135;  // 2 sqrt(2/e)
  constexpr double d2 = 0.8989161620588988;  // 3 - 2 sqrt(3/e)

  const std::int64_t popsize = good + bad;
  const std::int64_t cs = std::min(sample, popsize - sample);
  const std::int64_t min_gb = std::min(good, bad);
  const std::int64_t max_gb = std::max(good, bad);

  const double p = static_cast<double>(min_gb) / static_cast<double>(popsize);
  const double q = static_cast<double>(max_gb) / static_cast<double>(popsize);
  const double mu = static_cast<double>(cs) * p;
  const double a = mu + 0.5;
  const double var = static_cast<double>(popsize - cs) * static_cast<double>(cs) * p * q /
                     static_cast<double>(popsize - 1);
  const double c = std::sqrt(var + 0.5);
  const double h = d1 * c + d2;
  const auto m = static_cast<std::int64_t>(std::floor(static_cast<double>(cs + 1) *
                                                      static_cast<double>(min_gb + 1) /
                                                      static_cast<double>(popsize + 2)));
  const double g = log_factorial(m) + log_factorial(min_gb - m) + log_factorial(cs - m) +
                   log_factorial(max_gb - cs + m);
  const double b = std::min(static_cast<double>(std::min(cs, min_gb) + 1), std::floor(a + 16.0 * c));

  std::int64_t k = 0;
  for (;;) {
    const double u = uniform_open(rng);
    const double v = uniform_open(rng);
    const double x = a + h * (v - 0.5) / u;
    if (x < 0.0 || x >= b) continue;
    k = static_cast<std::int64_t>(std::floor(x));
    const double gp = log_factorial(k) + log_factorial(min_gb - k) + log_factorial(cs - k) +
                      log_factorial(max_gb - cs + k);
    const double t = g - gp;
    if (u * (4.0 - u) - 3.0 <= t) break;
    if (u * (u - t) >= 1.0) continue;
    if (2.0 * std::log(u) <= t) break;
  }
  if (good > bad) k = cs - k;
  if (cs < sample) k = good - k;
  return k;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  if (!sodium_ready()) throw std::runtime_error("libsodium initialisation failed");
  std::array<unsigned char, 16> in{};
  for (int i = 0; i < 8; ++i) {
    in[static_cast<std::size_t>(i)] = static_cast<unsigned char>(master_seed >> (8 * i));
    in[static_cast<std::size_t>(8 + i)] = static_cast<unsigned char>(index >> (8 * i));
  }
  std::array<unsigned char, 8> out{};
  crypto_generichash(out.data(), out.size(), in.data(), in.size(), nullptr, 0);
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed |= static_cast<std::uint64_t>(out[static_cast<std::size_t>(i)]) << (8 * i);
  return seed;
}

double uniform_open(Rng& rng) {
  // 53 random bits shifted by half an ulp: never 0, never 1.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::int64_t sample_geometric_failures(Rng& rng, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geometric: p must lie in (0, 1]");
  if (p == 1.0) return 0;
  return static_cast<std::int64_t>(std::floor(std::log(uniform_open(rng)) / std::log1p(-p)));
}

std::int64_t sample_negative_binomial(Rng& rng, std::int64_t n, double p) {
  if (n < 0) throw std::invalid_argument("negative binomial: n must be >= 0");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("negative binomial: p must lie in (0, 1]");
  if (n == 0 || p == 1.0) return 0;
  if (n <= 64) {
    std::int64_t s = 0;
    for (std::int64_t i = 0; i < n; ++i) s += sample_geometric_failures(rng, p);
    return s;
  }
  const double lambda =
      std::gamma_distribution<double>(static_cast<double>(n), (1.0 - p) / p)(rng);
  return sample_poisson(rng, lambda);
}

std::int64_t sample_binomial(Rng& rng, std::int64_t trials, double p) {
  if (trials < 0 || !(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: bad parameters");
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  return std::binomial_distribution<std::int64_t>(trials, p)(rng);
}

std::int64_t sample_poisson(Rng& rng, double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

std::int64_t sample_hypergeometric(Rng& rng, std::int64_t draws, std::int64_t marked, std::int64_t total) {
  if (total < 0 || marked < 0 || marked > total || draws < 0 || draws > total)
    throw std::invalid_argument("hypergeometric: bad parameters");
  if (draws == 0 || marked == 0) return 0;
  if (marked == total) return draws;
  if (draws == total) return marked;
  const std::int64_t bad = total - marked;
  if (draws >= 10 && draws <= total - 10) return hypergeometric_hrua(rng, marked, bad, draws);
  return hypergeometric_urn(rng, marked, bad, draws);
}

std::vector<std::int64_t> sample_multivariate_hypergeometric(Rng& rng, std::span<const std::int64_t> counts,
                                                             std::int64_t draws) {
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw std::invalid_argument("multivariate hypergeometric: negative count");
    total += c;
  }
  if (draws < 0 || draws > total) throw std::invalid_argument("multivariate hypergeometric: bad draw count");

  std::vector<std::int64_t> out(counts.size(), 0);
  constexpr std::int64_t shuffle_limit = 1 << 22;
  if (counts.size() > 16 && total <= shuffle_limit) {
    // Partial Fisher-Yates over item labels; pick the smaller of sample/complement.
    std::vector<std::uint32_t> labels;
    labels.reserve(static_cast<std::size_t>(total));
    for (std::size_t c = 0; c < counts.size(); ++c)
      labels.insert(labels.end(), static_cast<std::size_t>(counts[c]), static_cast<std::uint32_t>(c));
    const bool complement = draws > total / 2;
    const std::int64_t picks = complement ? total - draws : draws;
    for (std::int64_t i = 0; i < picks; ++i) {
      const std::int64_t j = i + uniform_index(rng, total - 1 - i);
      std::swap(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]);
      ++out[labels[static_cast<std::size_t>(i)]];
    }
    if (complement)
      for (std::size_t c = 0; c < counts.size(); ++c) out[c] = counts[c] - out[c];
    return out;
  }

  std::int64_t remaining_total = total;
  std::int64_t remaining_draws = draws;
  for (std::size_t c = 0; c < counts.size() && remaining_draws > 0; ++c) {
    const std::int64_t x = sample_hypergeometric(rng, remaining_draws, counts[c], remaining_total);
    out[c] = x;
    remaining_total -= counts[c];
    remaining_draws -= x;
  }
  return out;
}

}  // namespace lenski
