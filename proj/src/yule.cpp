#include "lenski/yule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lenski {

namespace {

// Fenwick tree over per-class total birth rates.
class RateTree {
 public:
  explicit RateTree(std::size_t n) : tree_(n + 1, 0.0), size_(n) {
    while ((top_ << 1) <= size_) top_ <<= 1;
  }

  void add(std::size_t i, double delta) {
    for (++i; i <= size_; i += i & (~i + 1)) tree_[i] += delta;
  }

  // Smallest index whose prefix sum exceeds x.
  std::size_t find(double x) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= size_ && tree_[next] <= x) {
        pos = next;
        x -= tree_[next];
      }
    }
    return std::min(pos, size_ - 1);
  }

 private:
  std::vector<double> tree_;
  std::size_t size_;
  std::size_t top_ = 1;
};

}  // namespace

std::int64_t sample_yule_size(const YuleLaw& law, Rng& rng) {
  if (law.founders < 1 || !(law.rate > 0.0) || !(law.time >= 0.0))
    throw std::invalid_argument("sample_yule_size: need founders >= 1, rate > 0, time >= 0");
  if (law.time == 0.0) return law.founders;
  return law.founders + sample_negative_binomial(rng, law.founders, std::exp(-law.rate * law.time));
}

HittingResult sample_hitting_time(std::span<const GrowthClass> classes, std::int64_t threshold, Rng& rng) {
  std::int64_t total = 0;
  for (const auto& c : classes) {
    if (c.count < 0 || !(c.rate > 0.0)) throw std::invalid_argument("sample_hitting_time: bad class");
    total += c.count;
  }
  if (total < 1) throw std::invalid_argument("sample_hitting_time: no founders");
  if (threshold <= total) throw std::invalid_argument("sample_hitting_time: threshold must exceed the start size");

  HittingResult out;
  out.sizes.reserve(classes.size());
  RateTree tree(classes.size());
  double total_rate = 0.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    out.sizes.push_back(classes[i].count);
    const double w = static_cast<double>(classes[i].count) * classes[i].rate;
    tree.add(i, w);
    total_rate += w;
  }

  std::exponential_distribution<double> expo(1.0);
  while (total < threshold) {
    out.time += expo(rng) / total_rate;
    std::size_t i = 0;
    if (classes.size() > 1) i = tree.find(uniform_open(rng) * total_rate);
    while (out.sizes[i] == 0) i = (i + 1) % classes.size();  // guard against rounding at the edges
    ++out.sizes[i];
    ++total;
    tree.add(i, classes[i].rate);
    total_rate += classes[i].rate;
  }
  return out;
}

double day_length(std::span<const GrowthClass> classes, double gamma) {
  if (!(gamma > 1.0)) throw std::invalid_argument("day_length: gamma must exceed 1");
  double n = 0.0;
  double lo_rate = std::numeric_limits<double>::infinity();
  double hi_rate = 0.0;
  for (const auto& c : classes) {
    if (c.count < 0 || !(c.rate > 0.0)) throw std::invalid_argument("day_length: bad class");
    if (c.count == 0) continue;
    n += static_cast<double>(c.count);
    lo_rate = std::min(lo_rate, c.rate);
    hi_rate = std::max(hi_rate, c.rate);
  }
  if (n == 0.0) throw std::invalid_argument("day_length: empty population");
  const double lg = std::log(gamma);
  if (lo_rate == hi_rate) return lg / lo_rate;

  // g(s) = sum w_c exp(a_c s) - gamma with w_c = count_c / N; increasing and convex.
  auto eval = [&](double s, double& deriv) {
    double v = 0.0;
    deriv = 0.0;
    for (const auto& c : classes) {
      if (c.count == 0) continue;
      const double e = static_cast<double>(c.count) / n * std::exp(c.rate * s);
      v += e;
      deriv += c.rate * e;
    }
    return v - gamma;
  };

  double lo = lg / hi_rate;
  double hi = lg / lo_rate;
  double s = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    double d = 0.0;
    const double g = eval(s, d);
    if (std::abs(g) <= 1e-13 * gamma) return s;
    if (g > 0.0) hi = s;
    else lo = s;
    double next = s - g / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-15 * s) return next;
    s = next;
  }
  throw std::runtime_error("day_length: root finder did not converge");
}

double sigma_k(std::int64_t N, std::int64_t k, double r, double rho, double gamma) {
  if (N < 1 || k < 0 || k > N || !(r > 0.0) || !(rho >= 0.0) || !(gamma > 1.0))
    throw std::invalid_argument("sigma_k: need 0 <= k <= N, r > 0, rho >= 0, gamma > 1");
  const GrowthClass cls[2] = {{k, r + rho}, {N - k, r}};
  return day_length(cls, gamma);
}

double growth_factor(std::int64_t k, std::int64_t N, double r, double rho, double gamma) {
  if (rho == 0.0) return gamma;
  if (k == N) return gamma;
  return std::exp((r + rho) * sigma_k(N, k, r, rho, gamma));
}

}  // namespace lenski
