#include "lenski/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lenski {

MeanSe mean_se(std::span<const double> xs) {
  MeanSe r;
  r.n = xs.size();
  if (xs.empty()) return r;
  // Welford.
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  r.mean = mean;
  r.variance = k > 1 ? m2 / static_cast<double>(k - 1) : 0.0;
  r.se = std::sqrt(r.variance / static_cast<double>(k));
  return r;
}

MeanSe proportion(std::int64_t successes, std::int64_t trials) {
  MeanSe r;
  if (trials <= 0) return r;
  r.n = static_cast<std::size_t>(trials);
  r.mean = static_cast<double>(successes) / static_cast<double>(trials);
  r.variance = r.mean * (1.0 - r.mean);
  r.se = std::sqrt(r.variance / static_cast<double>(trials));
  return r;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d)};
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> probs,
                               std::int64_t tail_observed, double min_expected) {
  if (observed.size() != probs.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
  std::int64_t total = tail_observed;
  for (auto o : observed) total += o;
  const double n = static_cast<double>(total);

  std::vector<double> exp_cells, obs_cells;
  double acc_e = 0.0, acc_o = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc_e += probs[i] * n;
    acc_o += static_cast<double>(observed[i]);
    mass += probs[i];
    if (acc_e >= min_expected) {
      exp_cells.push_back(acc_e);
      obs_cells.push_back(acc_o);
      acc_e = acc_o = 0.0;
    }
  }
  acc_e += std::max(0.0, 1.0 - mass) * n;
  acc_o += static_cast<double>(tail_observed);
  if (acc_e >= min_expected || exp_cells.empty()) {
    exp_cells.push_back(acc_e);
    obs_cells.push_back(acc_o);
  } else {
    exp_cells.back() += acc_e;
    obs_cells.back() += acc_o;
  }

  ChiSquareResult r;
  for (std::size_t i = 0; i < exp_cells.size(); ++i) {
    if (exp_cells[i] <= 0.0) continue;
    const double d = obs_cells[i] - exp_cells[i];
    r.statistic += d * d / exp_cells[i];
  }
  r.dof = static_cast<int>(exp_cells.size()) - 1;
  if (r.dof < 1) return r;
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace lenski
