#pragma once

// Small goodness-of-fit toolkit used by the tests and the experiment runner.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lenski {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> xs);

/// Proportion with normal-approximation standard error.
MeanSe proportion(std::int64_t successes, std::int64_t trials);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_tail(double lambda);

/// One-sample KS against a continuous CDF.
KsResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

/// Two-sample KS; ties across samples are handled by stepping over distinct values.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Chi-square goodness of fit. `probs[i]` is the model probability of cell i;
/// whatever mass is missing from `probs` forms an extra tail cell. Adjacent
/// cells are pooled until every expected count is at least `min_expected`.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> probs,
                               std::int64_t tail_observed, double min_expected = 5.0);

}  // namespace lenski
