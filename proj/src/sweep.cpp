#include "lenski/sweep.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/negative_binomial.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lenski/parallel.hpp"
#include "lenski/stats.hpp"
#include "lenski/yule.hpp"

namespace lenski {

namespace {

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Failures pmf of NB(n, p) on 0..q where q is the (1 - tail) quantile.
std::vector<double> truncated_nb(std::int64_t n, double p, double tail) {
  if (n == 0) return {1.0};
  boost::math::negative_binomial_distribution<double> nb(static_cast<double>(n), p);
  const auto upper = static_cast<std::int64_t>(std::ceil(boost::math::quantile(nb, 1.0 - tail)));
  std::vector<double> pmf(static_cast<std::size_t>(upper) + 1);
  for (std::int64_t x = 0; x <= upper; ++x) pmf[static_cast<std::size_t>(x)] = boost::math::pdf(nb, static_cast<double>(x));
  return pmf;
}

}  // namespace

const char* outcome_name(SweepOutcome o) {
  switch (o) {
    case SweepOutcome::Fixed: return "fixed";
    case SweepOutcome::Lost: return "lost";
    default: return "censored";
  }
}

double theoretical_fixation(double rho, double r, double gamma) {
  if (!(rho >= 0.0) || !(r > 0.0)) throw std::invalid_argument("theoretical_fixation: need rho >= 0, r > 0");
  return rho * c_of_gamma(gamma) / r;
}

std::int64_t sweep_day_cap(double rho) {
  if (rho <= 0.0) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::ceil(1e3 * std::pow(rho, -1.5)));
}

SweepRecord run_sweep(const ModelParams& p, const SweepOptions& opt, Rng& rng) {
  if (opt.k0 < 1 || opt.k0 > p.N) throw std::invalid_argument("run_sweep: k0 must lie in [1, N]");
  const std::int64_t cap = opt.max_days > 0 ? opt.max_days : sweep_day_cap(p.rho);
  const double n = static_cast<double>(p.N);
  const double lo = opt.epsilon * n;
  const double hi = (1.0 - opt.epsilon) * n;
  SweepRecord rec;
  std::int64_t k = opt.k0;
  auto mark = [&](std::int64_t day) {
    if (rec.t1 < 0 && static_cast<double>(k) >= lo) rec.t1 = day;
    if (rec.t2 < 0 && static_cast<double>(k) >= hi) rec.t2 = day;
  };
  mark(0);
  for (std::int64_t day = 1; day <= cap; ++day) {
    k = two_type_step(k, p, rng, opt.rule);
    mark(day);
    if (k == 0 || k == p.N) {
      rec.end_day = day;
      rec.outcome = k == 0 ? SweepOutcome::Lost : SweepOutcome::Fixed;
      return rec;
    }
  }
  rec.outcome = SweepOutcome::Censored;
  return rec;
}

FixationEstimate estimate_fixation(const ModelParams& p, std::int64_t replicates, std::uint64_t master_seed,
                                   const SweepOptions& opt, unsigned threads) {
  if (replicates < 1) throw std::invalid_argument("estimate_fixation: replicates must be positive");
  FixationEstimate est;
  est.replicates = replicates;
  est.records = parallel_map<SweepRecord>(static_cast<std::size_t>(replicates), threads, [&](std::size_t i) {
    Rng rng = make_rng(master_seed, i);
    auto rec = run_sweep(p, opt, rng);
    rec.lineage_id = static_cast<std::int64_t>(i);
    return rec;
  });
  const double bound = p.rho > 0.0 ? std::pow(p.rho, -1.5) : std::numeric_limits<double>::infinity();
  std::int64_t late = 0;
  for (const auto& r : est.records) {
    if (r.outcome == SweepOutcome::Fixed) ++est.fixed;
    else if (r.outcome == SweepOutcome::Lost) ++est.lost;
    else ++est.censored;
    if (r.outcome == SweepOutcome::Censored || static_cast<double>(r.end_day - r.start_day) > bound) ++late;
  }
  const auto prop = proportion(est.fixed, replicates);
  est.p_hat = prop.mean;
  est.se = prop.se;
  est.ci_low = prop.mean - 1.96 * prop.se;
  est.ci_high = prop.mean + 1.96 * prop.se;
  est.theoretical = theoretical_fixation(p.rho, p.r0, p.gamma);
  est.tail_fraction = static_cast<double>(late) / static_cast<double>(replicates);
  return est;
}

StageSummary stage_decomposition(const std::vector<SweepRecord>& records, double rho) {
  StageSummary s;
  s.bound = rho > 0.0 ? std::pow(rho, -1.1) : std::numeric_limits<double>::infinity();
  std::int64_t w1 = 0, w2 = 0, w3 = 0;
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  for (const auto& r : records) {
    if (r.outcome != SweepOutcome::Fixed) continue;
    ++s.fixed_runs;
    if (!(r.start_day <= r.t1 && r.t1 <= r.t2 && r.t2 <= r.end_day)) s.ordered = false;
    const double a = static_cast<double>(r.t1 - r.start_day);
    const double b = static_cast<double>(r.t2 - r.t1);
    const double c = static_cast<double>(r.end_day - r.t2);
    d1 += a;
    d2 += b;
    d3 += c;
    w1 += a <= s.bound;
    w2 += b <= s.bound;
    w3 += c <= s.bound;
  }
  if (s.fixed_runs > 0) {
    const double n = static_cast<double>(s.fixed_runs);
    s.stage1_within = static_cast<double>(w1) / n;
    s.stage2_within = static_cast<double>(w2) / n;
    s.stage3_within = static_cast<double>(w3) / n;
    s.mean_stage1 = d1 / n;
    s.mean_stage2 = d2 / n;
    s.mean_stage3 = d3 / n;
  }
  return s;
}

std::vector<std::vector<double>> exact_transition_matrix(const ModelParams& p, double tail) {
  const std::int64_t N = p.N;
  if (N < 2 || N > 200) throw std::invalid_argument("exact_transition_matrix: N must lie in [2, 200]");
  std::vector<std::vector<double>> P(static_cast<std::size_t>(N + 1), std::vector<double>(static_cast<std::size_t>(N + 1), 0.0));
  P[0][0] = 1.0;
  P[static_cast<std::size_t>(N)][static_cast<std::size_t>(N)] = 1.0;
  for (std::int64_t k = 1; k < N; ++k) {
    const double s = sigma_k(N, k, p.r0, p.rho, p.gamma);
    const auto mut = truncated_nb(k, std::exp(-(p.r0 + p.rho) * s), tail);
    const auto res = truncated_nb(N - k, std::exp(-p.r0 * s), tail);
    auto& row = P[static_cast<std::size_t>(k)];
    for (std::size_t x = 0; x < mut.size(); ++x) {
      const std::int64_t m = k + static_cast<std::int64_t>(x);
      for (std::size_t y = 0; y < res.size(); ++y) {
        const std::int64_t z = N - k + static_cast<std::int64_t>(y);
        const double w = mut[x] * res[y];
        if (w == 0.0) continue;
        const double log_total = log_choose(m + z, N);
        for (std::int64_t kk = std::max<std::int64_t>(0, N - z); kk <= std::min(N, m); ++kk)
          row[static_cast<std::size_t>(kk)] += w * std::exp(log_choose(m, kk) + log_choose(z, N - kk) - log_total);
      }
    }
    double sum = 0.0;
    for (double v : row) sum += v;
    for (double& v : row) v /= sum;
  }
  return P;
}

ExactChain exact_fixation_probabilities(const ModelParams& p, double tail) {
  const auto P = exact_transition_matrix(p, tail);
  const std::int64_t N = p.N;
  const auto m = static_cast<Eigen::Index>(N - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = P[static_cast<std::size_t>(i + 1)];
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) -= row[static_cast<std::size_t>(j + 1)];
    rhs(i) = row[static_cast<std::size_t>(N)];
  }
  const Eigen::VectorXd h = A.partialPivLu().solve(rhs);
  ExactChain out;
  out.fixation.assign(static_cast<std::size_t>(N + 1), 0.0);
  out.fixation[static_cast<std::size_t>(N)] = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) out.fixation[static_cast<std::size_t>(i + 1)] = h(i);
  return out;
}

Stage2Paths stage2_paths(const ModelParams& p, double x0, std::int64_t days, std::int64_t runs,
                         std::uint64_t master_seed, unsigned threads) {
  if (!(x0 > 0.0 && x0 < 1.0) || days < 1 || runs < 1) throw std::invalid_argument("stage2_paths: bad arguments");
  if (!(p.rho > 0.0)) throw std::invalid_argument("stage2_paths: rho must be positive");
  const auto k0 = static_cast<std::int64_t>(std::ceil(x0 * static_cast<double>(p.N)));
  const auto paths = parallel_map<std::vector<std::int64_t>>(static_cast<std::size_t>(runs), threads, [&](std::size_t i) {
    Rng rng = make_rng(master_seed, i);
    std::vector<std::int64_t> path(static_cast<std::size_t>(days) + 1);
    std::int64_t k = k0;
    path[0] = k;
    for (std::int64_t d = 1; d <= days; ++d) {
      k = two_type_step(k, p, rng);
      path[static_cast<std::size_t>(d)] = k;
    }
    return path;
  });
  Stage2Paths out;
  out.runs = runs;
  const double start = static_cast<double>(k0) / static_cast<double>(p.N);
  for (const auto& path : paths)
    if (path.back() == 0) ++out.lost;
  for (std::int64_t d = 0; d <= days; ++d) {
    double sum = 0.0;
    for (const auto& path : paths) sum += static_cast<double>(path[static_cast<std::size_t>(d)]);
    const double mean = sum / (static_cast<double>(runs) * static_cast<double>(p.N));
    const double t = p.rho * static_cast<double>(d);
    const double g = stage2_logistic(t, start, p.r0, p.gamma);
    out.t.push_back(t);
    out.mean_path.push_back(mean);
    out.logistic.push_back(g);
    out.sup_distance = std::max(out.sup_distance, std::abs(mean - g));
  }
  return out;
}

std::vector<double> fixation_over_rho_crn(const ModelParams& p, const std::vector<double>& rhos,
                                          std::int64_t replicates, std::uint64_t master_seed) {
  std::vector<double> out;
  for (double rho : rhos) {
    ModelParams q = p;
    q.rho = rho;
    const std::int64_t cap = sweep_day_cap(rho);
    std::int64_t fixed = 0;
    for (std::int64_t i = 0; i < replicates; ++i) {
      Rng growth = make_rng(master_seed, 2 * static_cast<std::uint64_t>(i));
      Rng accept = make_rng(master_seed, 2 * static_cast<std::uint64_t>(i) + 1);
      std::int64_t k = 1;
      for (std::int64_t d = 0; d < cap && k > 0 && k < p.N; ++d)
        k = sequential_sampling_transition(k, q, growth, accept);
      fixed += k == p.N;
    }
    out.push_back(static_cast<double>(fixed) / static_cast<double>(replicates));
  }
  return out;
}

}  // namespace lenski
