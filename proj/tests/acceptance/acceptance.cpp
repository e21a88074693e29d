// Acceptance checks, one pass/fail line per criterion.
// Usage: acceptance [id ...]; no arguments runs all twelve.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lenski/cannings.hpp"
#include "lenski/evolution.hpp"
#include "lenski/genealogy.hpp"
#include "lenski/gw.hpp"
#include "lenski/limits.hpp"
#include "lenski/parallel.hpp"
#include "lenski/runner.hpp"
#include "lenski/stats.hpp"
#include "lenski/sweep.hpp"
#include "lenski/yule.hpp"

using namespace lenski;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double x, double target) { return std::abs(x - target) / std::abs(target); }

ModelParams params(std::int64_t N, double gamma, double rho, double r0 = 1.0) {
  ModelParams p;
  p.N = N;
  p.gamma = gamma;
  p.rho = rho;
  p.r0 = r0;
  return p;
}

// 1: one-day selective advantage.
Verdict selective_advantage() {
  const auto p = params(10000, 10.0, 0.05);
  const std::int64_t reps = 1000000, chunks = 1000;
  const auto sums = parallel_map<double>(chunks, 0, [&](std::size_t c) {
    Rng rng = make_rng(101, c);
    double s = 0.0;
    for (std::int64_t i = 0; i < reps / chunks; ++i) s += static_cast<double>(two_type_step(1, p, rng));
    return s;
  });
  const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(reps);
  const double target = p.rho * std::log(p.gamma);
  const double err = rel_err(mean - 1.0, target);
  return {err <= 0.10, fmt("mean(K1)-1 = %.5f, target %.5f, rel.err %.3f (limit 0.10); exact finite-N mean-1 %.5f",
                           mean - 1.0, target, err, expected_next_mutants(1, p) - 1.0)};
}

// 2: fixation probability and absorption-time tail.
Verdict fixation_probability() {
  const auto p = params(2000, 2.0, 0.1);
  const auto est = estimate_fixation(p, 20000, 102);
  const double err = rel_err(est.p_hat, est.theoretical);
  const double censor_rate = static_cast<double>(est.censored) / static_cast<double>(est.replicates);
  const bool ok = err <= 0.15 && est.tail_fraction <= 0.05 && censor_rate < 0.01;
  // Split the tail by outcome: fixed runs need about ln(N) / (rho ln gamma) days.
  const double bound = std::pow(p.rho, -1.5);
  std::int64_t lost_late = 0, fixed_late = 0;
  for (const auto& r : est.records) {
    const bool late = r.end_day < 0 || static_cast<double>(r.end_day - r.start_day) > bound;
    if (!late) continue;
    if (r.outcome == SweepOutcome::Fixed) ++fixed_late;
    else ++lost_late;
  }
  return {ok, fmt("p_hat = %.5f (se %.5f), target %.6f, rel.err %.3f (limit 0.15); P(tau > rho^-1.5) = %.4f (limit "
                  "0.05; lost-and-late %.4f, fixed-and-late %.4f, P(fix) %.4f); censored %.4f",
                  est.p_hat, est.se, est.theoretical, err, est.tail_fraction,
                  static_cast<double>(lost_late) / static_cast<double>(est.replicates),
                  static_cast<double>(fixed_late) / static_cast<double>(est.replicates), est.p_hat, censor_rate)};
}

// 3: neutral chain against its exact solution.
Verdict neutral_oracle() {
  const auto p = params(10, 2.0, 0.0);
  const auto chain = exact_fixation_probabilities(p);
  double worst = 0.0;
  for (int k = 0; k <= 10; ++k) worst = std::max(worst, std::abs(chain.fixation[static_cast<std::size_t>(k)] - k / 10.0));
  bool mc_ok = true;
  std::string mc;
  for (std::int64_t k0 : {1, 3, 7}) {
    SweepOptions opt;
    opt.k0 = k0;
    const auto est = estimate_fixation(p, 20000, 103 + static_cast<std::uint64_t>(k0), opt);
    const double exact = chain.fixation[static_cast<std::size_t>(k0)];
    mc_ok = mc_ok && exact >= est.ci_low && exact <= est.ci_high;
    mc += fmt(" k=%lld: %.4f [%.4f, %.4f]", static_cast<long long>(k0), est.p_hat, est.ci_low, est.ci_high);
  }
  return {worst <= 1e-8 && mc_ok, fmt("max |h(k) - k/10| = %.2e (limit 1e-8); MC", worst) + mc};
}

// 4: pair and triple coalescence probabilities.
Verdict pair_coalescence() {
  Rng rng = make_rng(104, 0);
  const std::int64_t N = 500;
  const auto c = estimate_pair_coalescence(N, 10.0, 1.0, 100000, rng);
  const auto d = estimate_triple_coalescence(N, 10.0, 1.0, 100000, rng);
  const double nc = static_cast<double>(N) * c.estimate;
  const double err = rel_err(nc, 1.8);
  const double ratio = d.estimate / c.estimate;
  return {err <= 0.05 && ratio < 0.05,
          fmt("N c_hat = %.4f, target 1.8, rel.err %.4f (limit 0.05); d_hat/c_hat = %.5f (limit 0.05)", nc, err, ratio)};
}

// 5: rescaled pair coalescence times are standard exponential.
Verdict kingman_rescaling() {
  const std::int64_t N = 500;
  Rng crng = make_rng(105, 1u << 20);
  const double c_hat = estimate_pair_coalescence(N, 10.0, 1.0, 100000, crng).estimate;
  const auto gens = parallel_map<double>(1000, 0, [&](std::size_t i) {
    Rng rng = make_rng(105, i);
    return static_cast<double>(first_merger(N, 2, 10.0, 1.0, rng).generation);
  });
  std::vector<double> times;
  for (double g : gens) times.push_back(g * c_hat);
  const auto ks = ks_one_sample(times, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
  return {ks.p_value >= 0.01, fmt("KS D = %.4f, p = %.4f (need >= 0.01), mean %.4f, c_hat %.6f", ks.statistic,
                                  ks.p_value, mean_se(times).mean, c_hat)};
}

// 6: survival of the upper branching-process law.
Verdict gw_survival() {
  const std::int64_t N = 1000000;
  const double gamma = 2.0, rho = 0.01, alpha = 0.4;
  const auto law = upper_offspring_law(N, gamma, 1.0, rho, alpha);
  const double exact = survival_probability_exact(law);
  const double target = rho * c_of_gamma(gamma);
  const double err = rel_err(exact, target);
  Rng rng = make_rng(106, 0);
  const std::int64_t reps = 40000;
  const auto tail = hitting_time_tail(law, 5000, 0.1, reps, rng);
  const auto freq = proportion(tail.reached, reps);
  const bool mc_ok = std::abs(freq.mean - exact) <= 3.0 * freq.se;
  const auto asym = asymptotics(law);
  return {err <= 0.10 && mc_ok,
          fmt("exact survival %.6f, target %.7f, rel.err %.3f (limit 0.10); MC %.5f +- %.5f (%s); law p=%.6f c=%.6f, "
              "2 beta/sigma^2 = %.6f",
              exact, target, err, freq.mean, freq.se, mc_ok ? "within 3 SE" : "outside 3 SE", law.p, law.c,
              2.0 * asym.beta / asym.sigma2)};
}

// 7: stage-2 mean path against the logistic.
Verdict stage2_logistic_path() {
  const std::int64_t N = 10000;
  const auto p = params(N, 2.0, std::pow(static_cast<double>(N), -0.3));
  const auto days = static_cast<std::int64_t>(std::ceil(15.0 / p.rho));
  const auto paths = stage2_paths(p, 0.05, days, 100, 107);
  return {paths.sup_distance <= 0.05,
          fmt("sup |mean path - g| = %.4f over t in [0, %.1f] (limit 0.05); %lld runs, %lld lost", paths.sup_distance,
              paths.t.back(), static_cast<long long>(paths.runs), static_cast<long long>(paths.lost))};
}

ModelParams evolution_regime(double q = 0.0) { return ModelParams::from_scalings(5000, 0.3, 1.0, 2.0, 1.0, q); }

// 8: waiting time to the first successful mutation is exponential.
Verdict successful_mutations() {
  const auto p = evolution_regime();
  const std::int64_t reps = 300;
  EvolutionOptions opt;
  opt.stop_after_fixations = 1;
  const auto horizon = static_cast<std::int64_t>(50.0 / (p.rho * p.mu));
  const auto firsts = parallel_map<double>(static_cast<std::size_t>(reps), 0, [&](std::size_t i) {
    Rng rng = make_rng(108, i);
    const auto t = run_experiment(p, horizon, horizon, rng, opt);
    const auto steps = successful_mutation_count(t);
    return steps.jump_days.empty() ? -1.0 : static_cast<double>(steps.jump_days.front()) * p.rho * p.mu;
  });
  std::vector<double> xs;
  for (double x : firsts)
    if (x >= 0.0) xs.push_back(x);
  const double rate = successful_mutation_rate({p.gamma, p.r0, p.q});
  const auto ks = ks_one_sample(xs, [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); });
  const bool ok = xs.size() >= 200 && ks.p_value >= 0.01;
  return {ok, fmt("%zu arrivals; KS D = %.4f, p = %.4f (need >= 0.01); empirical rate %.4f vs %.4f", xs.size(),
                  ks.statistic, ks.p_value, 1.0 / mean_se(xs).mean, rate)};
}

struct MeanCurve {
  std::vector<double> t, mean_f;
  std::int64_t max_classes = 0;
};

MeanCurve mean_fitness(const ModelParams& p, double t_end, std::int64_t points, std::int64_t reps, std::uint64_t seed) {
  const double scale = 1.0 / (p.rho * p.rho * p.mu);
  const auto horizon = static_cast<std::int64_t>(std::ceil(t_end * scale));
  const auto every = std::max<std::int64_t>(1, horizon / points);
  const auto trajs = parallel_map<Trajectory>(static_cast<std::size_t>(reps), 0, [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    return run_experiment(p, horizon, every, rng);
  });
  MeanCurve out;
  const auto& rows0 = trajs.front().rows;
  for (std::size_t j = 0; j < rows0.size(); ++j) {
    double s = 0.0;
    for (const auto& t : trajs) s += t.rows[j].F;
    out.t.push_back(static_cast<double>(rows0[j].day) / scale);
    out.mean_f.push_back(s / static_cast<double>(reps));
  }
  for (const auto& t : trajs) out.max_classes = std::max(out.max_classes, t.max_classes);
  return out;
}

// 9: mean relative fitness follows the parabola.
Verdict fitness_parabola() {
  const auto p = evolution_regime();
  const auto curve = mean_fitness(p, 2.0, 200, 256, 109);
  const LimitCurveParams lc{p.gamma, p.r0, p.q};
  double sup = 0.0;
  for (std::size_t j = 0; j < curve.t.size(); ++j)
    if (curve.t[j] <= 2.0) sup = std::max(sup, std::abs(curve.mean_f[j] - fitness_limit(curve.t[j], lc)));
  const bool ok = sup <= 0.1 && curve.max_classes < 50;
  return {ok, fmt("sup |mean F - f| on [0, 2] = %.4f (limit 0.1); F(2) = %.4f vs f(2) = %.4f; max classes %lld", sup,
                  curve.mean_f.back(), fitness_limit(2.0, lc), static_cast<long long>(curve.max_classes))};
}

// 10: late-time power-law exponent under epistasis, and the closed form against the ODE.
Verdict epistatic_exponent() {
  const auto p = evolution_regime(1.0);
  const auto curve = mean_fitness(p, 20.0, 80, 12, 110);
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < curve.t.size(); ++j)
    if (curve.t[j] >= 5.0) {
      lx.push_back(std::log(curve.t[j]));
      ly.push_back(std::log(curve.mean_f[j]));
    }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    sxy += (lx[j] - mx) * (ly[j] - my);
    sxx += (lx[j] - mx) * (lx[j] - mx);
  }
  const double slope = sxy / sxx;
  const LimitCurveParams lc{p.gamma, p.r0, 1.0};
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(0.1 * i);
  const auto numeric = ode_solve(epistatic_field(lc), 1.0, grid);
  double ode_diff = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) ode_diff = std::max(ode_diff, std::abs(numeric[i] - epistatic_limit(grid[i], lc)));
  const bool ok = slope >= 0.20 && slope <= 0.30 && ode_diff <= 1e-8;
  return {ok, fmt("log-log slope on t in [5, 20] = %.4f (need [0.20, 0.30]); closed form vs ODE max diff %.2e (limit "
                  "1e-8)",
                  slope, ode_diff)};
}

// 11: mean hitting time of gamma N.
Verdict stopping_rule() {
  const std::int64_t N = 10000;
  const auto times = parallel_map<double>(1000, 0, [&](std::size_t i) {
    Rng rng = make_rng(111, i);
    const GrowthClass cls{N, 1.0};
    return sample_hitting_time(std::span<const GrowthClass>(&cls, 1), 2 * N, rng).time;
  });
  const auto m = mean_se(times);
  const double dev = std::abs(m.mean - std::log(2.0));
  return {dev <= 0.01 * std::log(2.0), fmt("mean hitting time %.6f (se %.2e), |diff| %.2e (limit %.2e)", m.mean, m.se,
                                           dev, 0.01 * std::log(2.0))};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 12: property suites.
Verdict property_suites() {
  std::string detail;
  bool all = true;
  auto note = [&](const std::string& name, bool ok, const std::string& extra) {
    all = all && ok;
    detail += name + (ok ? " ok" : " FAILED") + (extra.empty() ? "" : " (" + extra + ")") + "; ";
  };

  // Sequential acceptance against the hypergeometric day.
  struct Set {
    std::int64_t k, N;
    double gamma, rho;
  };
  int set_id = 0;
  for (const Set s : {Set{1, 1000, 2.0, 0.1}, Set{50, 500, 10.0, 0.05}, Set{300, 1000, 3.0, 0.2}}) {
    const auto p = params(s.N, s.gamma, s.rho);
    Rng a = make_rng(112, static_cast<std::uint64_t>(set_id)), b = make_rng(113, static_cast<std::uint64_t>(set_id));
    std::vector<double> seq, hyp;
    for (int i = 0; i < 5000; ++i) {
      seq.push_back(static_cast<double>(sequential_sampling_transition(s.k, p, a)));
      hyp.push_back(static_cast<double>(two_type_step(s.k, p, b)));
    }
    const auto ks = ks_two_sample(seq, hyp);
    note(fmt("sequential vs hypergeometric set %d", ++set_id), ks.p_value >= 0.01, fmt("KS p = %.3f", ks.p_value));
  }

  // Neutral martingale and absorption.
  {
    const auto p = params(1000, 2.0, 0.0);
    Rng rng = make_rng(114, 0);
    std::vector<double> ks;
    for (int i = 0; i < 20000; ++i) ks.push_back(static_cast<double>(two_type_step(100, p, rng)));
    const auto m = mean_se(ks);
    note("neutral martingale", std::abs(m.mean - 100.0) <= 4.0 * m.se, fmt("mean %.3f se %.3f", m.mean, m.se));
    const auto q = params(1000, 2.0, 0.1);
    bool absorbed = true;
    for (int i = 0; i < 200; ++i) absorbed = absorbed && two_type_step(0, q, rng) == 0 && two_type_step(1000, q, rng) == 1000;
    note("absorption", absorbed, "");
  }

  // Partition coarsening along the ancestral chain.
  {
    Rng rng = make_rng(115, 0);
    bool ok = true;
    for (int rep = 0; rep < 20; ++rep) {
      const auto chain = ancestral_chain(50, 8, 400, 3.0, 1.0, rng);
      for (std::size_t g = 1; g < chain.size(); ++g)
        ok = ok && is_coarsening(chain[g - 1], chain[g]) && block_count(chain[g]) <= block_count(chain[g - 1]);
    }
    note("partition coarsening", ok, "");
  }

  // Offspring pgf normalisation and moments.
  {
    bool ok = true;
    double worst = 0.0;
    for (const auto& law : {upper_offspring_law(1000000, 2.0, 1.0, 0.01, 0.4),
                            lower_offspring_law(1000000, 2.0, 1.0, 0.01, 0.4, 0.05), OffspringLaw{0.3, 0.7}}) {
      double mass = 0.0, m1 = 0.0, m2 = 0.0;
      for (std::int64_t k = 0; k < 2000; ++k) {
        const double pk = offspring_pmf(law, k);
        mass += pk;
        m1 += static_cast<double>(k) * pk;
        m2 += static_cast<double>(k * k) * pk;
      }
      const auto mom = offspring_moments(law);
      const double h = 1e-5;
      const double deriv = (offspring_pgf(law, 1.0) - offspring_pgf(law, 1.0 - h)) / h;
      worst = std::max({worst, std::abs(mass - 1.0), std::abs(offspring_pgf(law, 1.0) - 1.0), std::abs(m1 - mom.mean),
                        std::abs(m2 - m1 * m1 - mom.variance)});
      ok = ok && std::abs(deriv - mom.mean) < 1e-3;
    }
    note("pgf normalisation and moments", ok && worst < 1e-10, fmt("max deviation %.1e", worst));
  }

  // Byte-identical output from seeded runs, across thread counts.
  {
    namespace fs = std::filesystem;
    const auto base = fs::temp_directory_path() / "lenski_acceptance_determinism";
    fs::remove_all(base);
    RunConfig c;
    c.experiment = "fixation";
    c.params = params(500, 2.0, 0.1);
    c.replicates = 500;
    c.master_seed = 116;
    std::ostringstream log;
    std::vector<std::string> outputs;
    for (unsigned threads : {1u, 1u, 4u}) {
      c.threads = threads;
      c.output_dir = (base / std::to_string(outputs.size())).string();
      run(c, log);
      outputs.push_back(read_file(fs::path(c.output_dir) / "results.csv"));
    }
    note("seeded determinism", outputs[0] == outputs[1] && outputs[0] == outputs[2] && !outputs[0].empty(), "");
    fs::remove_all(base);
  }
  detail.resize(detail.size() - 2);
  return {all, detail};
}

const std::vector<std::function<Verdict()>>& criteria() {
  static const std::vector<std::function<Verdict()>> list{
      selective_advantage, fixation_probability, neutral_oracle,       pair_coalescence,
      kingman_rescaling,   gw_survival,          stage2_logistic_path, successful_mutations,
      fitness_parabola,    epistatic_exponent,   stopping_rule,        property_suites};
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int i = 1; i <= 12; ++i) ids.push_back(i);
  int failures = 0;
  for (int id : ids) {
    if (id < 1 || id > 12) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria()[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s  %s  [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
