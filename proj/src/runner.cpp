#include "lenski/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>

#include "lenski/cannings.hpp"
#include "lenski/evolution.hpp"
#include "lenski/genealogy.hpp"
#include "lenski/gw.hpp"
#include "lenski/io.hpp"
#include "lenski/kernels.hpp"
#include "lenski/limits.hpp"
#include "lenski/parallel.hpp"
#include "lenski/stats.hpp"
#include "lenski/sweep.hpp"

namespace lenski {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json ci_json(double lo, double hi) { return json::array({lo, hi}); }

json params_json(const ModelParams& p) {
  json j{{"N", p.N}, {"gamma", p.gamma}, {"r0", p.r0}, {"rho", p.rho}, {"mu", p.mu}, {"q", p.q}, {"u", p.u}};
  j["b"] = p.b ? json(*p.b) : json(nullptr);
  j["a"] = p.a ? json(*p.a) : json(nullptr);
  return j;
}

StoppingRule rule_of(const RunConfig& c) { return c.hitting_rule ? StoppingRule::Hitting : StoppingRule::Expectation; }

json run_neutral_day(const RunConfig& c, const fs::path& dir) {
  const auto& p = c.params;
  if (c.k0 < 0 || c.k0 > p.N) throw ConfigError("k0 must lie in [0, N]");
  struct Row {
    std::int64_t k_next, end_total;
    double length;
  };
  const auto rows = parallel_map<Row>(static_cast<std::size_t>(c.replicates), c.threads, [&](std::size_t i) {
    Rng rng = make_rng(c.master_seed, i);
    const auto day = day_transition_two_type(c.k0, p, rng, rule_of(c));
    return Row{day.k_next, day.outcome.end_sizes[0] + day.outcome.end_sizes[1], day.outcome.day_length};
  });
  CsvWriter csv(dir / "results.csv");
  csv.header({"replicate", "k_next", "end_total", "day_length"});
  std::vector<double> ks;
  ks.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv.row({static_cast<std::int64_t>(i), rows[i].k_next, rows[i].end_total, rows[i].length});
    ks.push_back(static_cast<double>(rows[i].k_next));
  }
  const auto m = mean_se(ks);
  return {{"estimate", m.mean},
          {"se", m.se},
          {"ci", ci_json(m.mean - 1.96 * m.se, m.mean + 1.96 * m.se)},
          {"target", expected_next_mutants(c.k0, p)},
          {"target_name", "(k/gamma) * growth_factor(k)"},
          {"selective_advantage", m.mean - static_cast<double>(c.k0)},
          {"selective_advantage_asymptotic", p.rho * std::log(p.gamma) / p.r0}};
}

json fixation_summary(const FixationEstimate& est) {
  return {{"estimate", est.p_hat},
          {"se", est.se},
          {"ci", ci_json(est.ci_low, est.ci_high)},
          {"target", est.theoretical},
          {"target_name", "rho * C(gamma) / r"},
          {"fixed", est.fixed},
          {"lost", est.lost},
          {"censored", est.censored},
          {"tail_fraction", est.tail_fraction}};
}

void write_sweeps(const fs::path& path, const std::vector<SweepRecord>& recs) {
  CsvWriter csv(path);
  csv.header({"replicate", "outcome", "start_day", "t1", "t2", "end_day"});
  for (const auto& r : recs)
    csv.row({r.lineage_id, std::string(outcome_name(r.outcome)), r.start_day, r.t1, r.t2, r.end_day});
}

json run_fixation(const RunConfig& c, const fs::path& dir, bool stages) {
  SweepOptions opt;
  opt.k0 = c.k0;
  opt.epsilon = c.epsilon;
  opt.rule = rule_of(c);
  const auto est = estimate_fixation(c.params, c.replicates, c.master_seed, opt, c.threads);
  write_sweeps(dir / "results.csv", est.records);
  json s = fixation_summary(est);
  if (stages) {
    const auto st = stage_decomposition(est.records, c.params.rho);
    s["stages"] = {{"fixed_runs", st.fixed_runs},       {"bound", st.bound},
                   {"stage1_within", st.stage1_within}, {"stage2_within", st.stage2_within},
                   {"stage3_within", st.stage3_within}, {"mean_stage1", st.mean_stage1},
                   {"mean_stage2", st.mean_stage2},     {"mean_stage3", st.mean_stage3},
                   {"ordered", st.ordered}};
  }
  return s;
}

json run_genealogy(const RunConfig& c, const fs::path& dir) {
  const auto& p = c.params;
  if (c.lineages < 2 || c.lineages > p.N) throw ConfigError("lineages must lie in [2, N]");
  Rng crng = make_rng(c.master_seed, static_cast<std::uint64_t>(c.replicates));
  const auto pair = estimate_pair_coalescence(p.N, p.gamma, p.r0, std::max<std::int64_t>(c.replicates, 1000), crng);
  const auto triple = estimate_triple_coalescence(p.N, p.gamma, p.r0, std::max<std::int64_t>(c.replicates, 1000), crng);
  const auto mergers = parallel_map<FirstMerger>(static_cast<std::size_t>(c.replicates), c.threads, [&](std::size_t i) {
    Rng rng = make_rng(c.master_seed, i);
    return first_merger(p.N, static_cast<int>(c.lineages), p.gamma, p.r0, rng);
  });
  CsvWriter csv(dir / "results.csv");
  csv.header({"replicate", "generation", "lineages_merged", "rescaled_time"});
  std::vector<double> rescaled;
  std::int64_t multiple = 0;
  for (std::size_t i = 0; i < mergers.size(); ++i) {
    const double t = static_cast<double>(mergers[i].generation) * pair.estimate;
    csv.row({static_cast<std::int64_t>(i), mergers[i].generation, static_cast<std::int64_t>(mergers[i].lineages_merged), t});
    rescaled.push_back(t);
    if (mergers[i].lineages_merged > 2 || mergers[i].multiple) ++multiple;
  }
  // With n lineages the first merger is Exp(C(n,2)) in coalescent time.
  const double pairs = static_cast<double>(c.lineages * (c.lineages - 1) / 2);
  const auto ks = ks_one_sample(rescaled, [pairs](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-pairs * x); });
  const double n = static_cast<double>(p.N);
  return {{"estimate", n * pair.estimate},
          {"se", n * pair.se},
          {"ci", ci_json(n * pair.ci_low, n * pair.ci_high)},
          {"target", 2.0 * (1.0 - 1.0 / p.gamma)},
          {"target_name", "N * c_N -> 2 (1 - 1/gamma)"},
          {"c_hat", pair.estimate},
          {"d_hat", triple.estimate},
          {"d_over_c", triple.estimate / pair.estimate},
          {"ks_statistic", ks.statistic},
          {"ks_p_value", ks.p_value},
          {"non_binary_first_mergers", static_cast<double>(multiple) / static_cast<double>(mergers.size())}};
}

json run_gw(const RunConfig& c, const fs::path& dir) {
  const auto& p = c.params;
  if (!(c.alpha > 0.0)) throw ConfigError("alpha must be positive");
  const auto law = upper_offspring_law(p.N, p.gamma, p.r0, p.rho, c.alpha);
  const auto asym = asymptotics(law);
  const double exact = survival_probability_exact(law);
  const auto gens = static_cast<std::int64_t>(asym.beta > 0.0 ? std::ceil(10.0 / asym.beta) : 1000);
  const auto runs = parallel_map<GWRun>(static_cast<std::size_t>(c.replicates), c.threads, [&](std::size_t i) {
    Rng rng = make_rng(c.master_seed, i);
    auto run = simulate_gw(law, gens, rng);
    run.sizes.erase(run.sizes.begin(), run.sizes.end() - 1);  // keep the final size only
    return run;
  });
  CsvWriter csv(dir / "results.csv");
  csv.header({"replicate", "extinct_at", "final_size", "capped"});
  std::int64_t alive = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    csv.row({static_cast<std::int64_t>(i), runs[i].extinct_at, runs[i].sizes.back(), runs[i].capped});
    alive += runs[i].survived();
  }
  const auto freq = proportion(alive, c.replicates);
  return {{"estimate", freq.mean},
          {"se", freq.se},
          {"ci", ci_json(freq.mean - 1.96 * freq.se, freq.mean + 1.96 * freq.se)},
          {"target", exact},
          {"target_name", "exact survival probability"},
          {"law", {{"p", law.p}, {"c", law.c}, {"beta", asym.beta}, {"sigma2", asym.sigma2}}},
          {"asymptotic", survival_probability_asymptotic(asym)},
          {"rho_C_over_r", theoretical_fixation(p.rho, p.r0, p.gamma)},
          {"generations", gens}};
}

json run_evolve(const RunConfig& c, const fs::path& dir) {
  const auto& p = c.params;
  std::int64_t horizon = c.horizon_days;
  if (horizon <= 0) {
    if (!(p.rho > 0.0 && p.mu > 0.0)) throw ConfigError("horizon_days is required when rho or mu is zero");
    horizon = static_cast<std::int64_t>(std::ceil(2.0 / (p.rho * p.rho * p.mu)));
  }
  EvolutionOptions opt;
  opt.epsilon = c.epsilon;
  opt.assumption_a = c.assumption_a;
  const auto trajs = parallel_map<Trajectory>(static_cast<std::size_t>(c.replicates), c.threads, [&](std::size_t i) {
    Rng rng = make_rng(c.master_seed, i);
    return run_experiment(p, horizon, c.record_every, rng, opt);
  });

  CsvWriter csv(dir / "results.csv");
  csv.header({"replicate", "day", "F", "H", "n_classes", "interference_flag"});
  json events = json::array();
  std::vector<double> finals;
  std::int64_t censored = 0, interfering = 0, pairs = 0, fixations = 0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const auto& t = trajs[i];
    for (const auto& r : t.rows) csv.row({static_cast<std::int64_t>(i), r.day, r.F, r.H, r.n_classes, r.interference});
    if (!t.rows.empty()) finals.push_back(t.rows.back().F);
    json muts = json::array();
    for (std::size_t m = 0; m < t.mutations.size(); ++m) {
      const auto& e = t.mutations[m];
      const auto& s = t.sweeps[m];
      muts.push_back({{"id", e.id}, {"day", e.day}, {"parent", e.parent_lineage}, {"new_rate", e.new_rate},
                      {"interfered", e.interfered}, {"outcome", outcome_name(s.outcome)}, {"end_day", s.end_day}});
    }
    json fix = json::array();
    for (const auto& f : t.fixations) fix.push_back({{"day", f.day}, {"lineage_id", f.lineage_id}});
    events.push_back({{"replicate", i}, {"mutations", muts}, {"fixations", fix}, {"warnings", t.warnings}});
    const auto inter = detect_interference(t);
    interfering += static_cast<std::int64_t>(inter.pairs.size());
    pairs += inter.successive_pairs;
    censored += successful_mutation_count(t).censored;
    fixations += static_cast<std::int64_t>(t.fixations.size());
  }
  write_json(dir / "events.json", events);
  const auto m = mean_se(finals);
  const LimitCurveParams lc{p.gamma, p.r0, p.q};
  const double t_end = p.rho > 0.0 && p.mu > 0.0 ? static_cast<double>(horizon) * p.rho * p.rho * p.mu : 0.0;
  return {{"estimate", m.mean},
          {"se", m.se},
          {"ci", ci_json(m.mean - 1.96 * m.se, m.mean + 1.96 * m.se)},
          {"target", epistatic_limit(t_end, lc)},
          {"target_name", "limit fitness curve at the horizon"},
          {"horizon_days", horizon},
          {"rescaled_horizon", t_end},
          {"fixations", fixations},
          {"censored_lineages", censored},
          {"interference_frequency", pairs > 0 ? static_cast<double>(interfering) / static_cast<double>(pairs) : 0.0}};
}

json run_curves(const RunConfig& c, const fs::path& dir) {
  const auto& p = c.params;
  if (!(c.t_step > 0.0) || !(c.t_max >= 0.0)) throw ConfigError("t_step must be positive and t_max >= 0");
  const LimitCurveParams lc{p.gamma, p.r0, p.q};
  std::string curve = c.curve;
  if (curve == "auto") curve = p.q == 0.0 ? "fitness" : "epistatic";
  std::function<double(double)> f;
  std::function<double(double)> field;
  double x0 = 1.0;
  if (curve == "fitness") {
    f = [&](double t) { return fitness_limit(t, lc); };
    field = epistatic_field({p.gamma, p.r0, 0.0});
  } else if (curve == "epistatic") {
    f = [&](double t) { return epistatic_limit(t, lc); };
    field = epistatic_field(lc);
  } else if (curve == "logistic") {
    x0 = c.epsilon;
    f = [&](double t) { return stage2_logistic(t, x0, p.r0, p.gamma); };
    const double lambda = std::log(p.gamma) / p.r0;
    field = [lambda](double g) { return lambda * g * (1.0 - g); };
  } else {
    throw ConfigError("unknown curve '" + c.curve + "'");
  }
  const auto count = static_cast<std::int64_t>(std::llround(c.t_max / c.t_step)) + 1;
  std::vector<double> ts;
  for (std::int64_t i = 0; i < count; ++i) ts.push_back(static_cast<double>(i) * c.t_step);
  const auto numeric = ts.size() > 1 ? ode_solve(field, x0, ts) : std::vector<double>{x0};
  CsvWriter csv(dir / "results.csv");
  csv.header({"t", "value"});
  double max_diff = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double v = f(ts[i]);
    csv.row({ts[i], v});
    max_diff = std::max(max_diff, std::abs(v - numeric[i]));
  }
  const double last = f(ts.back());
  return {{"estimate", numeric.back()},
          {"target", last},
          {"target_name", curve + " closed form at t_max"},
          {"curve", curve},
          {"rows", count},
          {"ode_max_abs_diff", max_diff},
          {"C_gamma", c_of_gamma(p.gamma)},
          {"successful_mutation_rate", successful_mutation_rate(lc)}};
}

}  // namespace

void RunConfig::validate() const {
  if (std::find(experiment_names().begin(), experiment_names().end(), experiment) == experiment_names().end())
    throw ConfigError("unknown experiment '" + experiment + "'");
  if (experiment == "compare") {
    if (compare_dirs.empty()) throw ConfigError("compare needs at least one run directory");
    return;
  }
  params.validate(assumption_a);
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in (0, 1/2)");
  if (output_dir.empty()) throw ConfigError("output directory is required");
  profile_tolerance(tolerance_profile);
  if ((experiment == "fixation" || experiment == "sweep-stages") && (k0 < 1 || k0 > params.N))
    throw ConfigError("k0 must lie in [1, N]");
}

json RunConfig::to_json() const {
  return {{"experiment", experiment},       {"params", params_json(params)}, {"replicates", replicates},
          {"seed", master_seed},            {"output_dir", output_dir},      {"record_every", record_every},
          {"threads", threads},             {"tolerance_profile", tolerance_profile},
          {"k0", k0},                       {"epsilon", epsilon},            {"alpha", alpha},
          {"horizon_days", horizon_days},   {"lineages", lineages},          {"t_max", t_max},
          {"t_step", t_step},               {"curve", curve},                {"hitting_rule", hitting_rule},
          {"assumption_a", assumption_a},   {"compare_dirs", compare_dirs}};
}

double profile_tolerance(const std::string& profile) {
  if (profile == "default") return 0.15;
  if (profile == "strict") return 0.05;
  if (profile == "loose") return 0.30;
  throw ConfigError("unknown tolerance profile '" + profile + "' (default, strict, loose)");
}

json run(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.experiment == "compare")
    return compare(config.compare_dirs, config.output_dir, config.tolerance_profile, log);

  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  json summary;
  const auto& e = config.experiment;
  if (e == "neutral-day") summary = run_neutral_day(config, dir);
  else if (e == "fixation") summary = run_fixation(config, dir, false);
  else if (e == "sweep-stages") summary = run_fixation(config, dir, true);
  else if (e == "genealogy") summary = run_genealogy(config, dir);
  else if (e == "gw") summary = run_gw(config, dir);
  else if (e == "evolve") summary = run_evolve(config, dir);
  else summary = run_curves(config, dir);

  summary["experiment"] = e;
  summary["replicates"] = config.replicates;
  summary["seed"] = config.master_seed;
  write_json(dir / "summary.json", summary);
  write_json(dir / "manifest.json", {{"config", config.to_json()},
                                     {"seed", config.master_seed},
                                     {"version", LENSKI_VERSION},
                                     {"simd", simd_level_name(active_simd_level())},
                                     {"threads", resolve_threads(config.threads)}});
  log << e << ": estimate " << format_double(summary.value("estimate", 0.0)) << ", target "
      << format_double(summary.value("target", 0.0)) << " -> " << dir.string() << '\n';
  return summary;
}

json compare(const std::vector<std::string>& run_dirs, const std::string& output_dir, const std::string& profile,
             std::ostream& log) {
  const double tol = profile_tolerance(profile);
  json rows = json::array();
  std::string kind;
  for (const auto& d : run_dirs) {
    const fs::path path = fs::path(d) / "summary.json";
    if (!fs::exists(path)) throw ConfigError("no summary.json in " + d);
    const json s = read_json(path);
    const std::string e = s.value("experiment", "");
    if (kind.empty()) kind = e;
    else if (e != kind) throw ConfigError("incompatible experiment types: " + kind + " vs " + e);
    const double est = s.value("estimate", 0.0);
    const double target = s.value("target", 0.0);
    const double rel = target != 0.0 ? std::abs(est - target) / std::abs(target) : std::abs(est - target);
    rows.push_back({{"run", d},
                    {"experiment", e},
                    {"seed", s.value("seed", json(nullptr))},
                    {"estimate", est},
                    {"target", target},
                    {"relative_error", rel},
                    {"tolerance", tol},
                    {"pass", rel <= tol},
                    {"summary", s}});
  }
  const json report{{"experiment", kind}, {"profile", profile}, {"rows", rows}};
  if (!output_dir.empty()) {
    fs::create_directories(output_dir);
    write_json(fs::path(output_dir) / "comparison.json", report);
    CsvWriter csv(fs::path(output_dir) / "comparison.csv");
    csv.header({"run", "experiment", "estimate", "target", "relative_error", "tolerance", "pass"});
    for (const auto& r : rows)
      csv.row({r["run"].get<std::string>(), r["experiment"].get<std::string>(), r["estimate"].get<double>(),
               r["target"].get<double>(), r["relative_error"].get<double>(), tol, r["pass"].get<bool>()});
  }
  for (const auto& r : rows)
    log << (r["pass"].get<bool>() ? "PASS " : "FAIL ") << r["run"].get<std::string>() << "  estimate "
        << format_double(r["estimate"].get<double>()) << "  target " << format_double(r["target"].get<double>())
        << "  rel.err " << format_double(r["relative_error"].get<double>()) << '\n';
  return report;
}

}  // namespace lenski
