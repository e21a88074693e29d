#include "lenski/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace lenski {

namespace {

bool heterogeneous(const PopulationState& s) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& c : s.classes) {
    lo = std::min(lo, c.rate);
    hi = std::max(hi, c.rate);
  }
  return hi - lo > 1e-12 * hi;
}

struct ActiveMutation {
  std::size_t index;  // into Trajectory::mutations / sweeps
  std::int64_t id;
};

}  // namespace

double relative_fitness(const PopulationState& state, double r0, double u) {
  if (!(u > 0.0) || !(r0 > 0.0)) throw std::invalid_argument("relative_fitness: need r0 > 0, u > 0");
  if (state.classes.empty() || state.N < 1) throw std::invalid_argument("relative_fitness: empty population");
  double hi = 0.0;
  for (const auto& c : state.classes) hi = std::max(hi, c.rate);
  if (state.classes.size() == 1) return state.classes.front().rate / r0;
  double acc = 0.0;
  for (const auto& c : state.classes)
    acc += static_cast<double>(c.count) / static_cast<double>(state.N) * std::exp((c.rate - hi) * u);
  return (hi * u + std::log(acc)) / (r0 * u);
}

Trajectory run_experiment(const ModelParams& p, std::int64_t horizon_days, std::int64_t record_every, Rng& rng,
                          const EvolutionOptions& opt) {
  p.validate(opt.assumption_a);
  if (horizon_days < 0) throw std::invalid_argument("run_experiment: horizon must be >= 0");
  if (horizon_days > std::numeric_limits<std::int64_t>::max() / 4) throw std::overflow_error("run_experiment: horizon overflow");
  if (record_every < 1) throw std::invalid_argument("run_experiment: record_every must be >= 1");

  const double u = p.measurement_time();
  const double n = static_cast<double>(p.N);
  Trajectory traj;
  PopulationState state = PopulationState::homogeneous(p.N, p.r0, 0);
  std::unordered_map<std::int64_t, std::int64_t> parent_of{{0, -1}};
  std::vector<ActiveMutation> active;
  std::int64_t next_id = 1;
  std::int64_t fixed_count = 0;
  bool interference_seen = false;

  auto carries = [&](std::int64_t lineage, std::int64_t m) {
    // Ids grow along ancestry, so the walk stops once it passes below m.
    while (lineage > m) lineage = parent_of.at(lineage);
    return lineage == m;
  };
  auto record = [&](std::int64_t day, double F) {
    traj.rows.push_back({day, F, 0, static_cast<std::int64_t>(state.classes.size()), interference_seen});
  };

  std::int64_t day = 0;
  bool stop = false;
  while (day <= horizon_days && !stop) {
    const double F = relative_fitness(state, p.r0, u);
    bool mutate = false;
    if (state.classes.size() == 1 && active.empty() && opt.fast_forward) {
      // Nothing changes until the next mutation; its day is geometric.
      std::int64_t gap = horizon_days - day + 1;
      if (p.mu > 0.0) gap = std::min(gap, sample_geometric_failures(rng, p.mu));
      for (std::int64_t d = day + (record_every - day % record_every) % record_every; d < day + gap;
           d += record_every)
        record(d, F);
      day += gap;
      if (day > horizon_days) break;
      if (day % record_every == 0) record(day, F);
      mutate = true;
    } else {
      if (day % record_every == 0) record(day, F);
      mutate = p.mu > 0.0 && uniform_open(rng) < p.mu;
    }

    if (mutate) {
      // Mutation: a uniformly chosen individual founds a new class.
      std::int64_t pick = std::uniform_int_distribution<std::int64_t>(0, p.N - 1)(rng);
      std::size_t ci = 0;
      while (pick >= state.classes[ci].count) pick -= state.classes[ci++].count;
      const auto parent = state.classes[ci];
      const double increment = std::pow(F, -p.q) * p.rho;
      MutationEvent ev{next_id, day, parent.lineage_id, parent.rate, parent.rate + increment, heterogeneous(state)};
      interference_seen = interference_seen || ev.interfered;
      if (ev.interfered && !traj.rows.empty() && traj.rows.back().day == day) traj.rows.back().interference = true;
      parent_of[next_id] = parent.lineage_id;
      if (--state.classes[ci].count == 0) state.classes.erase(state.classes.begin() + static_cast<std::ptrdiff_t>(ci));
      state.classes.push_back({ev.new_rate, 1, next_id});
      SweepRecord rec;
      rec.lineage_id = next_id;
      rec.start_day = day;
      if (1.0 >= opt.epsilon * n) rec.t1 = day;
      if (1.0 >= (1.0 - opt.epsilon) * n) rec.t2 = day;
      active.push_back({traj.mutations.size(), next_id});
      traj.mutations.push_back(ev);
      traj.sweeps.push_back(rec);
      ++next_id;
    }

    if (day == horizon_days) break;
    state = day_transition_multitype(state, p, rng);
    ++day;
    traj.max_classes = std::max<std::int64_t>(traj.max_classes, static_cast<std::int64_t>(state.classes.size()));

    {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const auto& c : state.classes) {
        lo = std::min(lo, c.rate);
        hi = std::max(hi, c.rate);
      }
      const double Fn = relative_fitness(state, p.r0, u);
      const double slack = 1e-12 * hi / p.r0;
      if (Fn < lo / p.r0 - slack || Fn > hi / p.r0 + slack) traj.bounds_held = false;
    }

    for (std::size_t a = 0; a < active.size();) {
      std::int64_t carriers = 0;
      for (const auto& c : state.classes)
        if (carries(c.lineage_id, active[a].id)) carriers += c.count;
      auto& rec = traj.sweeps[active[a].index];
      if (rec.t1 < 0 && static_cast<double>(carriers) >= opt.epsilon * n) rec.t1 = day;
      if (rec.t2 < 0 && static_cast<double>(carriers) >= (1.0 - opt.epsilon) * n) rec.t2 = day;
      if (carriers == 0 || carriers == p.N) {
        rec.end_day = day;
        rec.outcome = carriers == 0 ? SweepOutcome::Lost : SweepOutcome::Fixed;
        if (carriers == p.N) {
          traj.fixations.push_back({day, active[a].id});
          ++fixed_count;
        }
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(a));
      } else {
        ++a;
      }
    }
    if (opt.stop_after_fixations > 0 && fixed_count >= opt.stop_after_fixations) stop = true;
  }
  traj.final_day = std::min(day, horizon_days);

  if (!active.empty())
    traj.warnings.push_back(std::to_string(active.size()) +
                            " lineage(s) still segregating at the horizon are censored and excluded from H");

  // H_i: fixed mutations started by day i.
  const auto steps = successful_mutation_count(traj);
  for (auto& row : traj.rows) row.H = steps.at(row.day);
  return traj;
}

std::int64_t SuccessSteps::at(std::int64_t day) const {
  return std::upper_bound(jump_days.begin(), jump_days.end(), day) - jump_days.begin();
}

SuccessSteps successful_mutation_count(const Trajectory& traj) {
  SuccessSteps s;
  for (const auto& rec : traj.sweeps) {
    if (rec.outcome == SweepOutcome::Fixed) s.jump_days.push_back(rec.start_day);
    else if (rec.outcome == SweepOutcome::Censored) ++s.censored;
  }
  std::sort(s.jump_days.begin(), s.jump_days.end());
  return s;
}

InterferenceReport detect_interference(const Trajectory& traj) {
  InterferenceReport r;
  for (std::size_t i = 1; i < traj.mutations.size(); ++i) {
    ++r.successive_pairs;
    if (traj.mutations[i].interfered) r.pairs.emplace_back(traj.mutations[i - 1].id, traj.mutations[i].id);
  }
  if (r.successive_pairs > 0)
    r.frequency = static_cast<double>(r.pairs.size()) / static_cast<double>(r.successive_pairs);
  return r;
}

}  // namespace lenski
