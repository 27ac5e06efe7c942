#include "pensim/microsim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pensim/csv.hpp"
#include "pensim/parallel.hpp"

namespace pensim {

long Population::alive_count() const {
  long n = 0;
  for (const auto& a : agents) n += a.alive() ? 1 : 0;
  return n;
}

long Population::resident_count() const {
  long n = 0;
  for (const auto& a : agents) n += a.resident() ? 1 : 0;
  return n;
}

std::string scenario_token(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::status_quo: return "status_quo";
    case ScenarioKind::soft_brexit: return "soft_brexit";
    case ScenarioKind::hard_brexit: return "hard_brexit";
  }
  return "?";
}

ScenarioKind parse_scenario(const std::string& token) {
  if (token == "status_quo") return ScenarioKind::status_quo;
  if (token == "soft_brexit" || token == "soft") return ScenarioKind::soft_brexit;
  if (token == "hard_brexit" || token == "hard") return ScenarioKind::hard_brexit;
  throw ParseError("unknown scenario '" + token + "'");
}

std::vector<ScenarioKind> all_scenarios() {
  return {ScenarioKind::status_quo, ScenarioKind::soft_brexit, ScenarioKind::hard_brexit};
}

MigrationScenario MigrationScenario::standard(ScenarioKind kind) {
  MigrationScenario s;
  s.kind = kind;
  switch (kind) {
    case ScenarioKind::status_quo:
      break;
    case ScenarioKind::soft_brexit:
      s.exodus_fraction = 0.10;
      s.repatriation_fraction = 0.10;
      s.eu_inflow_rule = EuInflowRule::avg_2000_2011;
      s.uk_outflow_reduction = 0.80;
      break;
    case ScenarioKind::hard_brexit:
      s.exodus_fraction = 0.70;
      s.repatriation_fraction = 0.80;
      s.eu_inflow_rule = EuInflowRule::pre_2004;
      s.uk_outflow_reduction = 0.30;
      break;
  }
  return s;
}

void SimConfig::validate() const {
  if (replicates < 1) throw InvalidSpec("replicates must be >= 1");
  if (scale < 1.0) throw InvalidSpec("scale must be >= 1");
  if (end_year < start_year) throw InvalidSpec("end year before start year");
  if (end_year > 2061) throw InvalidSpec("simulation horizon is capped at 2061");
  if (ratio_eval_month < 1 || ratio_eval_month > 12) throw InvalidSpec("bad evaluation month");
  if (!(male_birth_share > 0.0 && male_birth_share < 1.0)) {
    throw InvalidSpec("male birth share must be in (0,1)");
  }
}

Population init_population(const PopulationTable& table, double scale,
                           std::uint64_t /*seed*/) {
  if (table.cells.empty()) throw EmptyTable("population table has no cells");
  if (scale < 1.0) throw InvalidSpec("scale must be >= 1");

  const MonthIndex base = month_index(table.base_year, 1);
  Population pop;
  for (const auto& cell : table.cells) {
    for (const auto& [arrival, count] : cell.counts_by_arrival) {
      const long n = std::llround(count / scale);
      for (long i = 0; i < n; ++i) {
        Individual a;
        // Age `age` at the base date: births spread uniformly over the
        // twelve admissible months.
        const int offset = static_cast<int>(((2 * i + 1) * 12) / (2 * n));
        a.birth = base - 12 * cell.age - 11 + offset;
        a.sex = cell.sex;
        a.origin = cell.origin;
        a.arrival_year = arrival;
        pop.agents.push_back(a);
      }
    }
  }
  return pop;
}

namespace {

// Months of the exodus window elapsed by the end of `year`.
int window_months_elapsed(MonthIndex window_start, int duration, int year) {
  const int e = month_index(year + 1, 1) - window_start;
  return std::clamp(e, 0, duration);
}

std::vector<FlowRecord> rows_for(const std::vector<FlowRecord>& flows, Corridor corridor,
                                 FlowDirection dir) {
  std::vector<FlowRecord> out;
  for (const auto& f : flows) {
    if (f.corridor == corridor && f.direction == dir) out.push_back(f);
  }
  return out;
}

// EU-inflow level rows prescribed by the scenario rule, taken from the
// baseline table by year lookup (never hard-coded levels).
std::vector<FlowRecord> eu_inflow_level_rows(const FlowTable& table, EuInflowRule rule) {
  if (rule == EuInflowRule::avg_2000_2011) {
    for (int y : {2000, 2011}) {
      if (!table.has_year(y)) {
        throw InputError("flow table lacks year " + std::to_string(y) +
                         " needed for the soft-Brexit EU inflow level");
      }
    }
    auto rows_a = rows_for(table.flows_for_year(2000), Corridor::eu_uk, FlowDirection::in);
    auto rows_b = rows_for(table.flows_for_year(2011), Corridor::eu_uk, FlowDirection::in);
    auto key = [](const FlowRecord& f) { return std::tuple(f.sex, f.age_lo, f.age_hi); };
    auto by_key = [&key](const FlowRecord& x, const FlowRecord& y) { return key(x) < key(y); };
    std::sort(rows_a.begin(), rows_a.end(), by_key);
    std::sort(rows_b.begin(), rows_b.end(), by_key);
    if (rows_a.size() != rows_b.size()) {
      throw InputError("2000 and 2011 EU inflow rows have different age-band structures");
    }
    for (std::size_t i = 0; i < rows_a.size(); ++i) {
      if (key(rows_a[i]) != key(rows_b[i])) {
        throw InputError("2000 and 2011 EU inflow rows have different age-band structures");
      }
      rows_a[i].count = 0.5 * (rows_a[i].count + rows_b[i].count);
    }
    return rows_a;
  }
  if (rule == EuInflowRule::pre_2004) {
    int best = -1;
    for (const auto& f : table.flows) {
      if (f.year < 2004 && f.year > best) best = f.year;
    }
    if (best < 0) {
      throw InputError("flow table has no pre-2004 year for the hard-Brexit EU inflow level");
    }
    return rows_for(table.flows_for_year(best), Corridor::eu_uk, FlowDirection::in);
  }
  return {};
}

void schedule_forced_moves(const std::vector<std::size_t>& order, std::size_t& cursor,
                           long target, long& done, const Population& stock,
                           std::vector<std::size_t>& out, bool& clipped) {
  while (done < target) {
    while (cursor < order.size() && !stock.agents[order[cursor]].alive()) ++cursor;
    if (cursor >= order.size()) {
      clipped = true;  // quota exceeds the surviving stock
      return;
    }
    out.push_back(order[cursor]);
    ++cursor;
    ++done;
  }
}

}  // namespace

AdjustedFlows apply_brexit_adjustments(const FlowTable& flows,
                                       const MigrationScenario& scenario, int year,
                                       const Population& stock, ScenarioState& state) {
  AdjustedFlows result;
  result.flows = flows.flows_for_year(year);
  const int brexit_year = year_of(scenario.brexit_date);
  if (scenario.kind == ScenarioKind::status_quo || year < brexit_year) {
    return result;
  }

  if (!state.initialized) {
    state.initialized = true;
    // Exodus roster: pre-Brexit EU immigrants, most recent arrivals first.
    for (std::size_t id = 0; id < stock.agents.size(); ++id) {
      const auto& a = stock.agents[id];
      if (a.alive() && a.origin == Origin::eu_immigrant && a.arrival_year != kNoArrival &&
          a.arrival_year < brexit_year) {
        state.exodus_order.push_back(id);
      }
    }
    std::stable_sort(state.exodus_order.begin(), state.exodus_order.end(),
                     [&](std::size_t x, std::size_t y) {
                       return stock.agents[x].arrival_year > stock.agents[y].arrival_year;
                     });
    state.exodus_quota =
        std::llround(scenario.exodus_fraction * static_cast<double>(state.exodus_order.size()));

    for (std::size_t id = 0; id < stock.agents.size(); ++id) {
      const auto& a = stock.agents[id];
      if (a.alive() && a.origin == Origin::uk_emigrant_abroad) {
        state.repat_order.push_back(id);
      }
    }
    state.repat_quota = std::llround(scenario.repatriation_fraction *
                                     static_cast<double>(state.repat_order.size()));
  }

  // Forced moves paced uniformly over the window months; cohorts that die
  // before departing are replaced by the next in order.
  const int elapsed =
      window_months_elapsed(scenario.brexit_date, scenario.exodus_duration_months, year);
  const long exodus_target = state.exodus_quota * elapsed / scenario.exodus_duration_months;
  schedule_forced_moves(state.exodus_order, state.exodus_cursor, exodus_target,
                        state.exodus_done, stock, result.exodus_departures, state.clipped);
  const long repat_target = state.repat_quota * elapsed / scenario.exodus_duration_months;
  schedule_forced_moves(state.repat_order, state.repat_cursor, repat_target, state.repat_done,
                        stock, result.repatriations, state.clipped);
  result.clipped = state.clipped;

  // Corridor rescaling, pro-rated over the months of the year at or after
  // the Brexit date.
  const int post_months = std::clamp(month_index(year + 1, 1) - scenario.brexit_date, 0, 12);
  const double post_frac = post_months / 12.0;
  const double pre_frac = 1.0 - post_frac;

  std::vector<FlowRecord> adjusted;
  for (const auto& f : result.flows) {
    FlowRecord g = f;
    if (f.corridor == Corridor::eu_uk && f.direction == FlowDirection::in &&
        scenario.eu_inflow_rule != EuInflowRule::unchanged) {
      g.count = f.count * pre_frac;  // replacement rows appended below
    } else if (f.corridor == Corridor::uk_eu && f.direction == FlowDirection::out) {
      g.count = f.count * (pre_frac + post_frac * (1.0 - scenario.uk_outflow_reduction));
    }
    adjusted.push_back(g);
  }
  if (scenario.eu_inflow_rule != EuInflowRule::unchanged) {
    for (FlowRecord f : eu_inflow_level_rows(flows, scenario.eu_inflow_rule)) {
      f.year = year;
      f.count *= post_frac;
      adjusted.push_back(f);
    }
  }
  result.flows = std::move(adjusted);
  return result;
}

namespace {

int age_years_at(const Individual& a, MonthIndex date, int max_age) {
  int months = a.age_months(date);
  if (months < 0) months = 0;
  return std::min(months / 12, max_age);
}

Origin inflow_origin(Corridor c) {
  switch (c) {
    case Corridor::eu_uk: return Origin::eu_immigrant;
    case Corridor::other_uk: return Origin::other_immigrant;
    case Corridor::uk_eu: return Origin::domestic;  // returning Britons
  }
  return Origin::domestic;
}

Origin outflow_origin(Corridor c) {
  switch (c) {
    case Corridor::eu_uk: return Origin::eu_immigrant;
    case Corridor::other_uk: return Origin::other_immigrant;
    case Corridor::uk_eu: return Origin::domestic;  // Britons moving abroad
  }
  return Origin::domestic;
}

}  // namespace

YearTally step_year(Population& pop, const MortalitySurface& male_q,
                    const MortalitySurface& female_q, const FlowTable& flows,
                    const MigrationScenario& scenario, ScenarioState& state, int year,
                    Rng& rng, const SimConfig& cfg) {
  if (year < male_q.first_year || year > male_q.last_year || year < female_q.first_year ||
      year > female_q.last_year) {
    throw SurfaceGap("mortality surfaces do not cover year " + std::to_string(year));
  }
  YearTally tally;
  tally.year = year;
  const MonthIndex mid_year = month_index(year, 7);

  // (1) Mortality: one uniform draw per alive agent, in id order.
  const std::size_t initial_size = pop.agents.size();
  for (std::size_t id = 0; id < initial_size; ++id) {
    auto& a = pop.agents[id];
    if (!a.alive()) continue;
    const MortalitySurface& q = a.sex == Sex::male ? male_q : female_q;
    const int age = age_years_at(a, mid_year, q.max_age);
    if (rng.uniform01() < q.at(year, age)) {
      const bool was_resident = a.resident();
      a.status = AgentStatus::dead;
      ++tally.deaths;
      if (was_resident) ++tally.resident_deaths;
    }
  }

  // (2) Births: Poisson per alive resident woman at her age-specific rate;
  // newborns are domestic and join after this step.
  for (std::size_t id = 0; id < initial_size; ++id) {
    const auto& a = pop.agents[id];
    if (!a.resident() || a.sex != Sex::female) continue;
    const int age = age_years_at(a, mid_year, male_q.max_age);
    const double rate = flows.fertility_at(age);
    if (rate <= 0.0) continue;
    const int n = rng.poisson(rate);
    for (int b = 0; b < n; ++b) {
      Individual child;
      child.sex = rng.uniform01() < cfg.male_birth_share ? Sex::male : Sex::female;
      child.birth = month_index(year, 1) + static_cast<int>(rng.uniform_int(12));
      child.origin = Origin::domestic;
      pop.agents.push_back(child);
      ++tally.births;
    }
  }

  // (3) Migration: forced scenario moves first, then regular flows in a
  // fixed deterministic order.
  AdjustedFlows adjusted = apply_brexit_adjustments(flows, scenario, year, pop, state);
  tally.clipped = adjusted.clipped;
  for (std::size_t id : adjusted.exodus_departures) {
    auto& a = pop.agents[id];
    if (!a.alive()) continue;
    a.status = AgentStatus::departed;
    ++tally.exodus_departures;
    ++tally.outflows;
  }
  for (std::size_t id : adjusted.repatriations) {
    auto& a = pop.agents[id];
    if (!a.alive()) continue;
    a.origin = Origin::domestic;
    a.arrival_year = kNoArrival;
    ++tally.uk_repatriated;
  }

  std::sort(adjusted.flows.begin(), adjusted.flows.end(),
            [](const FlowRecord& x, const FlowRecord& y) {
              return std::tuple(x.corridor, x.direction, x.sex, x.age_lo, x.age_hi) <
                     std::tuple(y.corridor, y.direction, y.sex, y.age_lo, y.age_hi);
            });
  std::vector<std::size_t> eligible;
  for (const auto& f : adjusted.flows) {
    const long n = rng.stochastic_round(f.count / cfg.scale);
    if (n <= 0) continue;
    if (f.direction == FlowDirection::in) {
      const bool returning = f.corridor == Corridor::uk_eu;
      for (long i = 0; i < n; ++i) {
        const int age = f.age_lo + static_cast<int>(rng.uniform_int(f.age_hi - f.age_lo + 1));
        const int month_in_age = static_cast<int>(rng.uniform_int(12));
        Individual a;
        a.birth = mid_year - (12 * age + month_in_age);
        a.sex = f.sex;
        a.origin = inflow_origin(f.corridor);
        if (!returning) a.arrival_year = year;
        pop.agents.push_back(a);
        ++tally.inflows;
      }
    } else {
      const Origin origin = outflow_origin(f.corridor);
      eligible.clear();
      for (std::size_t id = 0; id < pop.agents.size(); ++id) {
        const auto& a = pop.agents[id];
        if (!a.resident() || a.origin != origin || a.sex != f.sex) continue;
        const int age = age_years_at(a, mid_year, male_q.max_age);
        if (age >= f.age_lo && age <= f.age_hi) eligible.push_back(id);
      }
      const long take = std::min<long>(n, static_cast<long>(eligible.size()));
      // Partial Fisher-Yates over the id-ordered eligible list.
      for (long i = 0; i < take; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.uniform_int(eligible.size() - i));
        std::swap(eligible[i], eligible[j]);
        auto& a = pop.agents[eligible[i]];
        if (f.corridor == Corridor::uk_eu) {
          a.origin = Origin::uk_emigrant_abroad;
          ++tally.uk_emigrated;
        } else {
          a.status = AgentStatus::departed;
          ++tally.outflows;
        }
      }
    }
  }
  return tally;
}

DependencyRatio dependency_ratio(const Population& pop, SpaScheme scheme, MonthIndex date) {
  const SpaSchedule& schedule = SpaSchedule::get(scheme);
  DependencyRatio r;
  for (const auto& a : pop.agents) {
    if (!a.resident()) continue;
    const int age = a.age_months(date);
    if (age < 15 * 12) continue;
    if (age >= schedule.spa_months(a.sex, a.birth)) {
      ++r.numerator;
    } else {
      ++r.denominator;
    }
  }
  if (r.denominator == 0) {
    r.ratio = std::numeric_limits<double>::quiet_NaN();
    r.defined = false;
  } else {
    r.ratio = static_cast<double>(r.numerator) / static_cast<double>(r.denominator);
    r.defined = true;
  }
  return r;
}

RatioSeries run_scenario(const SimConfig& cfg, const SimInputs& inputs, int threads) {
  cfg.validate();
  if (!inputs.male || !inputs.female || !inputs.base_population || !inputs.flows) {
    throw InvalidSpec("run_scenario: missing inputs");
  }
  if (inputs.base_population->base_year != cfg.start_year) {
    throw InputError("population base year " + std::to_string(inputs.base_population->base_year) +
                     " does not match simulation start " + std::to_string(cfg.start_year));
  }
  for (const MortalitySurface* s : {inputs.male, inputs.female}) {
    if (s->first_year > cfg.start_year || s->last_year < cfg.end_year - 1) {
      throw SurfaceGap("mortality surface covers " + std::to_string(s->first_year) + ".." +
                       std::to_string(s->last_year) + ", simulation needs " +
                       std::to_string(cfg.start_year) + ".." + std::to_string(cfg.end_year - 1));
    }
  }

  const int n_years = cfg.end_year - cfg.start_year + 1;
  const MigrationScenario scenario = MigrationScenario::standard(cfg.scenario);

  RatioSeries series;
  series.scheme = cfg.scheme;
  series.scenario = cfg.scenario;
  series.start_year = cfg.start_year;
  series.replicate_ratios.assign(cfg.replicates, {});
  series.tallies.assign(cfg.replicates, {});

  parallel_for(cfg.replicates, threads, [&](int rep) {
    Rng rng = Rng::split(cfg.seed, static_cast<std::uint64_t>(rep));
    Population pop = init_population(*inputs.base_population, cfg.scale, cfg.seed);
    ScenarioState state;
    auto& ratios = series.replicate_ratios[rep];
    auto& tallies = series.tallies[rep];
    ratios.reserve(n_years);
    for (int year = cfg.start_year; year <= cfg.end_year; ++year) {
      const auto r =
          dependency_ratio(pop, cfg.scheme, month_index(year, cfg.ratio_eval_month));
      ratios.push_back(r.ratio);
      if (year < cfg.end_year) {
        tallies.push_back(step_year(pop, *inputs.male, *inputs.female, *inputs.flows,
                                    scenario, state, year, rng, cfg));
      }
    }
  });

  series.mean.assign(n_years, 0.0);
  series.p2_5.assign(n_years, 0.0);
  series.p97_5.assign(n_years, 0.0);
  std::vector<double> cell(cfg.replicates);
  for (int t = 0; t < n_years; ++t) {
    bool undefined = false;
    double sum = 0.0;
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      cell[rep] = series.replicate_ratios[rep][t];
      if (std::isnan(cell[rep])) undefined = true;
      sum += cell[rep];
    }
    if (undefined) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      series.mean[t] = series.p2_5[t] = series.p97_5[t] = nan;
      continue;
    }
    series.mean[t] = sum / cfg.replicates;
    std::vector<double> sorted = cell;
    series.p2_5[t] = nearest_rank(sorted, 2.5);
    sorted = cell;
    series.p97_5[t] = nearest_rank(sorted, 97.5);
  }
  for (const auto& reps : series.tallies) {
    for (const auto& t : reps) series.any_clipped |= t.clipped;
  }
  return series;
}

void write_ratio_long_csv(const std::vector<RatioSeries>& series, const std::string& path) {
  std::ostringstream out;
  out << "year,scheme,scenario,replicate,ratio\n";
  for (const auto& s : series) {
    for (std::size_t rep = 0; rep < s.replicate_ratios.size(); ++rep) {
      for (std::size_t t = 0; t < s.replicate_ratios[rep].size(); ++t) {
        out << (s.start_year + static_cast<int>(t)) << ',' << scheme_token(s.scheme) << ','
            << scenario_token(s.scenario) << ',' << rep << ','
            << format_value(s.replicate_ratios[rep][t]) << '\n';
      }
    }
  }
  write_text_file(path, out.str());
}

void write_ratio_summary_csv(const RatioSeries& s, const std::string& path) {
  std::ostringstream out;
  out << "year,scheme,scenario,mean,p2_5,p97_5\n";
  for (std::size_t t = 0; t < s.mean.size(); ++t) {
    out << (s.start_year + static_cast<int>(t)) << ',' << scheme_token(s.scheme) << ','
        << scenario_token(s.scenario) << ',' << format_value(s.mean[t]) << ','
        << format_value(s.p2_5[t]) << ',' << format_value(s.p97_5[t]) << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace pensim
