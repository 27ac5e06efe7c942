#ifndef PENSIM_MICROSIM_HPP
#define PENSIM_MICROSIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pensim/mortality.hpp"
#include "pensim/rng.hpp"
#include "pensim/spa.hpp"
#include "pensim/tables.hpp"

namespace pensim {

enum class AgentStatus : std::uint8_t {
  alive,     // tracked, resident or abroad
  dead,
  departed,  // left the simulation (emigrated out of scope)
};

// One simulated person. Agents are identified by their index in the
// population vector; indices are stable and never reused.
struct Individual {
  MonthIndex birth = 0;
  Sex sex = Sex::male;
  Origin origin = Origin::domestic;
  int arrival_year = kNoArrival;  // immigrants: year of arrival in the UK
  AgentStatus status = AgentStatus::alive;

  bool alive() const { return status == AgentStatus::alive; }
  bool resident() const { return alive() && origin != Origin::uk_emigrant_abroad; }
  int age_months(MonthIndex date) const { return date - birth; }
};

struct Population {
  std::vector<Individual> agents;

  long alive_count() const;
  long resident_count() const;
};

enum class ScenarioKind { status_quo, soft_brexit, hard_brexit };

std::string scenario_token(ScenarioKind k);
ScenarioKind parse_scenario(const std::string& token);
std::vector<ScenarioKind> all_scenarios();

enum class EuInflowRule { unchanged, avg_2000_2011, pre_2004 };

// Post-Brexit migration scenario parameters (soft/hard presets per
// `standard`; every field is overridable through the config file).
struct MigrationScenario {
  ScenarioKind kind = ScenarioKind::status_quo;
  MonthIndex brexit_date = month_index(2019, 3);
  double exodus_fraction = 0.0;        // share of pre-Brexit EU immigrants leaving
  int exodus_duration_months = 24;
  double repatriation_fraction = 0.0;  // share of UK emigrants abroad returning
  EuInflowRule eu_inflow_rule = EuInflowRule::unchanged;
  double uk_outflow_reduction = 0.0;   // UK->EU outflow scaled by (1 - this)

  static MigrationScenario standard(ScenarioKind kind);
};

// Mutable bookkeeping for one replicate's scenario: the exodus and
// repatriation rosters are fixed when the Brexit date is first reached and
// then consumed across the departure window.
struct ScenarioState {
  bool initialized = false;
  std::vector<std::size_t> exodus_order;  // last arrived first, ties by id
  long exodus_quota = 0;
  long exodus_done = 0;
  std::size_t exodus_cursor = 0;
  std::vector<std::size_t> repat_order;   // by id
  long repat_quota = 0;
  long repat_done = 0;
  std::size_t repat_cursor = 0;
  bool clipped = false;  // quota exceeded the available stock at some point
};

// Flows for one simulated year after scenario adjustment, plus the forced
// moves scheduled for that year.
struct AdjustedFlows {
  std::vector<FlowRecord> flows;
  std::vector<std::size_t> exodus_departures;  // agent ids leaving this year
  std::vector<std::size_t> repatriations;      // agent ids returning this year
  bool clipped = false;
};

// Applies the scenario's rules for `year`: status quo is the identity; the
// Brexit scenarios rescale corridor levels (pro-rated in the Brexit year),
// schedule exodus departures (latest pre-Brexit arrivals first, paced
// uniformly over the window months) and repatriations. The quota is clipped
// with a warning when it exceeds the stock.
AdjustedFlows apply_brexit_adjustments(const FlowTable& flows, const MigrationScenario& scenario,
                                       int year, const Population& stock,
                                       ScenarioState& state);

struct SimConfig {
  std::uint64_t seed = 0;
  int start_year = 2019;
  int end_year = 2049;
  int replicates = 1;
  double scale = 1.0;  // persons per simulated agent
  SpaScheme scheme = SpaScheme::accelerated_spa_68;
  ScenarioKind scenario = ScenarioKind::status_quo;
  int ratio_eval_month = 7;  // dependency ratio evaluated July 1 by default
  double male_birth_share = 105.0 / 205.0;

  void validate() const;
};

struct YearTally {
  int year = 0;
  long deaths = 0;           // all alive agents, resident or abroad
  long resident_deaths = 0;
  long births = 0;
  long inflows = 0;          // agents created (immigration)
  long outflows = 0;         // agents removed (emigration incl. exodus)
  long exodus_departures = 0;
  long uk_emigrated = 0;     // residency flips out (still tracked)
  long uk_repatriated = 0;   // residency flips back
  bool clipped = false;
};

// round(count/scale) agents per table cell, birth months spread uniformly
// across the cell's one-year window. Placement is fully deterministic; the
// seed is part of the interface and recorded in outputs.
Population init_population(const PopulationTable& table, double scale, std::uint64_t seed);

// One simulated year: (1) mortality draw per alive agent, (2) births from
// alive resident women, (3) migration (forced moves then regular flows).
// Ageing is implicit in birth dates. The RNG draw order is fixed by this
// implementation and documented in the manual; a replay with the same
// stream reproduces the year exactly.
YearTally step_year(Population& pop, const MortalitySurface& male_q,
                    const MortalitySurface& female_q, const FlowTable& flows,
                    const MigrationScenario& scenario, ScenarioState& state, int year,
                    Rng& rng, const SimConfig& cfg);

struct DependencyRatio {
  double ratio = 0.0;
  long numerator = 0;    // alive residents at or above pension age
  long denominator = 0;  // alive residents aged 15 up to (excluding) it
  bool defined = false;
};

// Ages are compared in months against `date`; an agent exactly at pension
// age counts in the numerator. Non-residents and under-15s are excluded.
// An empty denominator yields an undefined point, not an error.
DependencyRatio dependency_ratio(const Population& pop, SpaScheme scheme, MonthIndex date);

struct SimInputs {
  const MortalitySurface* male = nullptr;    // combined historical+forecast
  const MortalitySurface* female = nullptr;
  const PopulationTable* base_population = nullptr;
  const FlowTable* flows = nullptr;
};

struct RatioSeries {
  SpaScheme scheme;
  ScenarioKind scenario;
  int start_year = 0;
  std::vector<std::vector<double>> replicate_ratios;  // [replicate][year-start]
  std::vector<double> mean;
  std::vector<double> p2_5;
  std::vector<double> p97_5;
  std::vector<std::vector<YearTally>> tallies;  // [replicate][step]
  bool any_clipped = false;
};

// R independent replicates with streams split as (seed, replicate). The
// ratio for year y reflects the population entering y, aged to the
// evaluation date. Undefined points propagate as NaN.
RatioSeries run_scenario(const SimConfig& cfg, const SimInputs& inputs, int threads = 1);

void write_ratio_long_csv(const std::vector<RatioSeries>& series, const std::string& path);
void write_ratio_summary_csv(const RatioSeries& series, const std::string& path);

}  // namespace pensim

#endif  // PENSIM_MICROSIM_HPP
