#ifndef PENSIM_TABLES_HPP
#define PENSIM_TABLES_HPP

#include <map>
#include <string>
#include <vector>

#include "pensim/common.hpp"

namespace pensim {

enum class Origin { domestic, eu_immigrant, other_immigrant, uk_emigrant_abroad };

std::string origin_token(Origin o);
Origin parse_origin(const std::string& token);

// Base-year population stock. Immigrant cells carry an arrival-year
// histogram; the cell count is the histogram total by construction.
struct PopulationCell {
  int age = 0;
  Sex sex = Sex::male;
  Origin origin = Origin::domestic;
  // (arrival year -> persons); domestic cells hold a single entry keyed by
  // kNoArrival.
  std::map<int, double> counts_by_arrival;

  double total() const;
};

inline constexpr int kNoArrival = -1;

struct PopulationTable {
  int base_year = 0;
  int max_age = 100;
  std::vector<PopulationCell> cells;

  double total() const;
};

// Annual migration flows by corridor, direction, sex and age band.
enum class Corridor { eu_uk, other_uk, uk_eu };
enum class FlowDirection { in, out };

std::string corridor_token(Corridor c);
Corridor parse_corridor(const std::string& token);

struct FlowRecord {
  int year = 0;
  Corridor corridor = Corridor::eu_uk;
  Sex sex = Sex::male;
  int age_lo = 0;
  int age_hi = 0;  // inclusive
  FlowDirection direction = FlowDirection::in;
  double count = 0.0;
};

// Migration flows plus age-specific fertility, the baseline demography the
// scenario rules rescale.
struct FlowTable {
  std::vector<FlowRecord> flows;
  std::vector<double> fertility;  // indexed by age, births per woman per year

  std::vector<FlowRecord> flows_for_year(int year) const;
  bool has_year(int year) const;
  double fertility_at(int age) const {
    return age >= 0 && age < static_cast<int>(fertility.size()) ? fertility[age] : 0.0;
  }
};

}  // namespace pensim

#endif  // PENSIM_TABLES_HPP
