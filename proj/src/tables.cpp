#include "pensim/tables.hpp"

#include <algorithm>
#include <climits>

#include "pensim/errors.hpp"

namespace pensim {

std::string origin_token(Origin o) {
  switch (o) {
    case Origin::domestic: return "domestic";
    case Origin::eu_immigrant: return "eu_immigrant";
    case Origin::other_immigrant: return "other";
    case Origin::uk_emigrant_abroad: return "uk_abroad";
  }
  return "?";
}

Origin parse_origin(const std::string& token) {
  if (token == "domestic") return Origin::domestic;
  if (token == "eu_immigrant" || token == "eu") return Origin::eu_immigrant;
  if (token == "other" || token == "other_immigrant") return Origin::other_immigrant;
  if (token == "uk_abroad" || token == "uk_emigrant_abroad") return Origin::uk_emigrant_abroad;
  throw ParseError("unknown origin token '" + token + "'");
}

double PopulationCell::total() const {
  double t = 0.0;
  for (const auto& [year, count] : counts_by_arrival) t += count;
  return t;
}

double PopulationTable::total() const {
  double t = 0.0;
  for (const auto& c : cells) t += c.total();
  return t;
}

std::string corridor_token(Corridor c) {
  switch (c) {
    case Corridor::eu_uk: return "eu_uk";
    case Corridor::other_uk: return "other_uk";
    case Corridor::uk_eu: return "uk_eu";
  }
  return "?";
}

Corridor parse_corridor(const std::string& token) {
  if (token == "eu_uk") return Corridor::eu_uk;
  if (token == "other_uk") return Corridor::other_uk;
  if (token == "uk_eu") return Corridor::uk_eu;
  throw ParseError("unknown corridor token '" + token + "'");
}

std::vector<FlowRecord> FlowTable::flows_for_year(int year) const {
  // Years past the table's end reuse the last available year: the baseline
  // extrapolates current migration trends.
  int best = INT_MIN;
  for (const auto& f : flows) {
    if (f.year <= year && f.year > best) best = f.year;
  }
  std::vector<FlowRecord> out;
  if (best == INT_MIN) return out;
  for (const auto& f : flows) {
    if (f.year == best) {
      FlowRecord r = f;
      r.year = year;
      out.push_back(r);
    }
  }
  return out;
}

bool FlowTable::has_year(int year) const {
  return std::any_of(flows.begin(), flows.end(),
                     [year](const FlowRecord& f) { return f.year == year; });
}

}  // namespace pensim
