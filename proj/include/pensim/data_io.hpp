#ifndef PENSIM_DATA_IO_HPP
#define PENSIM_DATA_IO_HPP

#include <string>
#include <vector>

#include "pensim/ensemble.hpp"
#include "pensim/mortality.hpp"
#include "pensim/tables.hpp"

namespace pensim {

// Mortality CSV schema: header `year,age,sex,qx`, sex in {M,F}. The grid per
// sex must be complete and rectangular; q = 0 cells are rejected (the log
// transform is undefined there) unless a positive `floor_eps` is given, in
// which case q is replaced by max(q, floor_eps) before validation.
MortalitySurface load_mortality_csv(const std::string& path, double floor_eps = 0.0);

// As above, but accepts files carrying one or both sexes; returns one
// surface per sex present, males first.
std::vector<MortalitySurface> load_mortality_surfaces(const std::string& path,
                                                      double floor_eps = 0.0);

// Forecast CSV schema: `year,age,sex,median,p2_5,p97_5`, 12 significant
// digits, rows sorted by (year, age, sex M<F). Writing then re-loading then
// re-writing is byte-stable.
void write_forecast(const ForecastEnsemble& e, const std::string& path);
void write_forecast(const std::vector<ForecastEnsemble>& ensembles, const std::string& path);

struct ForecastBands {
  MortalitySurface median;
  MortalitySurface p2_5;
  MortalitySurface p97_5;
};

std::vector<ForecastBands> load_forecast_csv(const std::string& path);

// Population CSV schema: `age,sex,origin,arrival_year,count`; arrival_year
// empty for domestic rows (and optionally for uk_emigrant_abroad rows),
// required for immigrant rows. The base year is not part of the file.
PopulationTable load_population_csv(const std::string& path, int base_year,
                                    int max_age = 100);

// Flow CSV schema: `year,corridor,sex,age_lo,age_hi,direction,count` with
// corridor in {eu_uk,other_uk,uk_eu} and direction in {in,out}. Within each
// (year,corridor,sex,direction) group the age bands must partition 0..max_age.
std::vector<FlowRecord> load_flow_csv(const std::string& path, int max_age = 100);

// Fertility CSV schema: `age,rate`; ages not listed carry rate 0.
std::vector<double> load_fertility_csv(const std::string& path, int max_age = 100);

void write_mortality_csv(const std::vector<MortalitySurface>& surfaces,
                         const std::string& path);

}  // namespace pensim

#endif  // PENSIM_DATA_IO_HPP
