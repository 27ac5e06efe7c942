#include "pensim/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "pensim/csv.hpp"

namespace pensim {

namespace {

struct RawCell {
  int year;
  int age;
  double q;
};

MortalitySurface build_surface(Sex sex, std::vector<RawCell>& cells, const std::string& path) {
  int y_lo = std::numeric_limits<int>::max(), y_hi = std::numeric_limits<int>::min();
  int a_hi = std::numeric_limits<int>::min();
  for (const auto& c : cells) {
    y_lo = std::min(y_lo, c.year);
    y_hi = std::max(y_hi, c.year);
    a_hi = std::max(a_hi, c.age);
  }

  MortalitySurface s;
  s.sex = sex;
  s.first_year = y_lo;
  s.last_year = y_hi;
  s.max_age = a_hi;
  s.q.assign(static_cast<std::size_t>(s.n_years()) * s.n_ages(),
             std::numeric_limits<double>::quiet_NaN());

  for (const auto& c : cells) {
    double& slot = s.q[s.idx(c.year, c.age)];
    if (!std::isnan(slot)) {
      throw DuplicateCell(path + ": duplicate cell (year " + std::to_string(c.year) +
                          ", age " + std::to_string(c.age) + ", sex " +
                          std::string(1, sex_letter(sex)) + ")");
    }
    slot = c.q;
  }
  for (int y = s.first_year; y <= s.last_year; ++y) {
    for (int a = 0; a <= s.max_age; ++a) {
      if (std::isnan(s.q[s.idx(y, a)])) {
        throw MissingCell(path + ": missing cell (year " + std::to_string(y) + ", age " +
                          std::to_string(a) + ", sex " + std::string(1, sex_letter(sex)) +
                          ")");
      }
    }
  }
  s.validate();
  return s;
}

}  // namespace

std::vector<MortalitySurface> load_mortality_surfaces(const std::string& path,
                                                      double floor_eps) {
  const auto rows = CsvReader::read(path, {"year", "age", "sex", "qx"});
  std::map<Sex, std::vector<RawCell>> by_sex;
  for (const auto& row : rows) {
    RawCell c;
    c.year = static_cast<int>(parse_long(row.fields[0], path, row.line));
    c.age = static_cast<int>(parse_long(row.fields[1], path, row.line));
    const Sex sex = parse_sex(row.fields[2]);
    c.q = parse_double(row.fields[3], path, row.line);
    if (c.age < 0) throw ParseError(path + ": negative age at line " + std::to_string(row.line));
    if (floor_eps > 0.0) c.q = std::max(c.q, floor_eps);
    if (!(c.q > 0.0) || c.q > 1.0 || !std::isfinite(c.q)) {
      throw RangeError(path + ": line " + std::to_string(row.line) + ": qx " +
                       std::to_string(c.q) + " outside (0,1]");
    }
    by_sex[sex].push_back(c);
  }
  if (by_sex.empty()) throw ParseError(path + ": no data rows");

  std::vector<MortalitySurface> out;
  for (Sex sex : {Sex::male, Sex::female}) {
    auto it = by_sex.find(sex);
    if (it != by_sex.end()) out.push_back(build_surface(sex, it->second, path));
  }
  return out;
}

MortalitySurface load_mortality_csv(const std::string& path, double floor_eps) {
  auto surfaces = load_mortality_surfaces(path, floor_eps);
  if (surfaces.size() != 1) {
    throw ParseError(path + ": expected a single-sex table, found both sexes");
  }
  return std::move(surfaces.front());
}

void write_forecast(const ForecastEnsemble& e, const std::string& path) {
  write_forecast(std::vector<ForecastEnsemble>{e}, path);
}

void write_forecast(const std::vector<ForecastEnsemble>& ensembles, const std::string& path) {
  if (ensembles.empty()) throw EmptyEnsemble("nothing to write");
  for (const auto& e : ensembles) {
    if (e.runs.empty()) throw EmptyEnsemble("ensemble has no runs");
  }

  // One row per (year, age, sex), males before females inside a cell.
  std::vector<const ForecastEnsemble*> order;
  for (Sex sex : {Sex::male, Sex::female}) {
    for (const auto& e : ensembles) {
      if (e.median.sex == sex) order.push_back(&e);
    }
  }

  std::ostringstream out;
  out << "year,age,sex,median,p2_5,p97_5\n";
  const ForecastEnsemble& ref = *order.front();
  for (int y = ref.median.first_year; y <= ref.median.last_year; ++y) {
    for (int a = 0; a <= ref.median.max_age; ++a) {
      for (const ForecastEnsemble* e : order) {
        if (!e->median.covers(y, a)) {
          throw ShapeMismatch("forecast grids for the two sexes differ");
        }
        out << y << ',' << a << ',' << sex_letter(e->median.sex) << ','
            << format_value(e->median.q[e->median.idx(y, a)]) << ','
            << format_value(e->p2_5.q[e->p2_5.idx(y, a)]) << ','
            << format_value(e->p97_5.q[e->p97_5.idx(y, a)]) << '\n';
      }
    }
  }
  write_text_file(path, out.str());
}

std::vector<ForecastBands> load_forecast_csv(const std::string& path) {
  const auto rows = CsvReader::read(path, {"year", "age", "sex", "median", "p2_5", "p97_5"});
  struct Raw {
    int year, age;
    double med, lo, hi;
  };
  std::map<Sex, std::vector<Raw>> by_sex;
  for (const auto& row : rows) {
    Raw r;
    r.year = static_cast<int>(parse_long(row.fields[0], path, row.line));
    r.age = static_cast<int>(parse_long(row.fields[1], path, row.line));
    const Sex sex = parse_sex(row.fields[2]);
    r.med = parse_double(row.fields[3], path, row.line);
    r.lo = parse_double(row.fields[4], path, row.line);
    r.hi = parse_double(row.fields[5], path, row.line);
    by_sex[sex].push_back(r);
  }
  if (by_sex.empty()) throw ParseError(path + ": no data rows");

  std::vector<ForecastBands> out;
  for (Sex sex : {Sex::male, Sex::female}) {
    auto it = by_sex.find(sex);
    if (it == by_sex.end()) continue;
    std::vector<RawCell> med, lo, hi;
    for (const auto& r : it->second) {
      med.push_back({r.year, r.age, r.med});
      lo.push_back({r.year, r.age, r.lo});
      hi.push_back({r.year, r.age, r.hi});
    }
    ForecastBands b{build_surface(sex, med, path), build_surface(sex, lo, path),
                    build_surface(sex, hi, path)};
    out.push_back(std::move(b));
  }
  return out;
}

void write_mortality_csv(const std::vector<MortalitySurface>& surfaces,
                         const std::string& path) {
  std::ostringstream out;
  out << "year,age,sex,qx\n";
  for (const auto& s : surfaces) {
    for (int y = s.first_year; y <= s.last_year; ++y) {
      for (int a = 0; a <= s.max_age; ++a) {
        out << y << ',' << a << ',' << sex_letter(s.sex) << ','
            << format_value(s.q[s.idx(y, a)]) << '\n';
      }
    }
  }
  write_text_file(path, out.str());
}

PopulationTable load_population_csv(const std::string& path, int base_year, int max_age) {
  const auto rows = CsvReader::read(path, {"age", "sex", "origin", "arrival_year", "count"});
  PopulationTable table;
  table.base_year = base_year;
  table.max_age = max_age;

  std::map<std::tuple<int, Sex, Origin>, PopulationCell> cells;
  std::set<std::tuple<int, Sex, Origin, int>> seen;
  for (const auto& row : rows) {
    const int age = static_cast<int>(parse_long(row.fields[0], path, row.line));
    const Sex sex = parse_sex(row.fields[1]);
    const Origin origin = parse_origin(row.fields[2]);
    const std::string& arrival_tok = row.fields[3];
    const double count = parse_double(row.fields[4], path, row.line);

    if (age < 0 || age > max_age) {
      throw RangeError(path + ": line " + std::to_string(row.line) + ": age " +
                       std::to_string(age) + " outside 0.." + std::to_string(max_age));
    }
    if (count < 0.0 || !std::isfinite(count)) {
      throw RangeError(path + ": line " + std::to_string(row.line) + ": negative count");
    }

    int arrival = kNoArrival;
    const bool immigrant = origin == Origin::eu_immigrant || origin == Origin::other_immigrant;
    if (!arrival_tok.empty()) {
      arrival = static_cast<int>(parse_long(arrival_tok, path, row.line));
      if (origin == Origin::domestic) {
        throw ParseError(path + ": line " + std::to_string(row.line) +
                         ": domestic rows must leave arrival_year empty");
      }
    } else if (immigrant) {
      throw ParseError(path + ": line " + std::to_string(row.line) +
                       ": immigrant rows require arrival_year");
    }

    if (!seen.insert({age, sex, origin, arrival}).second) {
      throw DuplicateCell(path + ": line " + std::to_string(row.line) +
                          ": duplicate population row");
    }
    auto& cell = cells[{age, sex, origin}];
    cell.age = age;
    cell.sex = sex;
    cell.origin = origin;
    cell.counts_by_arrival[arrival] += count;
  }
  if (cells.empty()) throw EmptyTable(path + ": no population rows");

  for (auto& [key, cell] : cells) table.cells.push_back(std::move(cell));
  return table;
}

std::vector<FlowRecord> load_flow_csv(const std::string& path, int max_age) {
  const auto rows = CsvReader::read(
      path, {"year", "corridor", "sex", "age_lo", "age_hi", "direction", "count"});
  std::vector<FlowRecord> flows;
  for (const auto& row : rows) {
    FlowRecord f;
    f.year = static_cast<int>(parse_long(row.fields[0], path, row.line));
    f.corridor = parse_corridor(row.fields[1]);
    f.sex = parse_sex(row.fields[2]);
    f.age_lo = static_cast<int>(parse_long(row.fields[3], path, row.line));
    f.age_hi = static_cast<int>(parse_long(row.fields[4], path, row.line));
    if (row.fields[5] == "in") {
      f.direction = FlowDirection::in;
    } else if (row.fields[5] == "out") {
      f.direction = FlowDirection::out;
    } else {
      throw ParseError(path + ": line " + std::to_string(row.line) + ": direction must be in/out");
    }
    f.count = parse_double(row.fields[6], path, row.line);
    if (f.count < 0.0 || !std::isfinite(f.count)) {
      throw RangeError(path + ": line " + std::to_string(row.line) + ": negative count");
    }
    if (f.age_lo < 0 || f.age_hi > max_age || f.age_lo > f.age_hi) {
      throw RangeError(path + ": line " + std::to_string(row.line) + ": bad age band");
    }
    flows.push_back(f);
  }

  // Age bands must partition 0..max_age within each (year,corridor,sex,direction).
  std::map<std::tuple<int, Corridor, Sex, FlowDirection>, std::vector<std::pair<int, int>>>
      groups;
  for (const auto& f : flows) {
    groups[{f.year, f.corridor, f.sex, f.direction}].push_back({f.age_lo, f.age_hi});
  }
  for (auto& [key, bands] : groups) {
    std::sort(bands.begin(), bands.end());
    int expect = 0;
    for (const auto& [lo, hi] : bands) {
      if (lo != expect) {
        throw RangeError(path + ": age bands for year " + std::to_string(std::get<0>(key)) +
                         " do not partition 0.." + std::to_string(max_age) + " (gap/overlap at " +
                         std::to_string(expect) + ")");
      }
      expect = hi + 1;
    }
    if (expect != max_age + 1) {
      throw RangeError(path + ": age bands for year " + std::to_string(std::get<0>(key)) +
                       " stop at " + std::to_string(expect - 1) + ", expected " +
                       std::to_string(max_age));
    }
  }
  return flows;
}

std::vector<double> load_fertility_csv(const std::string& path, int max_age) {
  const auto rows = CsvReader::read(path, {"age", "rate"});
  std::vector<double> rates(static_cast<std::size_t>(max_age) + 1, 0.0);
  std::set<int> seen;
  for (const auto& row : rows) {
    const int age = static_cast<int>(parse_long(row.fields[0], path, row.line));
    const double rate = parse_double(row.fields[1], path, row.line);
    if (age < 0 || age > max_age) {
      throw RangeError(path + ": line " + std::to_string(row.line) + ": age out of range");
    }
    if (rate < 0.0 || !std::isfinite(rate)) {
      throw RangeError(path + ": line " + std::to_string(row.line) + ": negative rate");
    }
    if (!seen.insert(age).second) {
      throw DuplicateCell(path + ": line " + std::to_string(row.line) + ": duplicate age");
    }
    rates[age] = rate;
  }
  return rates;
}

}  // namespace pensim
