#include "pensim/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace pensim {

double nearest_rank(std::vector<double>& values, double percent) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(percent / 100.0 * n));
  if (k < 1) k = 1;
  if (k > n) k = n;
  return values[k - 1];
}

ForecastEnsemble make_ensemble(std::vector<MortalitySurface> runs) {
  if (runs.empty()) throw EmptyEnsemble("ensemble has no runs");
  const MortalitySurface& ref = runs.front();
  for (const auto& r : runs) {
    if (r.sex != ref.sex || r.first_year != ref.first_year || r.last_year != ref.last_year ||
        r.max_age != ref.max_age) {
      throw ShapeMismatch("ensemble runs have mismatched grids");
    }
  }

  ForecastEnsemble e;
  e.median = ref;
  e.p2_5 = ref;
  e.p97_5 = ref;

  std::vector<double> cell(runs.size());
  for (std::size_t i = 0; i < ref.q.size(); ++i) {
    for (std::size_t r = 0; r < runs.size(); ++r) cell[r] = runs[r].q[i];
    e.p2_5.q[i] = nearest_rank(cell, 2.5);
    e.median.q[i] = nearest_rank(cell, 50.0);
    e.p97_5.q[i] = nearest_rank(cell, 97.5);
  }
  e.runs = std::move(runs);
  return e;
}

}  // namespace pensim
