#ifndef PENSIM_ENSEMBLE_HPP
#define PENSIM_ENSEMBLE_HPP

#include <vector>

#include "pensim/mortality.hpp"

namespace pensim {

// Forecast grids from independently seeded training runs, plus cellwise
// nearest-rank statistics: median (p50), p2.5 and p97.5. With 100 runs the
// band bounds are the 3rd and 98th order statistics.
struct ForecastEnsemble {
  std::vector<MortalitySurface> runs;
  MortalitySurface median;
  MortalitySurface p2_5;
  MortalitySurface p97_5;
};

// Nearest-rank percentile: k-th order statistic with k = ceil(p/100 * n).
double nearest_rank(std::vector<double>& values, double percent);

// Computes the band grids from per-run forecasts. Throws EmptyEnsemble when
// `runs` is empty, ShapeMismatch when run grids disagree.
ForecastEnsemble make_ensemble(std::vector<MortalitySurface> runs);

}  // namespace pensim

#endif  // PENSIM_ENSEMBLE_HPP
