#ifndef PENSIM_MORTALITY_HPP
#define PENSIM_MORTALITY_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "pensim/common.hpp"
#include "pensim/errors.hpp"

namespace pensim {

// Dense year x age grid of annual death probabilities q for one sex.
// Every cell satisfies 0 < q <= 1; the grid is complete (no gaps). Instances
// are immutable after construction and safe to share across threads.
//
// The same type carries historical tables, forecast grids, and spliced
// historical+forecast surfaces: they differ only in year range.
struct MortalitySurface {
  Sex sex = Sex::male;
  int first_year = 0;
  int last_year = 0;
  int max_age = 0;
  std::vector<double> q;  // row-major [year][age]

  int n_years() const { return last_year - first_year + 1; }
  int n_ages() const { return max_age + 1; }

  std::size_t idx(int year, int age) const {
    return static_cast<std::size_t>(year - first_year) * n_ages() + age;
  }

  bool covers(int year, int age) const {
    return year >= first_year && year <= last_year && age >= 0 && age <= max_age;
  }

  double at(int year, int age) const {
    if (!covers(year, age)) {
      throw SurfaceGap("surface does not cover year " + std::to_string(year) + ", age " +
                       std::to_string(age));
    }
    return q[idx(year, age)];
  }

  // Validates shape and cell ranges; throws RangeError / ShapeMismatch.
  void validate() const;
};

// Natural log of the mortality surface, the model's working representation.
struct LogRateSurface {
  Sex sex = Sex::male;
  int first_year = 0;
  int last_year = 0;
  int max_age = 0;
  std::vector<double> x;  // row-major [year][age], all <= 0

  int n_years() const { return last_year - first_year + 1; }
  int n_ages() const { return max_age + 1; }

  std::size_t idx(int year, int age) const {
    return static_cast<std::size_t>(year - first_year) * n_ages() + age;
  }

  double at(int year, int age) const { return x[idx(year, age)]; }
};

LogRateSurface to_log_rates(const MortalitySurface& s);

// Splices a historical surface with the forecast that continues it.
// Throws SurfaceGap if the year ranges do not meet exactly, ShapeMismatch if
// ages or sex differ.
MortalitySurface combine_surfaces(const MortalitySurface& historical,
                                  const MortalitySurface& forecast);

}  // namespace pensim

#endif  // PENSIM_MORTALITY_HPP
