#include "pensim/mortality.hpp"

#include <cmath>

namespace pensim {

void MortalitySurface::validate() const {
  if (last_year < first_year || max_age < 0) {
    throw ShapeMismatch("degenerate surface bounds");
  }
  const std::size_t expected = static_cast<std::size_t>(n_years()) * n_ages();
  if (q.size() != expected) {
    throw ShapeMismatch("surface cell count " + std::to_string(q.size()) +
                        " does not match " + std::to_string(expected));
  }
  for (int y = first_year; y <= last_year; ++y) {
    for (int a = 0; a <= max_age; ++a) {
      const double v = q[idx(y, a)];
      if (!(v > 0.0) || v > 1.0 || !std::isfinite(v)) {
        throw RangeError("q out of (0,1] at year " + std::to_string(y) + ", age " +
                         std::to_string(a) + ": " + std::to_string(v));
      }
    }
  }
}

LogRateSurface to_log_rates(const MortalitySurface& s) {
  LogRateSurface out;
  out.sex = s.sex;
  out.first_year = s.first_year;
  out.last_year = s.last_year;
  out.max_age = s.max_age;
  out.x.resize(s.q.size());
  for (std::size_t i = 0; i < s.q.size(); ++i) out.x[i] = std::log(s.q[i]);
  return out;
}

MortalitySurface combine_surfaces(const MortalitySurface& historical,
                                  const MortalitySurface& forecast) {
  if (historical.sex != forecast.sex || historical.max_age != forecast.max_age) {
    throw ShapeMismatch("cannot combine surfaces with different sex or age range");
  }
  if (forecast.first_year != historical.last_year + 1) {
    throw SurfaceGap("forecast starts in " + std::to_string(forecast.first_year) +
                     " but history ends in " + std::to_string(historical.last_year));
  }
  MortalitySurface out;
  out.sex = historical.sex;
  out.first_year = historical.first_year;
  out.last_year = forecast.last_year;
  out.max_age = historical.max_age;
  out.q.reserve(historical.q.size() + forecast.q.size());
  out.q = historical.q;
  out.q.insert(out.q.end(), forecast.q.begin(), forecast.q.end());
  out.validate();
  return out;
}

}  // namespace pensim
