#ifndef PENSIM_LIFE_METRICS_HPP
#define PENSIM_LIFE_METRICS_HPP

#include <vector>

#include "pensim/mortality.hpp"
#include "pensim/spa.hpp"

namespace pensim {

// Cohort survival: l[a] is the probability of being alive at exact age a
// given birth in `birth_year`, following the cohort diagonal of the surface.
// l[0] = 1 and l is non-increasing.
struct CohortSurvival {
  int birth_year = 0;
  std::vector<double> l;  // size max_age + 1

  int max_age() const { return static_cast<int>(l.size()) - 1; }
};

// Requires the surface to cover years birth_year .. birth_year + max_age;
// throws InsufficientHorizon naming the year needed otherwise. Cohort reads
// past the forecast horizon are never padded.
CohortSurvival survival_curve(const MortalitySurface& s, int birth_year);

// Curtate cohort life expectancy at age `a` plus the 0.5-year continuity
// correction, truncated at the surface's max age (survivors there get only
// the 0.5).
double life_expectancy_at(const MortalitySurface& s, int birth_year, int age);

struct RetirementExpectancy {
  int birth_year = 0;        // cohort chosen for the retirement year
  MonthIndex birth_month = 0;
  int spa_months = 0;
  double years = 0.0;        // expected years in retirement
  double share_adult = 0.0;  // of expected adult life (from age 15)
  double share_total = 0.0;  // of expected total life
};

// Picks the cohort whose pension date falls latest at or before July of
// `retirement_year` under the scheme, and evaluates its remaining life
// expectancy at pension age (linear interpolation between whole ages when
// the pension age has a month component).
RetirementExpectancy retirement_life_expectancy(const MortalitySurface& s,
                                                int retirement_year, SpaScheme scheme,
                                                Sex sex);

// ln(q_male / q_female), positive where male mortality exceeds female.
struct SexRatioGrid {
  int first_year = 0;
  int last_year = 0;
  int max_age = 0;
  std::vector<double> log_ratio;  // row-major [year][age]

  std::size_t idx(int year, int age) const {
    return static_cast<std::size_t>(year - first_year) * (max_age + 1) + age;
  }
};

SexRatioGrid mortality_sex_ratio(const MortalitySurface& male, const MortalitySurface& female);

// Interquartile range of the age-at-death distribution implied by the
// survival curve; smaller = more rectangular. Mass at age a is l[a]-l[a+1],
// with all remaining mass assigned to the top age. A quantile is the
// smallest age whose cumulative mass strictly exceeds the target.
double rectangularisation_index(const CohortSurvival& c);

}  // namespace pensim

#endif  // PENSIM_LIFE_METRICS_HPP
