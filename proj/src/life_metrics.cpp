#include "pensim/life_metrics.hpp"

#include <cmath>
#include <string>

namespace pensim {

namespace {

void require_cohort_coverage(const MortalitySurface& s, int birth_year) {
  const int needed = birth_year + s.max_age;
  if (birth_year < s.first_year || needed > s.last_year) {
    throw InsufficientHorizon("cohort " + std::to_string(birth_year) +
                              " needs surface years " + std::to_string(birth_year) + ".." +
                              std::to_string(needed) + ", have " +
                              std::to_string(s.first_year) + ".." +
                              std::to_string(s.last_year));
  }
}

}  // namespace

CohortSurvival survival_curve(const MortalitySurface& s, int birth_year) {
  require_cohort_coverage(s, birth_year);
  CohortSurvival c;
  c.birth_year = birth_year;
  c.l.resize(s.max_age + 1);
  c.l[0] = 1.0;
  for (int a = 0; a < s.max_age; ++a) {
    c.l[a + 1] = c.l[a] * (1.0 - s.at(birth_year + a, a));
  }
  return c;
}

double life_expectancy_at(const MortalitySurface& s, int birth_year, int age) {
  require_cohort_coverage(s, birth_year);
  if (age < 0 || age > s.max_age) {
    throw InsufficientHorizon("age " + std::to_string(age) + " beyond table top " +
                              std::to_string(s.max_age));
  }
  double expectancy = 0.0;
  double alive = 1.0;
  for (int a = age; a < s.max_age; ++a) {
    alive *= 1.0 - s.at(birth_year + a, a);
    expectancy += alive;
  }
  return expectancy + 0.5;
}

RetirementExpectancy retirement_life_expectancy(const MortalitySurface& s,
                                                int retirement_year, SpaScheme scheme,
                                                Sex sex) {
  const SpaSchedule& schedule = SpaSchedule::get(scheme);
  const MonthIndex anchor = month_index(retirement_year, 7);

  // Pension dates are strictly increasing in birth month, so the latest
  // cohort retiring at or before July can be found by bisection.
  MonthIndex lo = month_index(1900, 1);
  MonthIndex hi = anchor;  // born later than the anchor cannot have retired
  if (schedule.pension_date(sex, lo) > anchor) {
    throw SchemeUndefined("no cohort retires by " + format_year_month(anchor) +
                          " under scheme " + scheme_token(scheme));
  }
  while (lo < hi) {
    const MonthIndex mid = lo + (hi - lo + 1) / 2;
    if (schedule.pension_date(sex, mid) <= anchor) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  MonthIndex birth = lo;
  if (year_of(schedule.pension_date(sex, birth)) != retirement_year) {
    // July fell in a gap of the phase-in; take the first cohort retiring
    // within the year instead.
    MonthIndex b = birth + 1;
    while (year_of(schedule.pension_date(sex, b)) < retirement_year) ++b;
    if (year_of(schedule.pension_date(sex, b)) != retirement_year) {
      throw SchemeUndefined("no cohort retires during " + std::to_string(retirement_year) +
                            " under scheme " + scheme_token(scheme));
    }
    birth = b;
  }

  RetirementExpectancy r;
  r.birth_month = birth;
  r.birth_year = year_of(birth);
  r.spa_months = schedule.spa_months(sex, birth);

  const int whole = r.spa_months / 12;
  const int rem = r.spa_months % 12;
  double e = life_expectancy_at(s, r.birth_year, whole);
  if (rem > 0) {
    const double e_next = life_expectancy_at(s, r.birth_year, whole + 1);
    const double w = rem / 12.0;
    e = (1.0 - w) * e + w * e_next;
  }
  r.years = e;
  const double spa_years = r.spa_months / 12.0;
  r.share_adult = e / ((spa_years - 15.0) + e);
  r.share_total = e / (spa_years + e);
  return r;
}

SexRatioGrid mortality_sex_ratio(const MortalitySurface& male,
                                 const MortalitySurface& female) {
  if (male.first_year != female.first_year || male.last_year != female.last_year ||
      male.max_age != female.max_age) {
    throw ShapeMismatch("sex-ratio grids need identical year/age ranges");
  }
  SexRatioGrid g;
  g.first_year = male.first_year;
  g.last_year = male.last_year;
  g.max_age = male.max_age;
  g.log_ratio.resize(male.q.size());
  for (std::size_t i = 0; i < male.q.size(); ++i) {
    g.log_ratio[i] = std::log(male.q[i] / female.q[i]);
  }
  return g;
}

double rectangularisation_index(const CohortSurvival& c) {
  const int top = c.max_age();
  if (top < 0 || c.l.empty() || c.l[0] <= 0.0) {
    throw DegenerateCurve("survival curve carries no mass");
  }
  const double total = c.l[0];

  auto quantile = [&](double p) {
    double cum = 0.0;
    for (int a = 0; a <= top; ++a) {
      const double mass = a < top ? c.l[a] - c.l[a + 1] : c.l[top];
      cum += mass;
      if (cum > p * total) return a;
    }
    return top;
  };
  return quantile(0.75) - quantile(0.25);
}

}  // namespace pensim
