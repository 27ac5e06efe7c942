#ifndef PENSIM_SPA_HPP
#define PENSIM_SPA_HPP

#include <string>
#include <vector>

#include "pensim/common.hpp"

namespace pensim {

// The four state-pension-age schemes compared by the simulation.
enum class SpaScheme { pre_reform, equal_spa, spa_68, accelerated_spa_68 };

std::string scheme_token(SpaScheme s);
SpaScheme parse_scheme(const std::string& token);
std::vector<SpaScheme> all_schemes();

// Piecewise-linear pension-age table: within a segment the pension age (in
// months) grows by `slope` months per month of birth. Segments are closed on
// the left and end where the next begins; the last one extends forever, the
// first also covers earlier birth dates (the historical plateau).
struct SpaSegment {
  MonthIndex birth_from;
  int spa_months_at_from;
  int slope;
};

class SpaSchedule {
 public:
  SpaSchedule(SpaScheme scheme, std::vector<SpaSegment> male, std::vector<SpaSegment> female);

  SpaScheme scheme() const { return scheme_; }

  // Pension age in months for a birth month; monotone non-decreasing in the
  // birth date within each scheme.
  int spa_months(Sex sex, MonthIndex birth) const;

  // Date (month index) at which the cohort reaches pension age.
  MonthIndex pension_date(Sex sex, MonthIndex birth) const {
    return birth + spa_months(sex, birth);
  }

  static const SpaSchedule& get(SpaScheme scheme);

 private:
  SpaScheme scheme_;
  std::vector<SpaSegment> male_;
  std::vector<SpaSegment> female_;
};

inline int spa_at(SpaScheme scheme, Sex sex, MonthIndex birth) {
  return SpaSchedule::get(scheme).spa_months(sex, birth);
}

}  // namespace pensim

#endif  // PENSIM_SPA_HPP
