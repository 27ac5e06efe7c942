#include "pensim/spa.hpp"

#include <stdexcept>

#include "pensim/errors.hpp"

namespace pensim {

std::string scheme_token(SpaScheme s) {
  switch (s) {
    case SpaScheme::pre_reform: return "pre_reform";
    case SpaScheme::equal_spa: return "equal_spa";
    case SpaScheme::spa_68: return "spa_68";
    case SpaScheme::accelerated_spa_68: return "accelerated_spa_68";
  }
  return "?";
}

SpaScheme parse_scheme(const std::string& token) {
  if (token == "pre_reform") return SpaScheme::pre_reform;
  if (token == "equal_spa") return SpaScheme::equal_spa;
  if (token == "spa_68") return SpaScheme::spa_68;
  if (token == "accelerated_spa_68") return SpaScheme::accelerated_spa_68;
  throw ParseError("unknown scheme '" + token + "'");
}

std::vector<SpaScheme> all_schemes() {
  return {SpaScheme::pre_reform, SpaScheme::equal_spa, SpaScheme::spa_68,
          SpaScheme::accelerated_spa_68};
}

SpaSchedule::SpaSchedule(SpaScheme scheme, std::vector<SpaSegment> male,
                         std::vector<SpaSegment> female)
    : scheme_(scheme), male_(std::move(male)), female_(std::move(female)) {
  for (const auto* segs : {&male_, &female_}) {
    if (segs->empty()) throw std::logic_error("empty pension-age table");
    for (std::size_t i = 0; i + 1 < segs->size(); ++i) {
      const auto& cur = (*segs)[i];
      const auto& nxt = (*segs)[i + 1];
      if (nxt.birth_from <= cur.birth_from) {
        throw std::logic_error("pension-age segments out of order");
      }
      const int end_value =
          cur.spa_months_at_from + cur.slope * (nxt.birth_from - 1 - cur.birth_from);
      if (cur.slope < 0 || nxt.spa_months_at_from < end_value) {
        throw std::logic_error("pension age must be non-decreasing in birth date");
      }
    }
  }
}

int SpaSchedule::spa_months(Sex sex, MonthIndex birth) const {
  const auto& segs = sex == Sex::male ? male_ : female_;
  const SpaSegment* seg = &segs.front();
  for (const auto& s : segs) {
    if (s.birth_from <= birth) {
      seg = &s;
    } else {
      break;
    }
  }
  if (birth < seg->birth_from) return seg->spa_months_at_from;  // historical plateau
  return seg->spa_months_at_from + seg->slope * (birth - seg->birth_from);
}

namespace {

constexpr int years(int y) { return y * 12; }

// Pre-reform (1948 system): 65 for men, 60 for women, all birth dates.
SpaSchedule build_pre_reform() {
  return SpaSchedule(SpaScheme::pre_reform,
                     {{month_index(1900, 1), years(65), 0}},
                     {{month_index(1900, 1), years(60), 0}});
}

// Equalisation to 65. Women's pension age climbs one month per birth month
// from the April 1950 cohorts (first affected pension dates May 2010), then
// three months per birth month for the April-October 1953 cohorts so that
// the first 65 cohort (born November 1953) retires in November 2018. Men
// stay at 65 throughout.
SpaSchedule build_equal_spa() {
  std::vector<SpaSegment> female = {
      {month_index(1900, 1), years(60), 0},
      {month_index(1950, 4), years(60) + 1, 1},
      {month_index(1953, 4), years(63) + 3, 3},
      {month_index(1953, 11), years(65), 0},
  };
  return SpaSchedule(SpaScheme::equal_spa, {{month_index(1900, 1), years(65), 0}},
                     std::move(female));
}

// Rises shared by both sexes once equalised: to 66 with pension dates
// spanning 2024-2026, to 67 spanning 2034-2036, to 68 spanning 2044-2046,
// one month of pension age per birth month.
std::vector<SpaSegment> slow_rises_tail() {
  return {
      {month_index(1959, 4), years(65) + 1, 1},  // 66 between 2024 and 2026
      {month_index(1960, 4), years(66), 0},
      {month_index(1968, 4), years(66) + 1, 1},  // 67 between 2034 and 2036
      {month_index(1969, 4), years(67), 0},
      {month_index(1977, 4), years(67) + 1, 1},  // 68 between 2044 and 2046
      {month_index(1978, 4), years(68), 0},
  };
}

// Equalisation in 2020 on the original (overridden) timetable, then the
// slow rises to 68.
SpaSchedule build_spa_68() {
  std::vector<SpaSegment> female = {
      {month_index(1900, 1), years(60), 0},
      {month_index(1950, 4), years(60) + 1, 1},  // reaches 65 in March 2020
      {month_index(1955, 3), years(65), 0},
  };
  std::vector<SpaSegment> male = {{month_index(1900, 1), years(65), 0}};
  for (const auto& seg : slow_rises_tail()) {
    female.push_back(seg);
    male.push_back(seg);
  }
  return SpaSchedule(SpaScheme::spa_68, std::move(male), std::move(female));
}

// Current legislation: equalisation completes in November 2018; the rise to
// 66 adds three months for the first cohort (born December 1953, pension
// date March 2019) and one month for each of the next nine, finishing with
// the September 1954 cohort retiring at 66 in September 2020; 67 follows
// with pension dates spanning 2026-2028 and 68 spanning 2044-2046.
SpaSchedule build_accelerated() {
  std::vector<SpaSegment> shared_tail = {
      {month_index(1953, 12), years(65) + 3, 1},  // 66 by September 2020
      {month_index(1954, 10), years(66), 0},
      {month_index(1960, 4), years(66) + 1, 1},   // 67 between 2026 and 2028
      {month_index(1961, 4), years(67), 0},
      {month_index(1977, 4), years(67) + 1, 1},   // 68 between 2044 and 2046
      {month_index(1978, 4), years(68), 0},
  };
  std::vector<SpaSegment> female = {
      {month_index(1900, 1), years(60), 0},
      {month_index(1950, 4), years(60) + 1, 1},
      {month_index(1953, 4), years(63) + 3, 3},
      {month_index(1953, 11), years(65), 0},
  };
  std::vector<SpaSegment> male = {{month_index(1900, 1), years(65), 0}};
  for (const auto& seg : shared_tail) {
    female.push_back(seg);
    male.push_back(seg);
  }
  return SpaSchedule(SpaScheme::accelerated_spa_68, std::move(male), std::move(female));
}

}  // namespace

const SpaSchedule& SpaSchedule::get(SpaScheme scheme) {
  static const SpaSchedule pre = build_pre_reform();
  static const SpaSchedule equal = build_equal_spa();
  static const SpaSchedule s68 = build_spa_68();
  static const SpaSchedule accel = build_accelerated();
  switch (scheme) {
    case SpaScheme::pre_reform: return pre;
    case SpaScheme::equal_spa: return equal;
    case SpaScheme::spa_68: return s68;
    case SpaScheme::accelerated_spa_68: return accel;
  }
  throw std::logic_error("unreachable scheme");
}

}  // namespace pensim
