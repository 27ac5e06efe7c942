#ifndef PENSIM_COMMON_HPP
#define PENSIM_COMMON_HPP

#include <string>

#include "pensim/errors.hpp"

namespace pensim {

enum class Sex { male, female };

inline char sex_letter(Sex s) { return s == Sex::male ? 'M' : 'F'; }

inline Sex parse_sex(const std::string& token) {
  if (token == "M" || token == "m" || token == "male") return Sex::male;
  if (token == "F" || token == "f" || token == "female") return Sex::female;
  throw ParseError("unknown sex token '" + token + "'");
}

// Calendar months are handled as a flat index so that pension-age phase-ins
// and agent ages can be compared with plain integer arithmetic. Days are
// never represented: all dates snap to the first of the month.
using MonthIndex = int;

inline constexpr MonthIndex month_index(int year, int month) {
  return year * 12 + (month - 1);
}

inline constexpr int year_of(MonthIndex m) { return m >= 0 ? m / 12 : (m - 11) / 12; }

inline constexpr int month_of(MonthIndex m) { return m - year_of(m) * 12 + 1; }

struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  MonthIndex index() const { return month_index(year, month); }
  static YearMonth from_index(MonthIndex m) { return {year_of(m), month_of(m)}; }
};

inline std::string format_year_month(MonthIndex m) {
  int y = year_of(m);
  int mo = month_of(m);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", y, mo);
  return buf;
}

}  // namespace pensim

#endif  // PENSIM_COMMON_HPP
