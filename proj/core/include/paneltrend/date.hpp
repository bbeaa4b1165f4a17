#ifndef PANELTREND_DATE_HPP
#define PANELTREND_DATE_HPP

#include <string>

namespace paneltrend {

/// Minimal proleptic-Gregorian calendar date with day arithmetic.
struct CivilDate {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const CivilDate&) const = default;
};

/// Days since 1970-01-01 (negative before).
long long days_from_civil(const CivilDate& d);
CivilDate civil_from_days(long long days);

CivilDate add_days(const CivilDate& d, long long n);
long long days_between(const CivilDate& from, const CivilDate& to);

/// Parses "YYYY-MM-DD"; throws std::invalid_argument on malformed input.
CivilDate parse_iso_date(const std::string& s);
/// Parses "DD/MM/YYYY" (legacy feed format).
CivilDate parse_dmy_date(const std::string& s);
std::string to_iso_string(const CivilDate& d);

} // namespace paneltrend

#endif // PANELTREND_DATE_HPP
