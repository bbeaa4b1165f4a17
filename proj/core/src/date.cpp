#include "paneltrend/date.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace paneltrend {

long long days_from_civil(const CivilDate& d) {
  long long y = d.year;
  const unsigned m = static_cast<unsigned>(d.month);
  const unsigned day = static_cast<unsigned>(d.day);
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

CivilDate civil_from_days(long long days) {
  days += 719468;
  const long long era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long long y = static_cast<long long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

CivilDate add_days(const CivilDate& d, long long n) {
  return civil_from_days(days_from_civil(d) + n);
}

long long days_between(const CivilDate& from, const CivilDate& to) {
  return days_from_civil(to) - days_from_civil(from);
}

namespace {

bool all_digits(const std::string& s, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

CivilDate checked(int y, int m, int d, const std::string& s) {
  const CivilDate date{y, m, d};
  // round-trip through the day count rejects impossible dates like Feb 30
  if (m < 1 || m > 12 || d < 1 || d > 31 || civil_from_days(days_from_civil(date)) != date) {
    throw std::invalid_argument("malformed date: " + s);
  }
  return date;
}

} // namespace

CivilDate parse_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !all_digits(s, 0, 4) ||
      !all_digits(s, 5, 7) || !all_digits(s, 8, 10)) {
    throw std::invalid_argument("malformed date: " + s);
  }
  return checked(std::stoi(s.substr(0, 4)), std::stoi(s.substr(5, 2)),
                 std::stoi(s.substr(8, 2)), s);
}

CivilDate parse_dmy_date(const std::string& s) {
  if (s.size() != 10 || s[2] != '/' || s[5] != '/' || !all_digits(s, 0, 2) ||
      !all_digits(s, 3, 5) || !all_digits(s, 6, 10)) {
    throw std::invalid_argument("malformed date: " + s);
  }
  return checked(std::stoi(s.substr(6, 4)), std::stoi(s.substr(3, 2)),
                 std::stoi(s.substr(0, 2)), s);
}

std::string to_iso_string(const CivilDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return std::string(buf);
}

} // namespace paneltrend
