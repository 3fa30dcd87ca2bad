#pragma once

#include <chrono>
#include <cstdio>
#include <string>

#include "epiwave/errors.hpp"

namespace epiwave {

// Calendar day stored as a serial (days since 1970-01-01). Arithmetic on
// days is the only operation the pipeline needs.
struct Date {
  int serial = 0;

  Date() = default;
  explicit Date(int days_since_epoch) : serial(days_since_epoch) {}
  Date(int y, unsigned m, unsigned d) {
    using namespace std::chrono;
    serial = static_cast<int>(
        sys_days(year_month_day(year(y), month(m), day(d))).time_since_epoch().count());
  }

  Date operator+(int days) const { return Date(serial + days); }
  Date operator-(int days) const { return Date(serial - days); }
  int operator-(Date other) const { return serial - other.serial; }
  auto operator<=>(const Date&) const = default;

  std::string iso() const {
    using namespace std::chrono;
    year_month_day ymd{sys_days(days(serial))};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }
};

// Accepts ISO (2020-06-22) and the JHU header style M/D/YY or M/D/YYYY.
inline Date parse_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%u", &y, &m, &d) == 3 && text.find('-') != std::string::npos) {
    // fallthrough to validation
  } else if (std::sscanf(text.c_str(), "%u/%u/%d", &m, &d, &y) == 3) {
    if (y < 100) y += 2000;
  } else {
    throw Error::data("parse error: unrecognized date '" + text + "'");
  }
  if (m < 1 || m > 12 || d < 1 || d > 31 || y < 1900 || y > 2200)
    throw Error::data("parse error: date out of range '" + text + "'");
  return Date(y, m, d);
}

inline bool looks_like_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  return (std::sscanf(text.c_str(), "%d-%u-%u", &y, &m, &d) == 3 ||
          std::sscanf(text.c_str(), "%u/%u/%d", &m, &d, &y) == 3);
}

}  // namespace epiwave
