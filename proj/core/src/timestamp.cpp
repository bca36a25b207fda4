#include "darkamp/timestamp.hpp"

#include <array>
#include <chrono>
#include <cstdio>

namespace darkamp {

namespace {

using std::chrono::days;
using std::chrono::sys_days;
using std::chrono::year_month_day;

struct CivilTime {
  year_month_day date;
  std::int64_t second_of_day = 0;
  std::int64_t micros = 0;
};

CivilTime to_civil(Timestamp ts) {
  std::int64_t total_us = ts.ns >= 0 ? ts.ns / 1000 : -((-ts.ns + 999) / 1000);
  std::int64_t day = total_us >= 0 ? total_us / 86'400'000'000 : -((-total_us + 86'399'999'999) / 86'400'000'000);
  std::int64_t rem = total_us - day * 86'400'000'000;
  return {year_month_day{sys_days{days{day}}}, rem / 1'000'000, rem % 1'000'000};
}

constexpr std::array<const char*, 12> kMonths = {"January", "February", "March",     "April",   "May",      "June",
                                                 "July",    "August",   "September", "October", "November", "December"};

const char* month_name(const year_month_day& d) { return kMonths[static_cast<unsigned>(d.month()) - 1]; }

}  // namespace

double seconds_between(Timestamp from, Timestamp to) {
  return static_cast<double>(to.ns - from.ns) / 1e9;
}

std::string to_iso8601(Timestamp ts) {
  CivilTime c = to_civil(ts);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ", static_cast<int>(c.date.year()),
                static_cast<unsigned>(c.date.month()), static_cast<unsigned>(c.date.day()),
                static_cast<long long>(c.second_of_day / 3600), static_cast<long long>(c.second_of_day / 60 % 60),
                static_cast<long long>(c.second_of_day % 60), static_cast<long long>(c.micros));
  return buf;
}

std::string calendar_range(Timestamp first, Timestamp last) {
  year_month_day a = to_civil(first).date;
  year_month_day b = to_civil(last).date;
  auto day_of = [](const year_month_day& d) { return std::to_string(static_cast<unsigned>(d.day())); };
  auto year_of = [](const year_month_day& d) { return std::to_string(static_cast<int>(d.year())); };

  std::string out = std::string(month_name(a)) + " " + day_of(a);
  if (a.year() != b.year()) {
    return out + ", " + year_of(a) + " to " + month_name(b) + " " + day_of(b) + ", " + year_of(b);
  }
  if (a.month() != b.month()) return out + " to " + month_name(b) + " " + day_of(b);
  if (a.day() != b.day()) return out + " to " + day_of(b);
  return out;
}

}  // namespace darkamp
