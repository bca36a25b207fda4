#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace darkamp {

/// Capture time as nanoseconds since the Unix epoch.
struct Timestamp {
  std::int64_t ns = 0;

  static constexpr Timestamp from_seconds(std::int64_t s) { return {s * 1'000'000'000}; }
  static constexpr Timestamp from_micros(std::int64_t us) { return {us * 1'000}; }

  constexpr std::int64_t seconds() const { return ns >= 0 ? ns / 1'000'000'000 : -((-ns + 999'999'999) / 1'000'000'000); }
  constexpr std::int64_t micros() const { return ns / 1'000; }

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

/// Elapsed time from `from` to `to` in (fractional) seconds.
double seconds_between(Timestamp from, Timestamp to);

/// `2013-03-15T08:12:01.250000Z`; always microsecond precision.
std::string to_iso8601(Timestamp ts);

/// Human calendar span in UTC, e.g. "March 15", "March 17 to 18", "March 31 to April 2".
/// The year is appended when the range crosses a year boundary.
std::string calendar_range(Timestamp first, Timestamp last);

}  // namespace darkamp
