#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace poldyn {

// Days since 1970-01-01 for a proleptic-Gregorian civil date.
std::int64_t days_from_civil(int y, unsigned m, unsigned d);
void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d);

// Epoch day of a Unix timestamp, floor division (pre-1970 handled).
inline std::int32_t day_of_timestamp(std::int64_t unix_seconds) {
  std::int64_t d = unix_seconds / 86400;
  if (unix_seconds % 86400 < 0) --d;
  return static_cast<std::int32_t>(d);
}

std::string format_day(std::int32_t epoch_day);  // "YYYY-MM-DD"
std::int32_t parse_day(std::string_view s);      // throws DataError

// RFC-3339 timestamp to Unix seconds. Fractional seconds are truncated, a
// missing zone means UTC. Throws DataError on malformed input.
std::int64_t parse_rfc3339(std::string_view s);
std::string format_rfc3339(std::int64_t unix_seconds);  // "...Z" form

}  // namespace poldyn
