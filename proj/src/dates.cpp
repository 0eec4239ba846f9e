#include "poldyn/dates.hpp"

#include <cstdio>

#include "poldyn/errors.hpp"

namespace poldyn {

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

std::string format_day(std::int32_t epoch_day) {
  int y;
  unsigned m, d;
  civil_from_days(epoch_day, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
  return buf;
}

namespace {

bool read_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
  if (pos + len > s.size()) return false;
  unsigned v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::int32_t parse_day(std::string_view s) {
  unsigned y, m, d;
  if (!read_uint(s, 0, 4, y) || s.size() != 10 || s[4] != '-' || s[7] != '-' ||
      !read_uint(s, 5, 2, m) || !read_uint(s, 8, 2, d) || m < 1 || m > 12 ||
      d < 1 || d > 31) {
    throw DataError("invalid date '" + std::string(s) + "', expected YYYY-MM-DD");
  }
  return static_cast<std::int32_t>(days_from_civil(static_cast<int>(y), m, d));
}

std::int64_t parse_rfc3339(std::string_view s) {
  const auto fail = [&]() -> std::int64_t {
    throw DataError("invalid timestamp '" + std::string(s) + "'");
  };
  unsigned y, mo, d, h, mi, se;
  if (s.size() < 19) return fail();
  if (!read_uint(s, 0, 4, y) || s[4] != '-' || !read_uint(s, 5, 2, mo) ||
      s[7] != '-' || !read_uint(s, 8, 2, d)) {
    return fail();
  }
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return fail();
  if (!read_uint(s, 11, 2, h) || s[13] != ':' || !read_uint(s, 14, 2, mi) ||
      s[16] != ':' || !read_uint(s, 17, 2, se)) {
    return fail();
  }
  if (mo < 1 || mo > 12 || d < 1 || h > 23 || mi > 59 || se > 60) return fail();
  static constexpr unsigned kMonthLen[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
  if (d > (mo == 2 && leap ? 29u : kMonthLen[mo - 1])) return fail();
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      ++pos;
      ++digits;
    }
    if (digits == 0) return fail();
  }
  std::int64_t offset = 0;
  if (pos < s.size()) {
    const char c = s[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      unsigned oh, om = 0;
      if (!read_uint(s, pos + 1, 2, oh)) return fail();
      std::size_t opos = pos + 3;
      if (opos < s.size() && s[opos] == ':') ++opos;
      if (opos < s.size()) {
        if (!read_uint(s, opos, 2, om)) return fail();
        opos += 2;
      }
      if (oh > 23 || om > 59) return fail();
      offset = static_cast<std::int64_t>(oh) * 3600 + om * 60;
      if (c == '-') offset = -offset;
      pos = opos;
    } else {
      return fail();
    }
  }
  if (pos != s.size()) return fail();
  const std::int64_t days = days_from_civil(static_cast<int>(y), mo, d);
  return days * 86400 + h * 3600 + mi * 60 + se - offset;
}

std::string format_rfc3339(std::int64_t unix_seconds) {
  const std::int32_t day = day_of_timestamp(unix_seconds);
  std::int64_t rem = unix_seconds - static_cast<std::int64_t>(day) * 86400;
  int y;
  unsigned m, d;
  civil_from_days(day, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                static_cast<int>(rem % 60));
  return buf;
}

}  // namespace poldyn
