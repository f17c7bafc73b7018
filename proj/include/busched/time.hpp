#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace busched {

// Naive local time. Stored as seconds on the system clock but never
// converted to or from a time zone.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

namespace detail {

inline bool parse_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (std::size_t k = pos; k < pos + count; ++k) {
    const char ch = text[k];
    if (ch < '0' || ch > '9') return false;
    value = value * 10 + (ch - '0');
  }
  out = value;
  return true;
}

}  // namespace detail

/// Parses `YYYY-MM-DDTHH:MM[:SS]` (a single space may replace the `T`).
inline std::optional<Timestamp> parse_timestamp(std::string_view text) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (text.size() != 16 && text.size() != 19) return std::nullopt;
  if (!detail::parse_digits(text, 0, 4, year) || text[4] != '-' ||
      !detail::parse_digits(text, 5, 2, month) || text[7] != '-' ||
      !detail::parse_digits(text, 8, 2, day) || (text[10] != 'T' && text[10] != ' ') ||
      !detail::parse_digits(text, 11, 2, hour) || text[13] != ':' ||
      !detail::parse_digits(text, 14, 2, minute)) {
    return std::nullopt;
  }
  if (text.size() == 19 && (text[16] != ':' || !detail::parse_digits(text, 17, 2, second))) {
    return std::nullopt;
  }
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
  const std::chrono::year_month_day date{std::chrono::year{year},
                                         std::chrono::month{static_cast<unsigned>(month)},
                                         std::chrono::day{static_cast<unsigned>(day)}};
  if (!date.ok()) return std::nullopt;
  return Timestamp{std::chrono::sys_days{date}} + std::chrono::hours{hour} +
         std::chrono::minutes{minute} + Seconds{second};
}

/// Formats as `YYYY-MM-DDTHH:MM:SS`.
inline std::string format_timestamp(Timestamp t) {
  const auto day_start = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day date{day_start};
  const auto secs = (t - day_start).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return buf;
}

/// Duration of `hours` (fractional) rounded to whole seconds.
inline Seconds hours_to_seconds(double hours) {
  return Seconds{static_cast<std::int64_t>(hours * 3600.0 + (hours >= 0 ? 0.5 : -0.5))};
}

inline double seconds_to_hours(Seconds s) { return static_cast<double>(s.count()) / 3600.0; }

/// Largest multiple of `step` since the epoch that is <= t.
inline Timestamp floor_to_grid(Timestamp t, Seconds step) {
  const auto c = t.time_since_epoch().count();
  const auto q = step.count();
  auto r = c % q;
  if (r < 0) r += q;
  return Timestamp{Seconds{c - r}};
}

/// Smallest multiple of `step` since the epoch that is >= t.
inline Timestamp ceil_to_grid(Timestamp t, Seconds step) {
  const auto f = floor_to_grid(t, step);
  return f == t ? f : f + step;
}

/// 0 = Monday ... 6 = Sunday.
inline unsigned iso_weekday_index(Timestamp t) {
  const std::chrono::weekday wd{std::chrono::floor<std::chrono::days>(t)};
  return wd.iso_encoding() - 1;
}

}  // namespace busched
