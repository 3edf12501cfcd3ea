#include "hvacsr/core/time.hpp"

#include <charconv>
#include <cstdio>

#include "hvacsr/core/error.hpp"

namespace hvacsr {

using namespace std::chrono;

TimeGrid::TimeGrid(Timestamp start, Seconds step, std::size_t length)
    : start_(start), step_(step), length_(length) {
  if (step_.count() <= 0) throw DataError("time grid step must be positive");
  if (length_ < 1) throw DataError("time grid must contain at least one step");
}

std::optional<std::size_t> TimeGrid::index_of(Timestamp ts) const {
  const auto offset = (ts - start_).count();
  if (offset < 0 || offset % step_.count() != 0) return std::nullopt;
  const auto t = static_cast<std::size_t>(offset / step_.count());
  if (t >= length_) return std::nullopt;
  return t;
}

DailyWindow DailyWindow::hours(double from, double to) {
  return DailyWindow{static_cast<int>(from * 60.0 + 0.5), static_cast<int>(to * 60.0 + 0.5)};
}

namespace {

int parse_hhmm(std::string_view s) {
  int h = 0;
  int m = 0;
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ConfigError("daily window time must be HH:MM: " + std::string(s));
  auto r1 = std::from_chars(s.data(), s.data() + colon, h);
  auto r2 = std::from_chars(s.data() + colon + 1, s.data() + s.size(), m);
  if (r1.ec != std::errc{} || r2.ec != std::errc{} || h < 0 || h > 24 || m < 0 || m > 59 ||
      (h == 24 && m != 0)) {
    throw ConfigError("invalid time of day: " + std::string(s));
  }
  return h * 60 + m;
}

}  // namespace

DailyWindow DailyWindow::parse(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) throw ConfigError("daily window must be HH:MM-HH:MM: " + std::string(text));
  return DailyWindow{parse_hhmm(text.substr(0, dash)), parse_hhmm(text.substr(dash + 1))};
}

bool DailyWindow::contains_minute(int m) const {
  if (start_minute <= end_minute) return m >= start_minute && m < end_minute;
  return m >= start_minute || m < end_minute;
}

bool DailyWindow::contains(Timestamp ts, Seconds utc_offset) const {
  return contains_minute(minute_of_day(ts, utc_offset));
}

std::string DailyWindow::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d-%02d:%02d", start_minute / 60, start_minute % 60,
                end_minute / 60, end_minute % 60);
  return buf;
}

int minute_of_day(Timestamp ts, Seconds utc_offset) {
  const auto local = ts + utc_offset;
  const auto since_midnight = local - floor<days>(local);
  return static_cast<int>(duration_cast<minutes>(since_midnight).count());
}

std::string format_iso8601(Timestamp ts) {
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const hh_mm_ss hms{ts - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Timestamp make_timestamp(int y, unsigned mo, unsigned d, int h, int mi) {
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) throw DataError("invalid calendar date");
  return sys_days{ymd} + hours{h} + minutes{mi};
}

Timestamp parse_iso8601(std::string_view text) {
  int y = 0, h = 0, mi = 0, s = 0;
  unsigned mo = 0, d = 0;
  auto field = [&](std::size_t pos, std::size_t len, auto& out) {
    if (pos + len > text.size()) return false;
    auto r = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return r.ec == std::errc{} && r.ptr == text.data() + pos + len;
  };
  const bool ok = text.size() >= 16 && field(0, 4, y) && text[4] == '-' && field(5, 2, mo) &&
                  text[7] == '-' && field(8, 2, d) && (text[10] == 'T' || text[10] == ' ') &&
                  field(11, 2, h) && text[13] == ':' && field(14, 2, mi);
  if (!ok) throw DataError("malformed ISO-8601 timestamp: '" + std::string(text) + "'");
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (!field(pos + 1, 2, s)) throw DataError("malformed ISO-8601 seconds: '" + std::string(text) + "'");
    pos += 3;
  }
  const auto rest = text.substr(pos);
  if (!(rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000")) {
    throw DataError("timestamps must be UTC: '" + std::string(text) + "'");
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 59) {
    throw DataError("timestamp field out of range: '" + std::string(text) + "'");
  }
  return make_timestamp(y, mo, d, h, mi) + Seconds{s};
}

}  // namespace hvacsr
