#include "socialrag/time.hpp"

#include <cstdio>

#include "socialrag/errors.hpp"

namespace socialrag {

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day = floor<std::chrono::days>(ts);
  const year_month_day ymd{day};
  const hh_mm_ss hms{ts - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const std::string buf(text);
  char tail = 0;
  int n = std::sscanf(buf.c_str(), "%d-%u-%uT%u:%u:%u%c", &y, &mo, &d, &h, &mi, &s, &tail);
  if (n == 3 && buf.size() == 10) {
    h = mi = s = 0;
  } else if (n != 7 || tail != 'Z') {
    throw InvalidInput("bad timestamp: " + buf);
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) throw InvalidInput("bad timestamp: " + buf);
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

long utc_day_index(Timestamp ts) {
  return static_cast<long>(std::chrono::floor<std::chrono::days>(ts).time_since_epoch().count());
}

}  // namespace socialrag
