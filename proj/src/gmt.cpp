#include "cpsa/gmt.hpp"

#include <chrono>
#include <cstdio>

#include "cpsa/error.hpp"

namespace cpsa {

UnixSeconds parse_gmt(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = 'Z';
  const std::string buf(text);
  const int got = std::sscanf(buf.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &tail);
  if (got < 6 || tail != 'Z' || h > 23 || mi > 59 || s > 60) {
    throw ConfigError("invalid GMT timestamp '" + buf + "', expected YYYY-MM-DDTHH:MM:SSZ");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ConfigError("invalid calendar date in '" + buf + "'");
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<UnixSeconds>(days) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_gmt(UnixSeconds t) {
  using namespace std::chrono;
  const auto days = static_cast<int>(t >= 0 ? t / 86400 : (t - 86399) / 86400);
  const UnixSeconds rem = t - static_cast<UnixSeconds>(days) * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char out[32];
  std::snprintf(out, sizeof out, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return out;
}

double gmt_hours(UnixSeconds t) {
  UnixSeconds sod = t % 86400;
  if (sod < 0) sod += 86400;
  return static_cast<double>(sod) / 3600.0;
}

}  // namespace cpsa
