#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cpsa {

// Seconds since 1970-01-01T00:00:00Z. All scenario clocks are UTC/GMT.
using UnixSeconds = std::int64_t;

// Accepts "YYYY-MM-DDTHH:MM:SSZ" (the trailing Z is optional).
UnixSeconds parse_gmt(std::string_view text);

std::string format_gmt(UnixSeconds t);

// Hours past midnight GMT, in [0, 24).
double gmt_hours(UnixSeconds t);

}  // namespace cpsa
