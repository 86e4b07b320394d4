#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "speedprof/text_io.hpp"

namespace speedprof {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// Parses "YYYY-MM-DDTHH:MM:SS" with an optional trailing 'Z'. Returns false
/// on anything else; offsets other than UTC are not accepted.
inline bool parse_iso8601(std::string_view s, Timestamp& out) {
    s = text::trim(s);
    if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':')
        return false;
    std::int64_t y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    if (!text::parse_int(s.substr(0, 4), y) || !text::parse_int(s.substr(5, 2), mo) ||
        !text::parse_int(s.substr(8, 2), d) || !text::parse_int(s.substr(11, 2), h) ||
        !text::parse_int(s.substr(14, 2), mi) || !text::parse_int(s.substr(17, 2), se))
        return false;
    using namespace std::chrono;
    const year_month_day ymd{year{static_cast<int>(y)}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || se > 60) return false;
    const auto days = sys_days{ymd}.time_since_epoch().count();
    out = static_cast<Timestamp>(days) * 86400 + h * 3600 + mi * 60 + se;
    return true;
}

inline std::string format_iso8601(Timestamp t) {
    using namespace std::chrono;
    const auto day_count = t >= 0 ? t / 86400 : (t - 86399) / 86400;
    const auto secs = t - day_count * 86400;
    const year_month_day ymd{sys_days{days{day_count}}};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), secs / 3600,
                       (secs / 60) % 60, secs % 60);
}

} // namespace speedprof
