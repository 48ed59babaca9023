#include "credreason/clock.hpp"

#include <chrono>
#include <cstdio>

namespace credreason {

std::string Clock::now_iso8601() { return iso8601(now_millis()); }

CalendarDate Clock::today() { return date_of(now_millis()); }

std::string Clock::iso8601(EpochMillis millis) {
    using namespace std::chrono;
    sys_time<milliseconds> tp{milliseconds{millis}};
    auto days = floor<std::chrono::days>(tp);
    year_month_day ymd{days};
    auto tod = tp - days;
    auto h = duration_cast<hours>(tod);
    auto m = duration_cast<minutes>(tod - h);
    auto s = duration_cast<seconds>(tod - h - m);
    auto ms = duration_cast<milliseconds>(tod - h - m - s);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ld.%03ldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(h.count()),
                  static_cast<long>(m.count()), static_cast<long>(s.count()),
                  static_cast<long>(ms.count()));
    return buf;
}

CalendarDate Clock::date_of(EpochMillis millis) {
    using namespace std::chrono;
    sys_time<milliseconds> tp{milliseconds{millis}};
    year_month_day ymd{floor<std::chrono::days>(tp)};
    return CalendarDate(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                        static_cast<unsigned>(ymd.day()));
}

EpochMillis WallClock::now_millis() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace credreason
