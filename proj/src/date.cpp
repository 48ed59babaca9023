#include "credreason/date.hpp"

#include <cctype>
#include <cstdio>

namespace credreason {

CalendarDate::CalendarDate(int year, unsigned month, unsigned day)
    : ymd_(std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}) {}

std::optional<CalendarDate> CalendarDate::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(iso[i]))) return std::nullopt;
    }
    int year = (iso[0] - '0') * 1000 + (iso[1] - '0') * 100 + (iso[2] - '0') * 10 + (iso[3] - '0');
    unsigned month = static_cast<unsigned>((iso[5] - '0') * 10 + (iso[6] - '0'));
    unsigned day = static_cast<unsigned>((iso[8] - '0') * 10 + (iso[9] - '0'));
    CalendarDate date(year, month, day);
    if (!date.ymd_.ok()) return std::nullopt;
    return date;
}

std::string CalendarDate::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd_.year()),
                  static_cast<unsigned>(ymd_.month()), static_cast<unsigned>(ymd_.day()));
    return buf;
}

long CalendarDate::day_number() const {
    return std::chrono::sys_days(ymd_).time_since_epoch().count();
}

CalendarDate CalendarDate::minus_days(long days) const {
    auto shifted = std::chrono::sys_days(ymd_) - std::chrono::days(days);
    CalendarDate out;
    out.ymd_ = std::chrono::year_month_day(shifted);
    return out;
}

}  // namespace credreason
