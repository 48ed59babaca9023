#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace credreason {

// Calendar date in ISO "YYYY-MM-DD" form. Evidence recency policies work in
// whole days, so the representation is a plain year_month_day.
class CalendarDate {
public:
    CalendarDate() = default;
    CalendarDate(int year, unsigned month, unsigned day);

    // Strict ISO parse; returns nullopt for anything that is not a valid date.
    static std::optional<CalendarDate> parse(std::string_view iso);

    std::string to_string() const;

    // Days since the civil epoch; supports ordering and window arithmetic.
    long day_number() const;

    CalendarDate minus_days(long days) const;

    friend bool operator==(const CalendarDate& a, const CalendarDate& b) {
        return a.ymd_ == b.ymd_;
    }
    friend bool operator!=(const CalendarDate& a, const CalendarDate& b) { return !(a == b); }
    friend bool operator<(const CalendarDate& a, const CalendarDate& b) {
        return a.day_number() < b.day_number();
    }
    friend bool operator<=(const CalendarDate& a, const CalendarDate& b) {
        return a.day_number() <= b.day_number();
    }
    friend bool operator>(const CalendarDate& a, const CalendarDate& b) { return b < a; }
    friend bool operator>=(const CalendarDate& a, const CalendarDate& b) { return b <= a; }

private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                     std::chrono::day{1}};
};

}  // namespace credreason
