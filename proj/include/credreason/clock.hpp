#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "credreason/date.hpp"

namespace credreason {

// Milliseconds since the Unix epoch.
using EpochMillis = std::int64_t;

// Time source for runs. Pipelines take a Clock so that elapsed-time fields and
// recency windows are reproducible under test.
class Clock {
public:
    virtual ~Clock() = default;

    virtual EpochMillis now_millis() = 0;

    // ISO-8601 UTC timestamp of now_millis(). Consumes one tick.
    std::string now_iso8601();

    CalendarDate today();

    static std::string iso8601(EpochMillis millis);
    static CalendarDate date_of(EpochMillis millis);
};

class WallClock final : public Clock {
public:
    EpochMillis now_millis() override;
};

// Starts at a fixed instant and advances by a constant step on every read.
// Two runs with the same configuration observe identical timestamps.
class FixedClock final : public Clock {
public:
    explicit FixedClock(EpochMillis start_millis = 1735689600000 /* 2025-01-01T00:00:00Z */,
                        EpochMillis step_millis = 1000)
        : next_(start_millis), step_(step_millis) {}

    EpochMillis now_millis() override {
        EpochMillis value = next_;
        next_ += step_;
        return value;
    }

private:
    EpochMillis next_;
    EpochMillis step_;
};

}  // namespace credreason
