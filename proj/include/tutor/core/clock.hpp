#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>

#include "tutor/core/types.hpp"

namespace tutor {

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimePoint now() = 0;
};

class SystemClock final : public Clock {
public:
    TimePoint now() override { return std::chrono::system_clock::now(); }
};

// Deterministic clock for scripted runs: every read advances by `step`.
class SteppingClock final : public Clock {
public:
    SteppingClock(TimePoint start, std::chrono::milliseconds step) : next_(start), step_(step) {}

    TimePoint now() override {
        std::lock_guard lock(mutex_);
        auto t = next_;
        next_ += step_;
        return t;
    }

private:
    std::mutex mutex_;
    TimePoint next_;
    std::chrono::milliseconds step_;
};

// ISO-8601 UTC with millisecond precision, e.g. 2024-05-01T10:00:00.250Z.
std::string format_iso8601(TimePoint t);
TimePoint parse_iso8601(const std::string& s);

std::int64_t millis_between(TimePoint from, TimePoint to);

}  // namespace tutor
