#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spoofguard {

/// Nanoseconds since the Unix epoch.
using Timestamp = std::int64_t;

inline constexpr Timestamp kNanosPerSecond = 1'000'000'000;

constexpr Timestamp seconds_to_ns(std::int64_t s) { return s * kNanosPerSecond; }

/// Half-open time interval [begin, end).
struct TimeRange {
    Timestamp begin = 0;
    Timestamp end = 0;

    [[nodiscard]] bool contains(Timestamp t) const { return t >= begin && t < end; }
    [[nodiscard]] Timestamp duration() const { return end - begin; }
    bool operator==(const TimeRange&) const = default;
};

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
    Data,          // malformed or inconsistent input files
    Config,        // invalid settings or scenario
    Untrainable,   // event has too few positives for the requested stage
    Incompatible,  // bundle does not match the data or the request
    Coverage,      // sensor data does not cover the evidence window
    Invalid,       // precondition violated by the caller
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace spoofguard
