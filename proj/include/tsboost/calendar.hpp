#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tsboost::calendar {

/// Broken-down UTC calendar fields of an epoch-seconds instant.
struct CivilTime {
    int year = 1970;
    unsigned month = 1;  // 1..12
    unsigned day = 1;    // 1..31
    unsigned hour = 0;
    unsigned minute = 0;
    unsigned second = 0;
    unsigned weekday = 0;  // 0 = Monday .. 6 = Sunday
};

CivilTime to_civil(std::int64_t epoch_seconds);
std::int64_t from_civil(int year, unsigned month, unsigned day, unsigned hour = 0, unsigned minute = 0,
                        unsigned second = 0);

/// Accepts `YYYY-MM-DD`, optionally followed by `T` or a space and `HH:MM[:SS]`,
/// and an optional trailing `Z`. Returns nullopt on anything else.
std::optional<std::int64_t> parse_iso8601(std::string_view text);
std::string format_iso8601(std::int64_t epoch_seconds);

/// Durations such as `1h`, `5min`, `10min`, `1d`, `30s`, `1w`, or a bare
/// number of seconds. Returns nullopt when unparseable or non-positive.
std::optional<std::int64_t> parse_duration(std::string_view text);

}  // namespace tsboost::calendar
