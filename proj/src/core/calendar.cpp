#include "tsboost/calendar.hpp"

#include <charconv>
#include <chrono>
#include <fmt/format.h>

namespace tsboost::calendar {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

template <typename T>
bool parse_fixed(std::string_view text, std::size_t pos, std::size_t width, T& out) {
    if (pos + width > text.size()) return false;
    for (std::size_t k = pos; k < pos + width; ++k) {
        if (text[k] < '0' || text[k] > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + width, out);
    return ec == std::errc{} && ptr == text.data() + pos + width;
}

}  // namespace

CivilTime to_civil(std::int64_t epoch_seconds) {
    using namespace std::chrono;
    const std::int64_t day_index = floor_div(epoch_seconds, kSecondsPerDay);
    const std::int64_t secs = epoch_seconds - day_index * kSecondsPerDay;
    const sys_days d{days{day_index}};
    const year_month_day ymd{d};
    CivilTime c;
    c.year = static_cast<int>(ymd.year());
    c.month = static_cast<unsigned>(ymd.month());
    c.day = static_cast<unsigned>(ymd.day());
    c.hour = static_cast<unsigned>(secs / 3600);
    c.minute = static_cast<unsigned>((secs % 3600) / 60);
    c.second = static_cast<unsigned>(secs % 60);
    c.weekday = weekday{d}.iso_encoding() - 1;
    return c;
}

std::int64_t from_civil(int y, unsigned m, unsigned d, unsigned hh, unsigned mm, unsigned ss) {
    using namespace std::chrono;
    const sys_days day_point{year{y} / month{m} / day{d}};
    return static_cast<std::int64_t>(day_point.time_since_epoch().count()) * kSecondsPerDay +
           static_cast<std::int64_t>(hh) * 3600 + static_cast<std::int64_t>(mm) * 60 + ss;
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
    int y = 0;
    unsigned mo = 0, d = 0, hh = 0, mi = 0, ss = 0;
    if (!parse_fixed(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || text[7] != '-' ||
        !parse_fixed(text, 5, 2, mo) || !parse_fixed(text, 8, 2, d)) {
        return std::nullopt;
    }
    std::size_t pos = 10;
    if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
        if (!parse_fixed(text, pos + 1, 2, hh) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
            !parse_fixed(text, pos + 4, 2, mi)) {
            return std::nullopt;
        }
        pos += 6;
        if (pos < text.size() && text[pos] == ':') {
            if (!parse_fixed(text, pos + 1, 2, ss)) return std::nullopt;
            pos += 3;
        }
    }
    if (pos < text.size() && text[pos] == 'Z') ++pos;
    if (pos != text.size()) return std::nullopt;

    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || hh > 23 || mi > 59 || ss > 59) return std::nullopt;
    return from_civil(y, mo, d, hh, mi, ss);
}

std::string format_iso8601(std::int64_t epoch_seconds) {
    const auto c = to_civil(epoch_seconds);
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}", c.year, c.month, c.day, c.hour, c.minute,
                       c.second);
}

std::optional<std::int64_t> parse_duration(std::string_view text) {
    std::int64_t count = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), count);
    if (ec != std::errc{} || count <= 0) return std::nullopt;
    const std::string_view unit(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
    std::int64_t scale = 0;
    if (unit.empty() || unit == "s" || unit == "sec") {
        scale = 1;
    } else if (unit == "min" || unit == "m") {
        scale = 60;
    } else if (unit == "h" || unit == "hour") {
        scale = 3600;
    } else if (unit == "d" || unit == "day") {
        scale = kSecondsPerDay;
    } else if (unit == "w" || unit == "week") {
        scale = 7 * kSecondsPerDay;
    } else {
        return std::nullopt;
    }
    return count * scale;
}

}  // namespace tsboost::calendar
