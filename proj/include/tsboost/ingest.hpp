#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsboost/series_frame.hpp"

namespace tsboost {

enum class Layout {
    wide,  // one target column per series, shared covariate columns
    long_  // explicit series-id column, one target column
};

enum class TimestampFormat { iso8601, epoch_seconds };

/// What happens to a header column that no explicit list mentions.
enum class UnlistedRole { reject, ignore, target, covariate };

/// Calendar columns that together form the timestamp (e.g. year, month, day, hour
/// columns in the UCI air-quality files). Unset parts default to their minimum.
struct CalendarColumns {
    std::string year;
    std::string month;
    std::string day;
    std::string hour;
    bool any() const { return !year.empty(); }
};

/// Column-role mapping for a delimited file. Every header column must end up
/// with exactly one role.
struct Schema {
    Layout layout = Layout::wide;
    char delimiter = ',';

    std::string timestamp_column;  // empty: none
    TimestampFormat timestamp_format = TimestampFormat::iso8601;
    CalendarColumns calendar_columns;
    /// Synthesized timeline for files without timestamps (epoch seconds).
    std::optional<std::int64_t> start;
    /// Seconds between steps. 0 infers it from the first two rows.
    std::int64_t sample_rate = 0;

    std::vector<std::string> target_columns;
    std::vector<std::string> covariate_columns;
    std::vector<std::string> onehot_columns;  // categorical, expanded to 0/1 channels
    std::vector<std::string> ignore_columns;
    std::string series_id_column;  // long layout only
    UnlistedRole unlisted = UnlistedRole::reject;

    std::vector<std::string> missing_tokens = {"", "NA", "NaN", "nan", "null"};
};

/// Reads a delimited text file with a header row. Missing tokens become NaN;
/// run impute_missing before modelling.
SeriesFrame load_delimited(const std::filesystem::path& path, const Schema& schema);

/// Writes the canonical long layout: `series,timestamp,target,<covariates…>`
/// (timestamp omitted when the frame has none). Values use shortest
/// round-trip decimal form; missing values are written as `NA`.
void write_delimited(const SeriesFrame& frame, const std::filesystem::path& path);

/// Schema that reads back what write_delimited produced.
Schema canonical_schema(const SeriesFrame& frame);

}  // namespace tsboost
