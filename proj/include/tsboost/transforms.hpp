#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsboost/series_frame.hpp"

namespace tsboost {

enum class ImputePolicy {
    forward_fill,  // last seen value; leading gaps take the first seen value
    zero,
    drop_leading  // trim leading steps until every channel has been observed, then forward fill
};

std::string_view to_string(ImputePolicy policy);
std::optional<ImputePolicy> parse_impute_policy(std::string_view text);

/// Fills every NaN in targets and covariates. Throws DataError when a
/// (series, channel) pair has no observed value at all.
SeriesFrame impute_missing(const SeriesFrame& frame, ImputePolicy policy);

enum class TimeFeature { hour_of_day, day_of_week, day_of_month, month, is_weekend };

std::string_view to_string(TimeFeature feature);
std::optional<TimeFeature> parse_time_feature(std::string_view text);

/// Appends one ordinal covariate channel per requested calendar feature,
/// named after the feature. Features already present are not duplicated.
/// day_of_week counts from Monday = 0.
SeriesFrame derive_time_covariates(const SeriesFrame& frame, std::span<const TimeFeature> features);

/// Per-series affine target scaling fitted on a reference frame.
class Standardizer {
public:
    Standardizer() = default;
    /// Mean and population standard deviation per series; a zero deviation is replaced by 1.
    static Standardizer fit(const SeriesFrame& reference);

    SeriesFrame transform(const SeriesFrame& frame) const;
    double inverse(std::size_t series, double value) const { return value * scale_[series] + mean_[series]; }
    bool empty() const { return mean_.empty(); }

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
};

}  // namespace tsboost
