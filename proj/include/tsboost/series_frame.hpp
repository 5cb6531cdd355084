#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsboost {

/// Raw storage for a SeriesFrame. Targets are laid out (series, time);
/// covariates (series, time, channel), so one time step's covariate vector
/// is contiguous.
struct FrameParts {
    std::size_t n_series = 0;
    std::size_t length = 0;
    std::size_t n_covariates = 0;
    std::vector<double> targets;
    std::vector<double> covariates;
    std::vector<std::string> series_names;
    std::vector<std::string> covariate_names;
    std::optional<std::vector<std::int64_t>> timestamps;  // epoch seconds, UTC
    std::int64_t sample_rate = 0;                         // seconds; 0 when unknown
    std::size_t time_offset = 0;  // absolute index of local t = 0
};

/// Aligned multi-series panel with a single target channel and M covariate
/// channels. Immutable once constructed; all transformations return new frames.
///
/// Missing observations are stored as NaN between ingestion and imputation.
/// Everything downstream of core_data calls require_finite() first.
class SeriesFrame {
public:
    SeriesFrame() = default;
    explicit SeriesFrame(FrameParts parts);

    std::size_t n_series() const { return parts_.n_series; }
    std::size_t length() const { return parts_.length; }
    std::size_t n_targets() const { return 1; }
    std::size_t n_covariates() const { return parts_.n_covariates; }
    std::size_t time_offset() const { return parts_.time_offset; }
    std::int64_t sample_rate() const { return parts_.sample_rate; }

    bool has_timestamps() const { return parts_.timestamps.has_value(); }
    const std::vector<std::int64_t>& timestamps() const;

    const std::vector<std::string>& series_names() const { return parts_.series_names; }
    const std::vector<std::string>& covariate_names() const { return parts_.covariate_names; }
    std::optional<std::size_t> covariate_index(const std::string& name) const;

    double target(std::size_t series, std::size_t t) const {
        return parts_.targets[series * parts_.length + t];
    }
    double covariate(std::size_t series, std::size_t t, std::size_t channel) const {
        return parts_.covariates[(series * parts_.length + t) * parts_.n_covariates + channel];
    }
    std::span<const double> target_series(std::size_t series) const;
    std::span<const double> covariate_row(std::size_t series, std::size_t t) const;

    const FrameParts& parts() const { return parts_; }

    bool has_missing() const;
    /// Throws DataError naming the first non-finite cell.
    void require_finite() const;

    /// Local time range [begin, end) as a new frame; time_offset advances accordingly.
    SeriesFrame slice(std::size_t begin, std::size_t end) const;
    SeriesFrame select_series(std::span<const std::size_t> indices) const;
    /// Appends `other` in time. Both must share n, M, and covariate names, and
    /// `other` must start exactly where this frame ends.
    SeriesFrame concat_time(const SeriesFrame& other) const;
    /// Same frame with replaced target values (size n·T).
    SeriesFrame with_targets(std::vector<double> targets) const;

private:
    FrameParts parts_;
};

}  // namespace tsboost
