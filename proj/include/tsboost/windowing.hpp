#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tsboost/series_frame.hpp"

namespace tsboost {

/// Which covariates follow the w lagged targets in a flattened input.
enum class CovariateMode {
    last_instance,  // X_t only: width w + M
    all_instances,  // X_{t-w+1} .. X_t: width w·(1 + M)
    targets_only    // no covariates: width w
};

std::string_view to_string(CovariateMode mode);
std::optional<CovariateMode> parse_covariate_mode(std::string_view text);

struct WindowSpec {
    std::size_t lookup = 1;   // w
    std::size_t horizon = 1;  // h
    CovariateMode mode = CovariateMode::last_instance;
    std::size_t stride = 1;
    bool include_series_id = false;  // appends the series index as a trailing feature

    void validate() const;
    std::size_t input_width(std::size_t n_covariates) const;
};

/// One supervised row: x = flattened lookup window ending at anchor_t,
/// y = the next h targets. anchor_t is an absolute time index.
struct FlatInstance {
    std::size_t series_id = 0;
    std::size_t anchor_t = 0;
    std::vector<double> x;
    std::vector<double> y;
};

/// Pooled instances in contiguous row-major storage (series-major, then
/// anchor-ascending).
class InstanceSet {
public:
    InstanceSet() = default;
    InstanceSet(std::size_t width, std::size_t horizon) : width_(width), horizon_(horizon) {}

    std::size_t size() const { return anchors_.size(); }
    bool empty() const { return anchors_.empty(); }
    std::size_t width() const { return width_; }
    std::size_t horizon() const { return horizon_; }

    std::span<const double> x(std::size_t row) const { return {x_.data() + row * width_, width_}; }
    std::span<const double> y(std::size_t row) const { return {y_.data() + row * horizon_, horizon_}; }
    std::size_t series_id(std::size_t row) const { return series_[row]; }
    std::size_t anchor(std::size_t row) const { return anchors_[row]; }
    FlatInstance instance(std::size_t row) const;

    /// Row-major n × width feature block and n × h target block.
    const std::vector<double>& features() const { return x_; }
    const std::vector<double>& targets() const { return y_; }
    /// Column k of the target block (the k-th horizon step of every row).
    std::vector<double> target_column(std::size_t k) const;

    void reserve(std::size_t rows);
    void resize(std::size_t rows);
    void set_row(std::size_t row, std::size_t series, std::size_t anchor, std::span<const double> x,
                 std::span<const double> y);

private:
    std::size_t width_ = 0;
    std::size_t horizon_ = 0;
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<std::size_t> series_;
    std::vector<std::size_t> anchors_;
};

/// Flattens one lookup window. `targets` holds the w lagged targets (oldest
/// first); `covariates` holds the same w rows of M covariates, row-major.
std::vector<double> flatten_window(std::span<const double> targets, std::span<const double> covariates,
                                   std::size_t n_covariates, const WindowSpec& spec);

/// Every window of the frame with anchor t in [w-1, T-h-1], stepping by stride,
/// pooled over all series.
InstanceSet make_training_set(const SeriesFrame& frame, const WindowSpec& spec);

struct TestWindows {
    InstanceSet instances;
    std::size_t dropped_points = 0;  // trailing test points no full h-block covers
};

/// Non-overlapping h-blocks tiling `test`; the first anchor is the last point
/// of `train_tail`. Lookup windows may reach back into `train_tail` and use the
/// observed test values of earlier blocks. `train_tail` must end where `test` starts.
TestWindows make_test_set(const SeriesFrame& train_tail, const SeriesFrame& test, const WindowSpec& spec);

}  // namespace tsboost
