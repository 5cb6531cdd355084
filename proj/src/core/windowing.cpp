#include "tsboost/windowing.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <iostream>

#include "tsboost/errors.hpp"

namespace tsboost {

std::string_view to_string(CovariateMode mode) {
    switch (mode) {
        case CovariateMode::last_instance: return "last_instance";
        case CovariateMode::all_instances: return "all_instances";
        case CovariateMode::targets_only: return "targets_only";
    }
    return "?";
}

std::optional<CovariateMode> parse_covariate_mode(std::string_view text) {
    for (auto m : {CovariateMode::last_instance, CovariateMode::all_instances, CovariateMode::targets_only})
        if (to_string(m) == text) return m;
    return std::nullopt;
}

void WindowSpec::validate() const {
    if (lookup < 1 || horizon < 1 || stride < 1) {
        throw ConfigError(fmt::format("window spec needs w, h, stride >= 1 (got w={}, h={}, stride={})", lookup,
                                      horizon, stride));
    }
}

std::size_t WindowSpec::input_width(std::size_t M) const {
    std::size_t width = lookup;
    switch (mode) {
        case CovariateMode::last_instance: width += M; break;
        case CovariateMode::all_instances: width += lookup * M; break;
        case CovariateMode::targets_only: break;
    }
    return width + (include_series_id ? 1 : 0);
}

FlatInstance InstanceSet::instance(std::size_t row) const {
    FlatInstance out;
    out.series_id = series_[row];
    out.anchor_t = anchors_[row];
    auto xs = x(row);
    auto ys = y(row);
    out.x.assign(xs.begin(), xs.end());
    out.y.assign(ys.begin(), ys.end());
    return out;
}

std::vector<double> InstanceSet::target_column(std::size_t k) const {
    std::vector<double> col(size());
    for (std::size_t r = 0; r < size(); ++r) col[r] = y_[r * horizon_ + k];
    return col;
}

void InstanceSet::reserve(std::size_t rows) {
    x_.reserve(rows * width_);
    y_.reserve(rows * horizon_);
    series_.reserve(rows);
    anchors_.reserve(rows);
}

void InstanceSet::resize(std::size_t rows) {
    x_.resize(rows * width_);
    y_.resize(rows * horizon_);
    series_.resize(rows);
    anchors_.resize(rows);
}

void InstanceSet::set_row(std::size_t row, std::size_t series, std::size_t anchor, std::span<const double> x,
                          std::span<const double> y) {
    std::copy(x.begin(), x.end(), x_.begin() + static_cast<std::ptrdiff_t>(row * width_));
    std::copy(y.begin(), y.end(), y_.begin() + static_cast<std::ptrdiff_t>(row * horizon_));
    series_[row] = series;
    anchors_[row] = anchor;
}

std::vector<double> flatten_window(std::span<const double> targets, std::span<const double> covariates,
                                   std::size_t M, const WindowSpec& spec) {
    const auto w = spec.lookup;
    if (targets.size() != w) {
        throw DataError(fmt::format("window has {} target rows, expected w = {}", targets.size(), w));
    }
    if (covariates.size() != w * M) {
        throw DataError(fmt::format("window has {} covariate values, expected w·M = {}", covariates.size(), w * M));
    }
    std::vector<double> out(targets.begin(), targets.end());
    switch (spec.mode) {
        case CovariateMode::last_instance:
            out.insert(out.end(), covariates.end() - static_cast<std::ptrdiff_t>(M), covariates.end());
            break;
        case CovariateMode::all_instances: out.insert(out.end(), covariates.begin(), covariates.end()); break;
        case CovariateMode::targets_only: break;
    }
    return out;
}

namespace {

// Writes the window of `frame` (series i) ending at local index `t` into `out`.
void write_window(const SeriesFrame& frame, std::size_t i, std::size_t t, const WindowSpec& spec, double* out) {
    const auto w = spec.lookup;
    const auto first = t + 1 - w;
    auto y = frame.target_series(i);
    std::copy(y.begin() + static_cast<std::ptrdiff_t>(first), y.begin() + static_cast<std::ptrdiff_t>(t + 1), out);
    out += w;
    switch (spec.mode) {
        case CovariateMode::last_instance: {
            auto row = frame.covariate_row(i, t);
            out = std::copy(row.begin(), row.end(), out);
            break;
        }
        case CovariateMode::all_instances:
            for (std::size_t s = first; s <= t; ++s) {
                auto row = frame.covariate_row(i, s);
                out = std::copy(row.begin(), row.end(), out);
            }
            break;
        case CovariateMode::targets_only: break;
    }
    if (spec.include_series_id) *out = static_cast<double>(i);
}

}  // namespace

InstanceSet make_training_set(const SeriesFrame& frame, const WindowSpec& spec) {
    spec.validate();
    const auto T = frame.length();
    const auto w = spec.lookup;
    const auto h = spec.horizon;
    if (T < w + h) {
        throw DataError(fmt::format("series length {} is shorter than w + h = {}", T, w + h));
    }
    const auto per_series = (T - w - h) / spec.stride + 1;
    const auto n = frame.n_series();
    const auto width = spec.input_width(frame.n_covariates());

    InstanceSet set(width, h);
    set.resize(n * per_series);
    std::vector<double> x(width);
#pragma omp parallel for firstprivate(x) schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        auto y = frame.target_series(i);
        for (std::size_t k = 0; k < per_series; ++k) {
            const auto t = w - 1 + k * spec.stride;
            write_window(frame, i, t, spec, x.data());
            set.set_row(i * per_series + k, i, frame.time_offset() + t, x,
                        y.subspan(t + 1, h));
        }
    }
    return set;
}

TestWindows make_test_set(const SeriesFrame& train_tail, const SeriesFrame& test, const WindowSpec& spec) {
    spec.validate();
    const auto w = spec.lookup;
    const auto h = spec.horizon;
    if (train_tail.length() < w) {
        throw DataError(
            fmt::format("only {} points precede the test region, the lookup window needs {}", train_tail.length(), w));
    }
    const SeriesFrame joined = train_tail.concat_time(test);
    const auto tau = test.length();
    const auto blocks = tau / h;

    TestWindows out;
    out.dropped_points = tau - blocks * h;
    if (out.dropped_points > 0) {
        std::clog << fmt::format("warning: test length {} is not a multiple of h = {}; dropping the final {} points\n",
                                 tau, h, out.dropped_points);
    }
    const auto n = joined.n_series();
    const auto width = spec.input_width(joined.n_covariates());
    out.instances = InstanceSet(width, h);
    out.instances.resize(n * blocks);
    std::vector<double> x(width);
    for (std::size_t i = 0; i < n; ++i) {
        auto y = joined.target_series(i);
        for (std::size_t b = 0; b < blocks; ++b) {
            const auto t = train_tail.length() - 1 + b * h;
            write_window(joined, i, t, spec, x.data());
            out.instances.set_row(i * blocks + b, i, joined.time_offset() + t, x, y.subspan(t + 1, h));
        }
    }
    return out;
}

}  // namespace tsboost
