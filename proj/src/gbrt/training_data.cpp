#include "tsboost/gbrt/training_data.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "tsboost/errors.hpp"

namespace tsboost::gbrt {

FeatureMatrix::FeatureMatrix(std::span<const double> values, std::size_t rows, std::size_t cols)
    : values_(values), rows_(rows), cols_(cols) {
    if (values.size() != rows * cols) {
        throw DataError(fmt::format("feature matrix holds {} values, expected {} x {}", values.size(), rows, cols));
    }
}

double midpoint_threshold(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return (lo < mid && mid <= hi) ? mid : hi;
}

namespace {

// Cut points for one feature: midpoints between consecutive distinct values,
// thinned to max_bins − 1 quantile positions when there are too many.
std::vector<double> compute_cuts(std::span<const double> column, std::span<const std::uint32_t> order, int max_bins) {
    std::vector<double> uniq;
    std::vector<std::size_t> counts;
    for (auto r : order) {
        const double v = column[r];
        if (uniq.empty() || v != uniq.back()) {
            uniq.push_back(v);
            counts.push_back(1);
        } else {
            ++counts.back();
        }
    }
    std::vector<double> cuts;
    if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
        for (std::size_t k = 1; k < uniq.size(); ++k) cuts.push_back(midpoint_threshold(uniq[k - 1], uniq[k]));
        return cuts;
    }
    const double total = static_cast<double>(order.size());
    std::size_t cumulative = 0;
    int next_q = 1;
    for (std::size_t k = 0; k + 1 < uniq.size() && next_q < max_bins; ++k) {
        cumulative += counts[k];
        const double target = total * next_q / max_bins;
        if (static_cast<double>(cumulative) >= target) {
            cuts.push_back(midpoint_threshold(uniq[k], uniq[k + 1]));
            while (next_q < max_bins && static_cast<double>(cumulative) >= total * next_q / max_bins) ++next_q;
        }
    }
    return cuts;
}

}  // namespace

TrainingData::TrainingData(const FeatureMatrix& x, SplitMethod method, int max_bins)
    : rows_(x.rows()), cols_(x.cols()), method_(method), max_bins_(max_bins) {
    if (rows_ == 0) throw DataError("training data has no rows");
    if (cols_ == 0) throw DataError("training data has no features");
    if (rows_ > std::numeric_limits<std::uint32_t>::max()) throw DataError("too many training rows");
    if (method == SplitMethod::histogram && (max_bins < 2 || max_bins > 65536)) {
        throw ConfigError(fmt::format("max_bins = {} outside [2, 65536]", max_bins));
    }

    columns_.resize(rows_ * cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto row = x.row(r);
        for (std::size_t f = 0; f < cols_; ++f) {
            if (!std::isfinite(row[f])) {
                throw DataError(fmt::format("non-finite feature value at row {}, feature {}", r, f));
            }
            columns_[f * rows_ + r] = row[f];
        }
    }

    sorted_.resize(rows_ * cols_);
    if (method == SplitMethod::exact) sorted_values_.resize(rows_ * cols_);
    if (method == SplitMethod::histogram) {
        bins_.resize(rows_ * cols_);
        cuts_.resize(cols_);
    }
    const auto n_cols = static_cast<std::ptrdiff_t>(cols_);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t fi = 0; fi < n_cols; ++fi) {
        const auto f = static_cast<std::size_t>(fi);
        auto col = column(f);
        auto order = std::span<std::uint32_t>(sorted_.data() + f * rows_, rows_);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
        if (method == SplitMethod::exact) {
            auto* sv = sorted_values_.data() + f * rows_;
            for (std::size_t i = 0; i < rows_; ++i) sv[i] = col[order[i]];
        }
        if (method == SplitMethod::histogram) {
            cuts_[f] = compute_cuts(col, order, max_bins);
            const auto& cuts = cuts_[f];
            auto* codes = bins_.data() + f * rows_;
            for (std::size_t r = 0; r < rows_; ++r) {
                codes[r] = static_cast<std::uint16_t>(std::upper_bound(cuts.begin(), cuts.end(), col[r]) - cuts.begin());
            }
        }
    }
    if (method == SplitMethod::histogram) {
        sorted_.clear();
        sorted_.shrink_to_fit();
    }
}

std::span<const std::uint32_t> TrainingData::sorted_rows(std::size_t feature) const {
    if (method_ != SplitMethod::exact) throw ConfigError("sorted row order exists only for exact split finding");
    return {sorted_.data() + feature * rows_, rows_};
}

std::span<const double> TrainingData::sorted_values(std::size_t feature) const {
    if (method_ != SplitMethod::exact) throw ConfigError("sorted values exist only for exact split finding");
    return {sorted_values_.data() + feature * rows_, rows_};
}

std::span<const std::uint16_t> TrainingData::bins(std::size_t feature) const {
    if (method_ != SplitMethod::histogram) throw ConfigError("bin codes exist only for histogram split finding");
    return {bins_.data() + feature * rows_, rows_};
}

}  // namespace tsboost::gbrt
