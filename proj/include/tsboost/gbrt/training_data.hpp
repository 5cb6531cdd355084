#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tsboost/gbrt/params.hpp"

namespace tsboost::gbrt {

/// Non-owning row-major matrix view.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::span<const double> values, std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::span<const double> row(std::size_t r) const { return values_.subspan(r * cols_, cols_); }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

private:
    std::span<const double> values_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
};

/// Column-major copy of a feature matrix plus the per-feature index the chosen
/// split method scans: a value-sorted row order (exact) or bin codes with their
/// cut points (histogram). Built once and shared by every model fitted on the
/// same rows, e.g. the h horizon engines of a multi-output forecaster.
class TrainingData {
public:
    TrainingData(const FeatureMatrix& x, SplitMethod method, int max_bins = 256);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    SplitMethod method() const { return method_; }
    int max_bins() const { return max_bins_; }

    double value(std::size_t row, std::size_t feature) const { return columns_[feature * rows_ + row]; }
    std::span<const double> column(std::size_t feature) const { return {columns_.data() + feature * rows_, rows_}; }

    /// Rows of `feature` in ascending value order (ties by row index). Exact mode only.
    std::span<const std::uint32_t> sorted_rows(std::size_t feature) const;
    /// column(feature) permuted by sorted_rows(feature).
    std::span<const double> sorted_values(std::size_t feature) const;

    /// Histogram mode only. bin(row) = number of cuts <= value, so splitting
    /// after bin b is the rule x < cuts[b].
    std::span<const std::uint16_t> bins(std::size_t feature) const;
    const std::vector<double>& cuts(std::size_t feature) const { return cuts_[feature]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    SplitMethod method_;
    int max_bins_;
    std::vector<double> columns_;
    std::vector<std::uint32_t> sorted_;
    std::vector<double> sorted_values_;
    std::vector<std::uint16_t> bins_;
    std::vector<std::vector<double>> cuts_;
};

/// Split threshold strictly above `lo` and at most `hi` (lo < hi), as close to
/// the midpoint as floating point allows.
double midpoint_threshold(double lo, double hi);

}  // namespace tsboost::gbrt
