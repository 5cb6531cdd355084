#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsboost::metrics {

// All functions pool every point they are given. Length mismatches throw
// DataError; degenerate denominators throw NumericalError.

double rmse(std::span<const double> y, std::span<const double> yhat);
double mae(std::span<const double> y, std::span<const double> yhat);
/// Σ|y−ŷ| / Σ|y|.
double wape(std::span<const double> y, std::span<const double> yhat);

struct MapeResult {
    double value = 0.0;
    std::size_t skipped = 0;  // points with y = 0
};
/// Mean of |y−ŷ|/|y| over points with y ≠ 0.
MapeResult mape(std::span<const double> y, std::span<const double> yhat);

/// √Σ(y−ŷ)² / √Σ(y−ȳ)².
double rse(std::span<const double> y, std::span<const double> yhat);

struct CorrResult {
    double value = 0.0;
    std::size_t skipped = 0;  // series with zero variance in y or ŷ
};
/// Mean over series of the Pearson correlation between actual and predicted.
/// y and ŷ hold n_series equal-length blocks, series-major.
CorrResult corr(std::span<const double> y, std::span<const double> yhat, std::size_t n_series);

enum class Metric { rmse, mae, wape, mape, rse, corr };

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view text);
std::string_view formula(Metric m);

/// Retained forecasts for one series, for plotting.
struct SeriesTrace {
    std::string series;
    std::vector<std::size_t> time_index;
    std::vector<double> actual;
    std::vector<double> predicted;
};

struct EvalReport {
    std::string dataset;
    std::string model;
    std::string config_digest;
    std::vector<std::pair<std::string, double>> values;  // in requested metric order
    std::vector<std::string> notes;
    std::vector<SeriesTrace> traces;  // empty unless predictions were retained

    std::optional<double> value(std::string_view metric) const;
};

/// Scores one model. y and ŷ hold n_series equal-length blocks. A metric whose
/// denominator degenerates is recorded as NaN with an explanatory note.
EvalReport evaluate(std::string dataset, std::string model, std::string config_digest, std::span<const double> y,
                    std::span<const double> yhat, std::size_t n_series, std::span<const Metric> metrics);

/// Aligned text table (one row per report) followed by the formula legend.
std::string render_table(std::span<const EvalReport> reports, std::span<const Metric> metrics);

/// Delimited rows: dataset,model,metric,value,config_digest with a header line.
std::string render_csv(std::span<const EvalReport> reports);

}  // namespace tsboost::metrics
