#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsboost/gbrt/booster.hpp"
#include "tsboost/series_frame.hpp"
#include "tsboost/windowing.hpp"

namespace tsboost {

/// Direct multi-step forecaster: engine k predicts step k+1 of the horizon
/// from the flattened lookup window. All engines see the same input rows.
class MultiOutputForecaster {
public:
    MultiOutputForecaster() = default;
    MultiOutputForecaster(WindowSpec spec, std::vector<std::string> covariate_names,
                          std::vector<gbrt::BoostedModel> engines);

    const WindowSpec& window() const { return spec_; }
    std::size_t horizon() const { return engines_.size(); }
    std::size_t n_covariates() const { return covariate_names_.size(); }
    const std::vector<std::string>& covariate_names() const { return covariate_names_; }
    const std::vector<gbrt::BoostedModel>& engines() const { return engines_; }

    /// `targets` holds the last w observed targets, `covariates` the matching
    /// w rows of M covariates (row-major). Returns [ŷ_{t+1}, …, ŷ_{t+h}].
    std::vector<double> forecast(std::span<const double> targets, std::span<const double> covariates,
                                 std::size_t series_id = 0) const;

    /// Forecasts for every row of an instance set, row-major rows × h.
    std::vector<double> predict_rows(const InstanceSet& rows) const;

    /// Copy with engine k replaced.
    MultiOutputForecaster with_engine(std::size_t k, gbrt::BoostedModel engine) const;

private:
    WindowSpec spec_;
    std::vector<std::string> covariate_names_;
    std::vector<gbrt::BoostedModel> engines_;
};

struct WbFitOptions {
    /// Eval windows for per-round validation loss and early stopping.
    const InstanceSet* eval = nullptr;
    /// When non-empty, engine k is fitted with n_trees = rounds_per_engine[k].
    std::vector<int> rounds_per_engine;
};

/// Builds the pooled windowed training set from `train` and fits h engines.
MultiOutputForecaster fit_wb(const SeriesFrame& train, const WindowSpec& spec, const gbrt::BoostParams& params,
                             const WbFitOptions& options = {});

/// Same, over a prebuilt training set.
MultiOutputForecaster fit_wb(const InstanceSet& train, const WindowSpec& spec,
                             std::vector<std::string> covariate_names, const gbrt::BoostParams& params,
                             const WbFitOptions& options = {});

/// Extra inputs for the point-wise forecaster.
enum class NaiveFallback {
    none,       // covariates only; M = 0 is an error
    time_index  // absolute time index as the sole input when M = 0
};

std::string_view to_string(NaiveFallback fallback);
std::optional<NaiveFallback> parse_naive_fallback(std::string_view text);

/// Point-wise forecaster: the target at time j is regressed on the covariates
/// at time j only, never on lagged targets.
class NaiveForecaster {
public:
    NaiveForecaster() = default;
    NaiveForecaster(std::vector<std::string> covariate_names, NaiveFallback fallback, gbrt::BoostedModel engine);

    std::size_t n_covariates() const { return covariate_names_.size(); }
    const std::vector<std::string>& covariate_names() const { return covariate_names_; }
    NaiveFallback fallback() const { return fallback_; }
    bool uses_time_index() const { return fallback_ == NaiveFallback::time_index && covariate_names_.empty(); }
    const gbrt::BoostedModel& engine() const { return engine_; }

    /// Input row for one time point.
    std::vector<double> input_row(std::span<const double> covariates, std::size_t time_index) const;

    /// One prediction per (series, time) of `frame`, laid out like its targets.
    std::vector<double> forecast(const SeriesFrame& frame) const;

    /// Predictions for explicit rows: `covariates` is rows × M, `time_index` has one entry per row.
    std::vector<double> predict_rows(std::span<const double> covariates, std::span<const std::size_t> time_index) const;

private:
    std::vector<std::string> covariate_names_;
    NaiveFallback fallback_ = NaiveFallback::time_index;
    gbrt::BoostedModel engine_;
};

/// Fits on every (series, time) point of `train`. `eval`, when given, supplies
/// per-round validation loss and early stopping.
NaiveForecaster fit_naive(const SeriesFrame& train, const gbrt::BoostParams& params,
                          NaiveFallback fallback = NaiveFallback::time_index, const SeriesFrame* eval = nullptr);

/// [last]·h.
std::vector<double> persistence(double last, std::size_t h);

/// Directory layout: manifest.json plus engine_<k>.json per engine.
void save_forecaster(const MultiOutputForecaster& f, const std::filesystem::path& dir);
void save_forecaster(const NaiveForecaster& f, const std::filesystem::path& dir);
MultiOutputForecaster load_multi_output(const std::filesystem::path& dir);
NaiveForecaster load_naive(const std::filesystem::path& dir);

}  // namespace tsboost
