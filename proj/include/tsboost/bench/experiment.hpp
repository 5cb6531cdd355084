#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsboost/bench/config.hpp"
#include "tsboost/metrics.hpp"

namespace tsboost::bench {

/// Loads the dataset, keeps the configured series, imputes, and applies the
/// covariate plan.
SeriesFrame prepare_frame(const ExperimentConfig& config);

struct Trial {
    std::size_t grid_index = 0;
    double score = 0.0;                   // primary metric on the validation windows
    std::vector<int> rounds_per_engine;  // best rounds when early stopping is on
};

struct Selection {
    ModelKind model = ModelKind::wb;
    std::size_t grid_index = 0;
    gbrt::BoostParams params;
    std::vector<int> rounds_per_engine;  // empty: use params.n_trees
    std::vector<Trial> trials;
};

/// Grid search for every trainable model. `prefix` is the frame up to t'; the
/// last split.valid points of it are the validation region. The test region
/// is not an argument, so it cannot influence selection.
std::vector<Selection> tune(const ExperimentConfig& config, const SeriesFrame& prefix);

/// Absolute time-index ranges that prove the final model never saw a test point.
struct ProtocolAudit {
    std::size_t train_end = 0;           // t': training uses indices < train_end
    std::size_t last_train_target = 0;   // largest index any final training row consumed
    std::size_t first_test_target = 0;   // smallest predicted index
    std::size_t last_test_target = 0;
    std::size_t test_windows = 0;        // per series
    std::size_t dropped_points = 0;
};

struct RunResult {
    std::vector<metrics::EvalReport> reports;  // one per model, in models.run order
    std::vector<Selection> selections;
    ProtocolAudit audit;
    double wall_seconds = 0.0;
};

/// Grid search on the validation split, retraining on all of [0, t'), and
/// scoring on the tiled test region.
RunResult run_experiment(const ExperimentConfig& config);

/// report.txt, report.csv, selection.json, manifest.json and, when
/// predictions are retained, predictions.csv.
void write_run_outputs(const ExperimentConfig& config, const RunResult& result);

/// Human-readable report: metric table, notes, selections and formula legend.
std::string render_report(const ExperimentConfig& config, const RunResult& result);
std::string render_selection_json(const std::vector<Selection>& selections);

struct MetricDelta {
    std::string metric;
    double a = 0.0;
    double b = 0.0;
    double relative = 0.0;  // (b − a) / a
    std::string verdict;
};

/// Per-metric relative change from report a to report b.
std::vector<MetricDelta> compare(const metrics::EvalReport& a, const metrics::EvalReport& b);
std::string render_comparison(const metrics::EvalReport& a, const metrics::EvalReport& b,
                              const std::vector<MetricDelta>& deltas);

/// Reads report.csv rows back into reports (values only).
std::vector<metrics::EvalReport> read_report_csv(const std::filesystem::path& path);
/// Attaches the traces in predictions.csv to matching reports.
void read_predictions_csv(const std::filesystem::path& path, std::vector<metrics::EvalReport>& reports);

/// Writes `<dataset>__<model>__<series>.csv` (time_index,actual,predicted) per
/// retained trace. Returns the number of files written.
std::size_t emit_plot_data(std::span<const metrics::EvalReport> reports, const std::filesystem::path& dir);

}  // namespace tsboost::bench
