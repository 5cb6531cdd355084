#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace tsboost::gbrt {

enum class SplitMethod {
    exact,     // every midpoint between consecutive distinct values in the node
    histogram  // quantile-binned candidates, at most max_bins bins per feature
};

std::string_view to_string(SplitMethod method);
std::optional<SplitMethod> parse_split_method(std::string_view text);

/// Hyperparameters for squared-error boosting. Defaults are grid-search
/// starting points.
struct BoostParams {
    int n_trees = 500;
    double learning_rate = 0.05;  // shrinkage, (0, 1]
    int max_depth = 6;            // 0 = a single root leaf per tree
    double lambda = 1.0;          // L2 penalty on leaf weights
    double gamma = 0.0;           // minimum gain for a split
    double min_child_weight = 1.0;
    double subsample = 1.0;  // row fraction per tree, (0, 1]
    double colsample = 1.0;  // feature fraction per tree, (0, 1]
    std::uint64_t seed = 0;
    std::optional<double> base_score;  // unset: mean of the training targets

    SplitMethod split_method = SplitMethod::exact;
    int max_bins = 256;
    int early_stopping_rounds = 0;  // 0 disables; needs an eval set

    /// Throws ConfigError on any out-of-range field.
    void validate() const;
};

}  // namespace tsboost::gbrt
