#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tsboost/gbrt/params.hpp"
#include "tsboost/gbrt/training_data.hpp"
#include "tsboost/gbrt/tree.hpp"

namespace tsboost::gbrt {

/// Fitted ensemble: predict(x) = base_score + learning_rate · Σ_k tree_k(x).
class BoostedModel {
public:
    BoostedModel() = default;
    BoostedModel(std::size_t n_features, double base_score, double learning_rate, std::vector<RegressionTree> trees,
                 BoostParams params);

    std::size_t n_features() const { return n_features_; }
    double base_score() const { return base_score_; }
    double learning_rate() const { return learning_rate_; }
    const std::vector<RegressionTree>& trees() const { return trees_; }
    const BoostParams& params() const { return params_; }

    double predict(std::span<const double> row) const;
    std::vector<double> predict(const FeatureMatrix& x) const;

    /// Total split gain per feature.
    std::vector<double> feature_importance() const;

    /// Per-round diagnostics from fit (not serialized).
    std::vector<double> train_loss;  // training MSE after each round
    std::vector<double> eval_loss;   // eval-set MSE after each round, when an eval set was given
    std::size_t best_round = 0;      // tree count kept after early stopping

private:
    std::size_t n_features_ = 0;
    double base_score_ = 0.0;
    double learning_rate_ = 1.0;
    std::vector<RegressionTree> trees_;
    BoostParams params_;
};

struct EvalSet {
    FeatureMatrix x;
    std::span<const double> y;
};

/// Squared-error boosting: per round g = prediction − y, h = 1; each tree is
/// grown depth-wise maximizing the regularized second-order gain, leaves get
/// w* = −G/(H+λ), and predictions move by learning_rate · w*.
BoostedModel fit(const TrainingData& data, std::span<const double> y, const BoostParams& params,
                 const std::optional<EvalSet>& eval = std::nullopt);

/// Convenience overload over ragged-checked row vectors.
BoostedModel fit(const std::vector<std::vector<double>>& rows, std::span<const double> y, const BoostParams& params);

/// Gain of splitting a node with gradient/hessian sums (G, H) into (GL, HL)
/// and (G−GL, H−HL): ½[GL²/(HL+λ) + GR²/(HR+λ) − G²/(H+λ)] − γ.
double split_gain(double grad_left, double hess_left, double grad_total, double hess_total, double lambda,
                  double gamma);

/// −G/(H+λ).
double leaf_weight(double grad_sum, double hess_sum, double lambda);

}  // namespace tsboost::gbrt
