#include "tsboost/gbrt/booster.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <random>

#include "tsboost/errors.hpp"

namespace tsboost::gbrt {

double split_gain(double grad_left, double hess_left, double grad_total, double hess_total, double lambda,
                  double gamma) {
    const double grad_right = grad_total - grad_left;
    const double hess_right = hess_total - hess_left;
    return 0.5 * (grad_left * grad_left / (hess_left + lambda) + grad_right * grad_right / (hess_right + lambda) -
                  grad_total * grad_total / (hess_total + lambda)) -
           gamma;
}

double leaf_weight(double grad_sum, double hess_sum, double lambda) {
    const double denom = hess_sum + lambda;
    if (!(denom > 0.0)) throw NumericalError("leaf weight undefined: hessian sum plus lambda is not positive");
    return -grad_sum / denom;
}

BoostedModel::BoostedModel(std::size_t n_features, double base_score, double learning_rate,
                           std::vector<RegressionTree> trees, BoostParams params)
    : n_features_(n_features),
      base_score_(base_score),
      learning_rate_(learning_rate),
      trees_(std::move(trees)),
      params_(std::move(params)) {
    for (const auto& t : trees_) {
        for (const auto& nd : t.nodes()) {
            if (!nd.is_leaf() && static_cast<std::size_t>(nd.feature) >= n_features_) {
                throw DataError(fmt::format("tree splits on feature {} but the model has {} features", nd.feature,
                                            n_features_));
            }
        }
    }
}

double BoostedModel::predict(std::span<const double> row) const {
    if (row.size() != n_features_) {
        throw DataError(fmt::format("prediction row has {} features, model expects {}", row.size(), n_features_));
    }
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(row);
    return base_score_ + learning_rate_ * sum;
}

std::vector<double> BoostedModel::predict(const FeatureMatrix& x) const {
    if (x.cols() != n_features_ && x.rows() > 0) {
        throw DataError(fmt::format("prediction rows have {} features, model expects {}", x.cols(), n_features_));
    }
    std::vector<double> out(x.rows());
    const auto rows = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) out[static_cast<std::size_t>(r)] = predict(x.row(static_cast<std::size_t>(r)));
    return out;
}

std::vector<double> BoostedModel::feature_importance() const {
    std::vector<double> gain(n_features_, 0.0);
    for (const auto& t : trees_)
        for (const auto& nd : t.nodes())
            if (!nd.is_leaf()) gain[static_cast<std::size_t>(nd.feature)] += nd.gain;
    return gain;
}

namespace {

struct Candidate {
    double gain = 0.0;
    std::int32_t feature = -1;
    double threshold = 0.0;
};

// Grows one tree depth-wise. All active nodes of a level are split in one pass
// over each feature, so a level costs O(rows · features) in exact mode.
class TreeBuilder {
public:
    TreeBuilder(const TrainingData& data, std::span<const double> grad, std::span<const double> hess,
                const BoostParams& params)
        : data_(data), grad_(grad), hess_(hess), params_(params), node_of_row_(data.rows(), -1) {}

    RegressionTree build(std::span<const std::uint32_t> rows, std::span<const std::size_t> features) {
        RegressionTree tree;
        grad_sum_.assign(1, 0.0);
        hess_sum_.assign(1, 0.0);
        std::fill(node_of_row_.begin(), node_of_row_.end(), -1);
        for (auto r : rows) {
            node_of_row_[r] = 0;
            grad_sum_[0] += grad_[r];
            hess_sum_[0] += hess_[r];
        }

        std::vector<std::int32_t> active{0};
        for (int depth = 0; depth < params_.max_depth && !active.empty(); ++depth) {
            slot_of_node_.assign(tree.size(), -1);
            for (std::size_t s = 0; s < active.size(); ++s) slot_of_node_[static_cast<std::size_t>(active[s])] = static_cast<std::int32_t>(s);

            const auto best = data_.method() == SplitMethod::exact ? find_exact(rows, features, active)
                                                                   : find_histogram(rows, features, active);

            std::vector<std::int32_t> next;
            std::vector<std::int32_t> split_feature(tree.size(), -1);
            for (std::size_t s = 0; s < active.size(); ++s) {
                const auto& c = best[s];
                if (c.feature < 0) continue;
                const auto node = active[s];
                const auto left = tree.add_node(TreeNode{});
                const auto right = tree.add_node(TreeNode{});
                auto& nd = tree.node(static_cast<std::size_t>(node));
                nd.feature = c.feature;
                nd.threshold = c.threshold;
                nd.gain = c.gain;
                nd.left = left;
                nd.right = right;
                next.push_back(left);
                next.push_back(right);
                split_feature[static_cast<std::size_t>(node)] = c.feature;
            }
            if (next.empty()) break;

            grad_sum_.resize(tree.size(), 0.0);
            hess_sum_.resize(tree.size(), 0.0);
            for (auto r : rows) {
                const auto node = node_of_row_[r];
                if (node < 0 || split_feature[static_cast<std::size_t>(node)] < 0) continue;
                const auto& nd = tree.nodes()[static_cast<std::size_t>(node)];
                const auto child = data_.value(r, static_cast<std::size_t>(nd.feature)) < nd.threshold ? nd.left : nd.right;
                node_of_row_[r] = child;
                grad_sum_[static_cast<std::size_t>(child)] += grad_[r];
                hess_sum_[static_cast<std::size_t>(child)] += hess_[r];
            }
            active = std::move(next);
        }

        for (std::size_t k = 0; k < tree.size(); ++k) {
            auto& nd = tree.node(k);
            nd.cover = hess_sum_[k];
            if (nd.is_leaf()) nd.weight = leaf_weight(grad_sum_[k], hess_sum_[k], params_.lambda);
        }
        return tree;
    }

private:
    bool admissible(double hess_left, double hess_right) const {
        return hess_left > 0.0 && hess_right > 0.0 && hess_left >= params_.min_child_weight &&
               hess_right >= params_.min_child_weight;
    }

    // Features are scanned independently and reduced in ascending feature order
    // with a strict comparison: ties keep the lowest feature, then the lowest threshold.
    static std::vector<Candidate> reduce(std::vector<std::vector<Candidate>>& per_feature, std::size_t slots) {
        std::vector<Candidate> best(slots);
        for (const auto& cand : per_feature)
            for (std::size_t s = 0; s < slots; ++s)
                if (cand[s].gain > best[s].gain) best[s] = cand[s];
        return best;
    }

    std::vector<Candidate> find_exact(std::span<const std::uint32_t> rows, std::span<const std::size_t> features,
                                      const std::vector<std::int32_t>& active) {
        // Per node: running left sums, the previous value, and the best split so far
        // kept as the two values it falls between.
        struct Scan {
            double grad_left = 0.0;
            double hess_left = 0.0;
            double last = 0.0;
            double bar = 0.0;  // smallest child score that can still win
            double gain = 0.0;
            double lo = 0.0;
            double hi = 0.0;
        };
        const auto slots = active.size();
        // One record per row so the sorted scans below touch a single random location per step.
        row_state_.assign(data_.rows(), RowState{});
        for (auto r : rows) {
            const auto node = node_of_row_[r];
            if (node < 0) continue;
            row_state_[r] = RowState{grad_[r], hess_[r], slot_of_node_[static_cast<std::size_t>(node)]};
        }
        std::vector<double> g_tot(slots), h_tot(slots), parent(slots);
        for (std::size_t s = 0; s < slots; ++s) {
            g_tot[s] = grad_sum_[static_cast<std::size_t>(active[s])];
            h_tot[s] = hess_sum_[static_cast<std::size_t>(active[s])];
            parent[s] = g_tot[s] * g_tot[s] / (h_tot[s] + params_.lambda);
        }
        const double lambda = params_.lambda;
        const double gamma = params_.gamma;

        std::vector<std::vector<Candidate>> per_feature(features.size(), std::vector<Candidate>(slots));
        const auto n_feat = static_cast<std::ptrdiff_t>(features.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t fi = 0; fi < n_feat; ++fi) {
            const auto f = features[static_cast<std::size_t>(fi)];
            std::vector<Scan> scan(slots);
            for (std::size_t s = 0; s < slots; ++s) scan[s].bar = parent[s] + 2.0 * gamma;
            const auto order = data_.sorted_rows(f);
            const auto values = data_.sorted_values(f);
            for (std::size_t i = 0; i < order.size(); ++i) {
                const auto& rs = row_state_[order[i]];
                if (rs.slot < 0) continue;
                const auto slot = static_cast<std::size_t>(rs.slot);
                auto& st = scan[slot];
                const double v = values[i];
                // admissible() fails while the left side is empty, so `last` needs no sentinel.
                if (v != st.last && admissible(st.hess_left, h_tot[slot] - st.hess_left)) {
                    // Division-free screen. The slack is far wider than rounding, so any split that
                    // split_gain would rank higher still reaches the exact comparison.
                    const double gl = st.grad_left;
                    const double gr = g_tot[slot] - gl;
                    const double dl = st.hess_left + lambda;
                    const double dr = h_tot[slot] - st.hess_left + lambda;
                    if (gl * gl * dr + gr * gr * dl >= st.bar * dl * dr * (1.0 - 1e-9)) {
                        // Same operations, in the same order, as split_gain.
                        const double children = gl * gl / dl + gr * gr / dr;
                        const double gain = 0.5 * (children - parent[slot]) - gamma;
                        if (gain > st.gain) {
                            st.gain = gain;
                            st.bar = children;
                            st.lo = st.last;
                            st.hi = v;
                        }
                    }
                }
                st.grad_left += rs.grad;
                st.hess_left += rs.hess;
                st.last = v;
            }
            auto& best = per_feature[static_cast<std::size_t>(fi)];
            for (std::size_t s = 0; s < slots; ++s)
                if (scan[s].gain > 0.0)
                    best[s] = Candidate{scan[s].gain, static_cast<std::int32_t>(f), midpoint_threshold(scan[s].lo, scan[s].hi)};
        }
        return reduce(per_feature, slots);
    }

    std::vector<Candidate> find_histogram(std::span<const std::uint32_t> rows, std::span<const std::size_t> features,
                                          const std::vector<std::int32_t>& active) {
        const auto slots = active.size();
        std::vector<std::vector<Candidate>> per_feature(features.size(), std::vector<Candidate>(slots));
        const auto n_feat = static_cast<std::ptrdiff_t>(features.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t fi = 0; fi < n_feat; ++fi) {
            const auto f = features[static_cast<std::size_t>(fi)];
            const auto& cuts = data_.cuts(f);
            const std::size_t n_bins = cuts.size() + 1;
            if (n_bins < 2) continue;
            std::vector<double> hg(slots * n_bins, 0.0);
            std::vector<double> hh(slots * n_bins, 0.0);
            auto codes = data_.bins(f);
            for (auto r : rows) {
                const auto node = node_of_row_[r];
                const auto slot = slot_of_node_[static_cast<std::size_t>(node)];
                if (slot < 0) continue;
                const auto idx = static_cast<std::size_t>(slot) * n_bins + codes[r];
                hg[idx] += grad_[r];
                hh[idx] += hess_[r];
            }
            auto& best = per_feature[static_cast<std::size_t>(fi)];
            for (std::size_t s = 0; s < slots; ++s) {
                const auto node = static_cast<std::size_t>(active[s]);
                const double g_tot = grad_sum_[node];
                const double h_tot = hess_sum_[node];
                double gl = 0.0;
                double hl = 0.0;
                for (std::size_t b = 0; b + 1 < n_bins; ++b) {
                    gl += hg[s * n_bins + b];
                    hl += hh[s * n_bins + b];
                    if (!admissible(hl, h_tot - hl)) continue;
                    const double gain = split_gain(gl, hl, g_tot, h_tot, params_.lambda, params_.gamma);
                    if (gain > best[s].gain) best[s] = Candidate{gain, static_cast<std::int32_t>(f), cuts[b]};
                }
            }
        }
        return reduce(per_feature, slots);
    }

    const TrainingData& data_;
    std::span<const double> grad_;
    std::span<const double> hess_;
    const BoostParams& params_;
    std::vector<std::int32_t> node_of_row_;
    std::vector<std::int32_t> slot_of_node_;
    struct RowState {
        double grad = 0.0;
        double hess = 0.0;
        std::int32_t slot = -1;
    };
    std::vector<RowState> row_state_;
    std::vector<double> grad_sum_;
    std::vector<double> hess_sum_;
};

double mean_squared_error(std::span<const double> pred, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += (pred[i] - y[i]) * (pred[i] - y[i]);
    return sum / static_cast<double>(y.size());
}

}  // namespace

BoostedModel fit(const TrainingData& data, std::span<const double> y, const BoostParams& params,
                 const std::optional<EvalSet>& eval) {
    params.validate();
    const auto n = data.rows();
    const auto F = data.cols();
    if (y.size() != n) throw DataError(fmt::format("{} targets for {} training rows", y.size(), n));
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(y[i])) throw DataError(fmt::format("non-finite target at row {}", i));
    if (data.method() != params.split_method ||
        (data.method() == SplitMethod::histogram && data.max_bins() != params.max_bins)) {
        throw ConfigError("training data was prepared for a different split method or bin count");
    }
    if (params.early_stopping_rounds > 0 && !eval) throw ConfigError("early stopping needs an eval set");
    if (eval) {
        if (eval->x.rows() != eval->y.size()) throw DataError("eval set feature and target counts differ");
        if (eval->x.rows() > 0 && eval->x.cols() != F) throw DataError("eval set width differs from training width");
    }

    const double base = params.base_score.value_or(std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n));
    const double eta = params.learning_rate;

    std::vector<double> pred(n, base);
    std::vector<double> grad(n);
    const std::vector<double> hess(n, 1.0);
    std::vector<double> eval_pred(eval ? eval->x.rows() : 0, base);

    std::mt19937_64 rng(params.seed);
    std::vector<std::uint32_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0u);
    std::vector<std::size_t> all_features(F);
    std::iota(all_features.begin(), all_features.end(), std::size_t{0});

    const auto n_sample = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(params.subsample * static_cast<double>(n))));
    const auto n_cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(params.colsample * static_cast<double>(F))));

    TreeBuilder builder(data, grad, hess, params);
    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_trees));
    std::vector<double> train_loss;
    std::vector<double> eval_loss;
    std::size_t best_round = 0;
    double best_eval = std::numeric_limits<double>::infinity();

    std::vector<std::uint32_t> rows = all_rows;
    std::vector<std::size_t> features = all_features;
    for (int round = 0; round < params.n_trees; ++round) {
        for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y[i];

        if (n_sample < n) {
            rows = all_rows;
            std::shuffle(rows.begin(), rows.end(), rng);
            rows.resize(n_sample);
            std::sort(rows.begin(), rows.end());
        }
        if (n_cols < F) {
            features = all_features;
            std::shuffle(features.begin(), features.end(), rng);
            features.resize(n_cols);
            std::sort(features.begin(), features.end());
        }

        trees.push_back(builder.build(rows, features));
        const auto& tree = trees.back();
        for (std::size_t i = 0; i < n; ++i) {
            const auto leaf = tree.leaf_index([&](std::size_t f) { return data.value(i, f); });
            pred[i] += eta * tree.nodes()[static_cast<std::size_t>(leaf)].weight;
        }
        train_loss.push_back(mean_squared_error(pred, y));

        if (eval) {
            for (std::size_t i = 0; i < eval_pred.size(); ++i) eval_pred[i] += eta * tree.predict(eval->x.row(i));
            const double loss = eval_pred.empty() ? 0.0 : mean_squared_error(eval_pred, eval->y);
            eval_loss.push_back(loss);
            if (loss < best_eval) {
                best_eval = loss;
                best_round = trees.size();
            }
            if (params.early_stopping_rounds > 0 &&
                trees.size() - best_round >= static_cast<std::size_t>(params.early_stopping_rounds)) {
                break;
            }
        }
    }
    if (params.early_stopping_rounds > 0) {
        trees.resize(best_round);
    } else {
        best_round = trees.size();
    }

    BoostedModel model(F, base, eta, std::move(trees), params);
    model.train_loss = std::move(train_loss);
    model.eval_loss = std::move(eval_loss);
    model.best_round = best_round;
    return model;
}

BoostedModel fit(const std::vector<std::vector<double>>& rows, std::span<const double> y, const BoostParams& params) {
    if (rows.empty()) throw DataError("training set is empty");
    const auto width = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * width);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            throw DataError(fmt::format("ragged training rows: row {} has {} features, row 0 has {}", r, rows[r].size(), width));
        }
        flat.insert(flat.end(), rows[r].begin(), rows[r].end());
    }
    const TrainingData data(FeatureMatrix(flat, rows.size(), width), params.split_method, params.max_bins);
    return fit(data, y, params);
}

}  // namespace tsboost::gbrt
