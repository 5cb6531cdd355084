#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "../oracles/split_oracle.hpp"
#include "test_support.hpp"
#include "tsboost/errors.hpp"
#include "tsboost/gbrt/booster.hpp"
#include "tsboost/gbrt/model_io.hpp"

using namespace tsboost;
using namespace tsboost::gbrt;

namespace {

BoostParams plain(int trees, int depth) {
    BoostParams p;
    p.n_trees = trees;
    p.max_depth = depth;
    p.learning_rate = 1.0;
    p.lambda = 0.0;
    p.gamma = 0.0;
    p.min_child_weight = 0.0;
    return p;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return flat;
}

double training_rmse(const BoostedModel& m, const oracle::Instance& inst) {
    double s = 0.0;
    for (std::size_t i = 0; i < inst.x.size(); ++i) {
        const double e = m.predict(inst.x[i]) - inst.y[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(inst.x.size()));
}

// Which training rows go left at the root of the first tree.
std::vector<bool> root_partition(const std::vector<std::vector<double>>& x, int feature, double threshold) {
    std::vector<bool> left;
    for (const auto& row : x) left.push_back(row[static_cast<std::size_t>(feature)] < threshold);
    return left;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Fit, ConstantTargetRootLeafPredictsTheConstant) {
    const std::vector<std::vector<double>> x{{1.0}, {2.0}, {3.0}, {4.0}};
    const std::vector<double> y(4, 2.5);
    auto p = plain(1, 0);
    p.base_score = 0.0;
    const auto model = fit(x, y, p);
    ASSERT_EQ(model.trees().size(), 1u);
    EXPECT_EQ(model.trees()[0].size(), 1u);
    for (const auto& row : x) EXPECT_DOUBLE_EQ(model.predict(row), 2.5);
}

TEST(Fit, LeafWeightClosedForm) {
    EXPECT_DOUBLE_EQ(leaf_weight(2.0, 4.0, 1.0), -0.4);
    EXPECT_THROW(leaf_weight(1.0, 0.0, 0.0), NumericalError);
}

TEST(Fit, RootSplitMatchesExhaustiveEnumeration) {
    const auto inst = oracle::random_instance(20, 3, 2024);
    auto p = plain(1, 1);
    p.lambda = 1.0;
    const double base = std::accumulate(inst.y.begin(), inst.y.end(), 0.0) / 20.0;
    std::vector<double> g, h(20, 1.0);
    for (double v : inst.y) g.push_back(base - v);
    const auto expected = oracle::best_root_split(inst.x, g, h, 1.0, 0.0, 0.0);
    ASSERT_GE(expected.feature, 0);

    const auto model = fit(inst.x, inst.y, p);
    const auto& root = model.trees()[0].nodes()[0];
    EXPECT_EQ(root.feature, expected.feature);
    EXPECT_NEAR(root.threshold, expected.threshold, 1e-12);
    EXPECT_EQ(root_partition(inst.x, root.feature, root.threshold),
              root_partition(inst.x, expected.feature, expected.threshold));
    EXPECT_NEAR(root.gain, expected.gain, 1e-9 * std::max(1.0, expected.gain));
}

// Property over random instances, including regularization and a child-weight floor.
TEST(Fit, RootSplitOptimalityProperty) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t rows = 5 + seed * 13 % 300;
        const std::size_t feats = 1 + seed % 6;
        const auto inst = oracle::random_instance(rows, feats, seed, seed % 2 == 0);
        auto p = plain(1, 2);
        p.lambda = 0.5 * static_cast<double>(seed % 3);
        p.gamma = seed % 4 == 0 ? 0.1 : 0.0;
        p.min_child_weight = static_cast<double>(seed % 5);
        const double base = std::accumulate(inst.y.begin(), inst.y.end(), 0.0) / static_cast<double>(rows);
        std::vector<double> g, h(rows, 1.0);
        for (double v : inst.y) g.push_back(base - v);
        const auto expected = oracle::best_root_split(inst.x, g, h, p.lambda, p.gamma, p.min_child_weight);
        const auto model = fit(inst.x, inst.y, p);
        const auto& root = model.trees()[0].nodes()[0];
        if (expected.feature < 0) {
            EXPECT_TRUE(root.is_leaf()) << "seed " << seed;
            continue;
        }
        EXPECT_EQ(root.feature, expected.feature) << "seed " << seed;
        EXPECT_EQ(root_partition(inst.x, root.feature, root.threshold),
                  root_partition(inst.x, expected.feature, expected.threshold))
            << "seed " << seed;
    }
}

TEST(Fit, LeafWeightsMinimizeRegularizedObjective) {
    const auto inst = oracle::random_instance(200, 4, 77, false);
    auto p = plain(1, 3);
    p.lambda = 2.0;
    p.base_score = 0.0;
    const auto model = fit(inst.x, inst.y, p);
    const auto& tree = model.trees()[0];
    // Recompute each leaf's G and H from the rows routed to it.
    std::vector<double> G(tree.size(), 0.0), H(tree.size(), 0.0);
    for (std::size_t i = 0; i < inst.x.size(); ++i) {
        const auto leaf = static_cast<std::size_t>(tree.leaf_index([&](std::size_t f) { return inst.x[i][f]; }));
        G[leaf] += 0.0 - inst.y[i];
        H[leaf] += 1.0;
    }
    std::size_t leaves = 0;
    for (std::size_t k = 0; k < tree.size(); ++k) {
        const auto& nd = tree.nodes()[k];
        if (!nd.is_leaf()) continue;
        ++leaves;
        EXPECT_NEAR(nd.weight, oracle::minimize_leaf_objective(G[k], H[k], p.lambda), 1e-9);
    }
    EXPECT_GT(leaves, 1u);
}

TEST(Predict, ZeroTreeModelReturnsBaseScore) {
    const BoostedModel model(3, 4.25, 0.1, {}, BoostParams{});
    const std::vector<double> row{1, 2, 3};
    EXPECT_EQ(model.predict(row), 4.25);
    EXPECT_EQ(model.feature_importance(), (std::vector<double>{0, 0, 0}));
}

TEST(Predict, StumpRoutingAndShrinkage) {
    std::vector<TreeNode> nodes(3);
    nodes[0].feature = 0;
    nodes[0].threshold = 5.0;
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[0].gain = 3.2;
    nodes[1].weight = -1.0;
    nodes[2].weight = 1.0;
    const BoostedModel model(1, 0.0, 0.5, {RegressionTree(nodes)}, BoostParams{});
    EXPECT_DOUBLE_EQ(model.predict(std::vector<double>{4.9}), -0.5);
    EXPECT_DOUBLE_EQ(model.predict(std::vector<double>{5.1}), 0.5);
    EXPECT_DOUBLE_EQ(model.predict(std::vector<double>{5.0}), 0.5);
    EXPECT_THROW(model.predict(std::vector<double>{1.0, 2.0}), DataError);
}

TEST(FeatureImportance, SumsSplitGainsPerFeature) {
    std::vector<TreeNode> nodes(3);
    nodes[0].feature = 1;
    nodes[0].threshold = 0.0;
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[0].gain = 3.2;
    const BoostedModel model(4, 0.0, 1.0, {RegressionTree(nodes)}, BoostParams{});
    EXPECT_EQ(model.feature_importance(), (std::vector<double>{0.0, 3.2, 0.0, 0.0}));

    const auto inst = oracle::random_instance(100, 3, 5, false);
    auto p = plain(20, 3);
    const auto fitted = fit(inst.x, inst.y, p);
    for (double v : fitted.feature_importance()) EXPECT_GE(v, 0.0);
}

TEST(Tree, RejectsMalformedNodeArrays) {
    std::vector<TreeNode> cyc(3);
    cyc[0].feature = 0;
    cyc[0].left = 1;
    cyc[0].right = 2;
    cyc[1].feature = 0;
    cyc[1].left = 1;
    cyc[1].right = 2;
    EXPECT_THROW(RegressionTree{cyc}, DataError);
    std::vector<TreeNode> dangling(1);
    dangling[0].feature = 0;
    dangling[0].left = 1;
    dangling[0].right = 2;
    EXPECT_THROW(RegressionTree{dangling}, DataError);
}

TEST(Fit, TrainingLossIsMonotoneAndImproves) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto inst = oracle::random_instance(150, 4, seed);
        BoostParams p;
        p.n_trees = 60;
        p.learning_rate = 0.3;
        p.max_depth = 3;
        const auto model = fit(inst.x, inst.y, p);
        ASSERT_EQ(model.train_loss.size(), 60u);
        for (std::size_t k = 1; k < model.train_loss.size(); ++k)
            EXPECT_LE(model.train_loss[k], model.train_loss[k - 1]) << "seed " << seed << " round " << k;

        auto one = p;
        one.n_trees = 1;
        EXPECT_LT(training_rmse(model, inst), training_rmse(fit(inst.x, inst.y, one), inst));
    }
}

// With unlimited depth and no regularization one greedy tree separates every
// distinct row. Greedy trees can be unbalanced, so depth rows − 1 is the
// bound that always suffices.
TEST(Fit, SingleDeepTreeInterpolatesDistinctRows) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t rows = 10 + seed * 5;
        const auto inst = oracle::random_instance(rows, 3, seed + 100, false);
        auto p = plain(1, static_cast<int>(rows - 1));
        const auto model = fit(inst.x, inst.y, p);
        EXPECT_LT(training_rmse(model, inst), 1e-9) << "seed " << seed;
    }
}

TEST(Fit, DeterministicForSeedIncludingSampling) {
    const auto inst = oracle::random_instance(300, 5, 9);
    BoostParams p;
    p.n_trees = 30;
    p.subsample = 0.7;
    p.colsample = 0.6;
    p.seed = 1234;
    const auto a = fit(inst.x, inst.y, p);
    const auto b = fit(inst.x, inst.y, p);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    for (const auto& row : inst.x) EXPECT_TRUE(bit_equal(a.predict(row), b.predict(row)));

    p.seed = 4321;
    const auto c = fit(inst.x, inst.y, p);
    EXPECT_NE(to_json(a).dump(), to_json(c).dump());
}

TEST(Fit, PositiveFeatureScalingKeepsSplitsAndPredictions) {
    const auto inst = oracle::random_instance(120, 3, 31, false);
    auto scaled = inst.x;
    for (auto& row : scaled) row[1] *= 3.7;
    BoostParams p;
    p.n_trees = 15;
    p.max_depth = 4;
    const auto a = fit(inst.x, inst.y, p);
    const auto b = fit(scaled, inst.y, p);
    ASSERT_EQ(a.trees().size(), b.trees().size());
    for (std::size_t k = 0; k < a.trees().size(); ++k) {
        const auto& na = a.trees()[k].nodes();
        const auto& nb = b.trees()[k].nodes();
        ASSERT_EQ(na.size(), nb.size());
        for (std::size_t j = 0; j < na.size(); ++j) EXPECT_EQ(na[j].feature, nb[j].feature);
    }
    for (std::size_t i = 0; i < inst.x.size(); ++i) EXPECT_TRUE(bit_equal(a.predict(inst.x[i]), b.predict(scaled[i])));
}

TEST(Fit, HistogramMatchesExactWhenBinsCoverEveryValue) {
    const auto inst = oracle::random_instance(250, 4, 8, true);  // quantized: < 81 distinct values per feature
    BoostParams p;
    p.n_trees = 25;
    p.max_depth = 4;
    const auto exact = fit(inst.x, inst.y, p);
    p.split_method = SplitMethod::histogram;
    p.max_bins = 256;
    const auto hist = fit(inst.x, inst.y, p);
    for (const auto& row : inst.x) EXPECT_TRUE(bit_equal(exact.predict(row), hist.predict(row)));

    p.max_bins = 8;
    const auto coarse = fit(inst.x, inst.y, p);
    EXPECT_LT(coarse.train_loss.back(), coarse.train_loss.front());
}

TEST(Fit, HistogramCutsRespectBinBudget) {
    const auto inst = oracle::random_instance(2000, 2, 12, false);
    const auto flat = flatten(inst.x);
    const TrainingData data(FeatureMatrix(flat, inst.x.size(), 2), SplitMethod::histogram, 16);
    for (std::size_t f = 0; f < 2; ++f) {
        EXPECT_LE(data.cuts(f).size(), 15u);
        EXPECT_TRUE(std::is_sorted(data.cuts(f).begin(), data.cuts(f).end()));
        for (std::size_t r = 0; r < inst.x.size(); ++r) {
            const auto b = data.bins(f)[r];
            const double v = inst.x[r][f];
            if (b > 0) EXPECT_GE(v, data.cuts(f)[b - 1u]);
            if (b < data.cuts(f).size()) EXPECT_LT(v, data.cuts(f)[b]);
        }
    }
}

TEST(Fit, EarlyStoppingTruncatesToBestRound) {
    const auto train = oracle::random_instance(200, 3, 1, false);
    const auto valid = oracle::random_instance(100, 3, 2, false);
    const auto flat = flatten(train.x);
    const auto vflat = flatten(valid.x);
    BoostParams p;
    p.n_trees = 400;
    p.learning_rate = 0.5;
    p.max_depth = 6;
    p.lambda = 0.0;
    p.min_child_weight = 0.0;
    p.early_stopping_rounds = 10;
    const TrainingData data(FeatureMatrix(flat, 200, 3), SplitMethod::exact);
    const auto model = fit(data, train.y, p, EvalSet{FeatureMatrix(vflat, 100, 3), valid.y});
    EXPECT_LT(model.trees().size(), 400u);
    EXPECT_EQ(model.trees().size(), model.best_round);
    const auto best = std::min_element(model.eval_loss.begin(), model.eval_loss.end());
    EXPECT_EQ(static_cast<std::size_t>(best - model.eval_loss.begin()) + 1, model.best_round);
    EXPECT_EQ(model.eval_loss.size(), model.best_round + 10);

    EXPECT_THROW(fit(data, train.y, p), ConfigError);
}

TEST(Fit, RejectsBadInput) {
    BoostParams p;
    EXPECT_THROW(fit(std::vector<std::vector<double>>{}, std::vector<double>{}, p), DataError);
    EXPECT_THROW(fit({{1.0, 2.0}, {3.0}}, std::vector<double>{1, 2}, p), DataError);
    EXPECT_THROW(fit({{1.0}, {NAN}}, std::vector<double>{1, 2}, p), DataError);
    EXPECT_THROW(fit({{1.0}, {2.0}}, std::vector<double>{1, INFINITY}, p), DataError);
    EXPECT_THROW(fit({{1.0}, {2.0}}, std::vector<double>{1}, p), DataError);
    p.learning_rate = 0.0;
    EXPECT_THROW(fit({{1.0}, {2.0}}, std::vector<double>{1, 2}, p), ConfigError);
}

TEST(ModelIo, ReloadedModelPredictsBitIdentically) {
    tsboost::testing::TempDir dir;
    const auto inst = oracle::random_instance(200, 4, 3, false);
    BoostParams p;
    p.n_trees = 40;
    p.learning_rate = 0.1 + 1e-17;
    p.subsample = 0.8;
    p.seed = 99;
    const auto model = fit(inst.x, inst.y, p);
    save_model(model, dir.path() / "m.json");
    const auto back = load_model(dir.path() / "m.json");
    EXPECT_EQ(back.trees().size(), model.trees().size());
    EXPECT_EQ(to_json(back).dump(), to_json(model).dump());
    for (const auto& row : inst.x) EXPECT_TRUE(bit_equal(back.predict(row), model.predict(row)));
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto probe = oracle::random_instance(1, 4, 1000 + s, false).x[0];
        EXPECT_TRUE(bit_equal(back.predict(probe), model.predict(probe)));
    }

    auto j = to_json(model);
    j["version"] = 2;
    EXPECT_THROW(model_from_json(j), DataError);
    EXPECT_THROW(load_model(dir.write("junk.json", "{not json")), DataError);
}
