#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tsboost::gbrt {

/// Internal nodes route a row left iff x[feature] < threshold.
struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double weight = 0.0;  // leaf value, unshrunk
    double gain = 0.0;    // split gain (internal nodes)
    double cover = 0.0;   // hessian sum of the training rows that reached the node

    bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
public:
    RegressionTree() : nodes_(1) {}
    explicit RegressionTree(std::vector<TreeNode> nodes);

    static RegressionTree leaf(double weight);

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t depth() const;

    /// Index of the leaf `row` lands in. `value(f)` returns feature f of the row.
    template <typename FeatureAccess>
    std::int32_t leaf_index(FeatureAccess&& value) const {
        std::int32_t k = 0;
        while (!nodes_[static_cast<std::size_t>(k)].is_leaf()) {
            const auto& nd = nodes_[static_cast<std::size_t>(k)];
            k = value(static_cast<std::size_t>(nd.feature)) < nd.threshold ? nd.left : nd.right;
        }
        return k;
    }

    double predict(std::span<const double> row) const {
        return nodes_[static_cast<std::size_t>(leaf_index([&](std::size_t f) { return row[f]; }))].weight;
    }

    // Used by the builder.
    std::int32_t add_node(const TreeNode& node);
    TreeNode& node(std::size_t k) { return nodes_[k]; }

private:
    std::vector<TreeNode> nodes_;
};

}  // namespace tsboost::gbrt
