#include "tsboost/gbrt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "tsboost/errors.hpp"

namespace tsboost::gbrt {

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw DataError("tree has no nodes");
    const auto count = static_cast<std::int32_t>(nodes_.size());
    std::vector<int> parents(nodes_.size(), 0);
    for (const auto& nd : nodes_) {
        if (nd.is_leaf()) {
            if (!std::isfinite(nd.weight)) throw DataError("tree leaf weight is not finite");
            continue;
        }
        if (nd.left <= 0 || nd.left >= count || nd.right <= 0 || nd.right >= count || nd.left == nd.right) {
            throw DataError("tree node has invalid child indices");
        }
        if (!std::isfinite(nd.threshold)) throw DataError("tree split threshold is not finite");
        ++parents[static_cast<std::size_t>(nd.left)];
        ++parents[static_cast<std::size_t>(nd.right)];
    }
    if (parents[0] != 0) throw DataError("tree root has a parent");
    for (std::size_t k = 1; k < parents.size(); ++k) {
        if (parents[k] != 1) throw DataError(fmt::format("tree node {} has {} parents", k, parents[k]));
    }
    // Every non-root node has exactly one parent and the root none; reaching all
    // nodes from the root rules out cycles.
    std::vector<std::int32_t> stack{0};
    std::size_t reached = 0;
    while (!stack.empty()) {
        const auto k = static_cast<std::size_t>(stack.back());
        stack.pop_back();
        if (++reached > nodes_.size()) break;
        if (!nodes_[k].is_leaf()) {
            stack.push_back(nodes_[k].left);
            stack.push_back(nodes_[k].right);
        }
    }
    if (reached != nodes_.size()) throw DataError("tree is not a single connected binary tree");
}

RegressionTree RegressionTree::leaf(double weight) {
    RegressionTree t;
    t.nodes_[0].weight = weight;
    return t;
}

std::size_t RegressionTree::depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [k, d] = stack.back();
        stack.pop_back();
        const auto& nd = nodes_[static_cast<std::size_t>(k)];
        if (nd.is_leaf()) {
            best = std::max(best, d);
        } else {
            stack.emplace_back(nd.left, d + 1);
            stack.emplace_back(nd.right, d + 1);
        }
    }
    return best;
}

std::int32_t RegressionTree::add_node(const TreeNode& node) {
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
}

}  // namespace tsboost::gbrt
