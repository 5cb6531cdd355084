#include "tsboost/gbrt/model_io.hpp"

#include <fmt/format.h>
#include <fstream>

#include "tsboost/errors.hpp"

namespace tsboost::gbrt {

using nlohmann::json;

namespace {

json node_to_json(const RegressionTree& tree, std::int32_t k) {
    const auto& nd = tree.nodes()[static_cast<std::size_t>(k)];
    if (nd.is_leaf()) return json{{"leaf", nd.weight}, {"cover", nd.cover}};
    return json{{"feature", nd.feature}, {"threshold", nd.threshold}, {"gain", nd.gain}, {"cover", nd.cover},
                {"left", node_to_json(tree, nd.left)}, {"right", node_to_json(tree, nd.right)}};
}

std::int32_t node_from_json(const json& j, std::vector<TreeNode>& nodes) {
    const auto k = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();
    TreeNode nd;
    nd.cover = j.value("cover", 0.0);
    if (j.contains("leaf")) {
        nd.weight = j.at("leaf").get<double>();
    } else {
        nd.feature = j.at("feature").get<std::int32_t>();
        if (nd.feature < 0) throw DataError("model file: negative split feature");
        nd.threshold = j.at("threshold").get<double>();
        nd.gain = j.value("gain", 0.0);
        nd.left = node_from_json(j.at("left"), nodes);
        nd.right = node_from_json(j.at("right"), nodes);
    }
    nodes[static_cast<std::size_t>(k)] = nd;
    return k;
}

}  // namespace

json params_to_json(const BoostParams& p) {
    json j{{"n_trees", p.n_trees},
           {"learning_rate", p.learning_rate},
           {"max_depth", p.max_depth},
           {"lambda", p.lambda},
           {"gamma", p.gamma},
           {"min_child_weight", p.min_child_weight},
           {"subsample", p.subsample},
           {"colsample", p.colsample},
           {"seed", p.seed},
           {"split_method", std::string(to_string(p.split_method))},
           {"max_bins", p.max_bins},
           {"early_stopping_rounds", p.early_stopping_rounds}};
    j["base_score"] = p.base_score ? json(*p.base_score) : json(nullptr);
    return j;
}

BoostParams params_from_json(const json& j) {
    BoostParams p;
    p.n_trees = j.at("n_trees").get<int>();
    p.learning_rate = j.at("learning_rate").get<double>();
    p.max_depth = j.at("max_depth").get<int>();
    p.lambda = j.at("lambda").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.min_child_weight = j.at("min_child_weight").get<double>();
    p.subsample = j.at("subsample").get<double>();
    p.colsample = j.at("colsample").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    const auto method = parse_split_method(j.at("split_method").get<std::string>());
    if (!method) throw DataError("model file: unknown split_method");
    p.split_method = *method;
    p.max_bins = j.at("max_bins").get<int>();
    p.early_stopping_rounds = j.at("early_stopping_rounds").get<int>();
    if (!j.at("base_score").is_null()) p.base_score = j.at("base_score").get<double>();
    return p;
}

json to_json(const BoostedModel& model) {
    json trees = json::array();
    for (const auto& t : model.trees()) trees.push_back(node_to_json(t, 0));
    return json{{"format", "tsboost.gbrt"},
                {"version", kModelFormatVersion},
                {"n_features", model.n_features()},
                {"base_score", model.base_score()},
                {"learning_rate", model.learning_rate()},
                {"params", params_to_json(model.params())},
                {"trees", std::move(trees)}};
}

BoostedModel model_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != "tsboost.gbrt") throw DataError("not a tsboost model file");
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw DataError(fmt::format("unsupported model format version {}", version));
        }
        std::vector<RegressionTree> trees;
        for (const auto& jt : j.at("trees")) {
            std::vector<TreeNode> nodes;
            node_from_json(jt, nodes);
            trees.emplace_back(std::move(nodes));
        }
        return BoostedModel(j.at("n_features").get<std::size_t>(), j.at("base_score").get<double>(),
                            j.at("learning_rate").get<double>(), std::move(trees), params_from_json(j.at("params")));
    } catch (const json::exception& e) {
        throw DataError(fmt::format("malformed model file: {}", e.what()));
    }
}

void save_model(const BoostedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(fmt::format("cannot write model file '{}'", path.string()));
    out << to_json(model).dump(1) << '\n';
}

BoostedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open model file '{}'", path.string()));
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(fmt::format("model file '{}' is not valid JSON: {}", path.string(), e.what()));
    }
    return model_from_json(j);
}

}  // namespace tsboost::gbrt
