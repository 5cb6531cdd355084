#include "tsboost/gbrt/params.hpp"

#include <cmath>
#include <fmt/format.h>

#include "tsboost/errors.hpp"

namespace tsboost::gbrt {

std::string_view to_string(SplitMethod method) {
    return method == SplitMethod::exact ? "exact" : "hist";
}

std::optional<SplitMethod> parse_split_method(std::string_view text) {
    if (text == "exact") return SplitMethod::exact;
    if (text == "hist" || text == "histogram") return SplitMethod::histogram;
    return std::nullopt;
}

void BoostParams::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("invalid boost parameter: " + what); };
    if (n_trees < 1) fail(fmt::format("n_trees = {} (must be >= 1)", n_trees));
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) fail(fmt::format("learning_rate = {} (must be in (0, 1])", learning_rate));
    if (max_depth < 0) fail(fmt::format("max_depth = {} (must be >= 0)", max_depth));
    if (!(lambda >= 0.0)) fail(fmt::format("lambda = {} (must be >= 0)", lambda));
    if (!(gamma >= 0.0)) fail(fmt::format("gamma = {} (must be >= 0)", gamma));
    if (!(min_child_weight >= 0.0)) fail(fmt::format("min_child_weight = {} (must be >= 0)", min_child_weight));
    if (!(subsample > 0.0 && subsample <= 1.0)) fail(fmt::format("subsample = {} (must be in (0, 1])", subsample));
    if (!(colsample > 0.0 && colsample <= 1.0)) fail(fmt::format("colsample = {} (must be in (0, 1])", colsample));
    if (base_score && !std::isfinite(*base_score)) fail("base_score is not finite");
    if (max_bins < 2 || max_bins > 65536) fail(fmt::format("max_bins = {} (must be in [2, 65536])", max_bins));
    if (early_stopping_rounds < 0) fail(fmt::format("early_stopping_rounds = {} (must be >= 0)", early_stopping_rounds));
}

}  // namespace tsboost::gbrt
