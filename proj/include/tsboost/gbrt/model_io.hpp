#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "tsboost/gbrt/booster.hpp"

namespace tsboost::gbrt {

/// Model text format, version 1 (JSON):
///
///   {
///     "format": "tsboost.gbrt", "version": 1,
///     "n_features": F, "base_score": b, "learning_rate": eta,
///     "params": { ...BoostParams... },
///     "trees": [ <node>, ... ]
///   }
///
/// where <node> is either {"leaf": w, "cover": c} or
/// {"feature": f, "threshold": x, "gain": g, "cover": c, "left": <node>, "right": <node>}.
/// Reals are written in shortest round-trip form, so a reloaded model
/// predicts bit-identically.
inline constexpr int kModelFormatVersion = 1;

nlohmann::json params_to_json(const BoostParams& params);
BoostParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BoostedModel& model);
BoostedModel model_from_json(const nlohmann::json& j);

void save_model(const BoostedModel& model, const std::filesystem::path& path);
BoostedModel load_model(const std::filesystem::path& path);

}  // namespace tsboost::gbrt
