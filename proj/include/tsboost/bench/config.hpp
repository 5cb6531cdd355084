#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsboost/forecasting.hpp"
#include "tsboost/gbrt/params.hpp"
#include "tsboost/ingest.hpp"
#include "tsboost/metrics.hpp"
#include "tsboost/split.hpp"
#include "tsboost/transforms.hpp"
#include "tsboost/windowing.hpp"

namespace tsboost::bench {

enum class CovariatePlan {
    none,        // drop every covariate the file provides
    time,        // calendar features only
    native,      // the file's covariates only
    native_time  // both
};

std::string_view to_string(CovariatePlan plan);
std::optional<CovariatePlan> parse_covariate_plan(std::string_view text);

enum class ModelKind { wb, naive, persistence };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

struct DatasetConfig {
    std::string name;
    std::string path_text;         // as written in the config
    std::filesystem::path path;    // resolved against the data directory
    Schema schema;
    ImputePolicy impute = ImputePolicy::forward_fill;
    std::vector<std::size_t> series;  // explicit subset in this order; empty keeps all
};

struct ExperimentConfig {
    DatasetConfig dataset;
    SplitSpec split;
    WindowSpec window;
    CovariatePlan covariates = CovariatePlan::none;
    std::vector<TimeFeature> time_features;
    std::vector<ModelKind> models;
    NaiveFallback naive_fallback = NaiveFallback::time_index;
    std::vector<gbrt::BoostParams> grid;  // cartesian product of the [boost] lists
    std::vector<metrics::Metric> metrics;
    bool standardize = false;
    bool retain_predictions = false;
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;
    int workers = 1;

    std::string canonical_text;  // sorted section.key=value lines
    std::string digest;          // SHA-256 of canonical_text, hex
};

/// Flattened `section.key` → raw value.
using KeyValues = std::map<std::string, std::string>;

/// Reads an INI file (`[section]` headers, `key = value` lines, `;` or `#` comments).
KeyValues read_config_file(const std::filesystem::path& path);

/// Applies one `section.key=value` override.
void apply_override(KeyValues& kv, std::string_view assignment);

/// Validates every key and value. Relative dataset paths resolve against `data_dir`.
ExperimentConfig parse_config(const KeyValues& kv, const std::filesystem::path& data_dir);

std::string sha256_hex(std::string_view text);

/// Comma-separated list with surrounding whitespace trimmed; empty items dropped.
std::vector<std::string> split_list(std::string_view text);

/// One-line description of a parameter set, used in reports and error messages.
std::string describe(const gbrt::BoostParams& p);

}  // namespace tsboost::bench
