#include "tsboost/forecasting.hpp"

#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>

#include "tsboost/errors.hpp"
#include "tsboost/gbrt/model_io.hpp"

namespace tsboost {

using gbrt::BoostedModel;
using gbrt::BoostParams;
using gbrt::FeatureMatrix;
using gbrt::TrainingData;
using nlohmann::json;

MultiOutputForecaster::MultiOutputForecaster(WindowSpec spec, std::vector<std::string> covariate_names,
                                             std::vector<BoostedModel> engines)
    : spec_(spec), covariate_names_(std::move(covariate_names)), engines_(std::move(engines)) {
    spec_.validate();
    if (engines_.size() != spec_.horizon) {
        throw DataError(fmt::format("{} engines for horizon {}", engines_.size(), spec_.horizon));
    }
    const auto width = spec_.input_width(covariate_names_.size());
    for (std::size_t k = 0; k < engines_.size(); ++k) {
        if (engines_[k].n_features() != width) {
            throw DataError(fmt::format("engine {} expects {} inputs, the window produces {}", k,
                                        engines_[k].n_features(), width));
        }
    }
}

std::vector<double> MultiOutputForecaster::forecast(std::span<const double> targets,
                                                    std::span<const double> covariates,
                                                    std::size_t series_id) const {
    auto x = flatten_window(targets, covariates, n_covariates(), spec_);
    if (spec_.include_series_id) x.push_back(static_cast<double>(series_id));
    std::vector<double> out(horizon());
    for (std::size_t k = 0; k < horizon(); ++k) out[k] = engines_[k].predict(x);
    return out;
}

std::vector<double> MultiOutputForecaster::predict_rows(const InstanceSet& rows) const {
    if (!rows.empty() && rows.width() != spec_.input_width(n_covariates())) {
        throw DataError(fmt::format("instance width {} does not match the forecaster's {}", rows.width(),
                                    spec_.input_width(n_covariates())));
    }
    const FeatureMatrix x(rows.features(), rows.size(), rows.width());
    const auto h = horizon();
    std::vector<double> out(rows.size() * h);
    for (std::size_t k = 0; k < h; ++k) {
        const auto col = engines_[k].predict(x);
        for (std::size_t r = 0; r < rows.size(); ++r) out[r * h + k] = col[r];
    }
    return out;
}

MultiOutputForecaster MultiOutputForecaster::with_engine(std::size_t k, BoostedModel engine) const {
    auto engines = engines_;
    engines.at(k) = std::move(engine);
    return MultiOutputForecaster(spec_, covariate_names_, std::move(engines));
}

MultiOutputForecaster fit_wb(const SeriesFrame& train, const WindowSpec& spec, const BoostParams& params,
                             const WbFitOptions& options) {
    train.require_finite();
    return fit_wb(make_training_set(train, spec), spec, train.covariate_names(), params, options);
}

MultiOutputForecaster fit_wb(const InstanceSet& train, const WindowSpec& spec, std::vector<std::string> covariate_names,
                             const BoostParams& params, const WbFitOptions& options) {
    spec.validate();
    params.validate();
    const auto h = spec.horizon;
    if (train.horizon() != h) throw DataError(fmt::format("instances carry {} targets, horizon is {}", train.horizon(), h));
    if (train.width() != spec.input_width(covariate_names.size())) {
        throw DataError("instance width does not match the window spec");
    }
    if (train.empty()) throw DataError("no training windows");
    if (!options.rounds_per_engine.empty() && options.rounds_per_engine.size() != h) {
        throw ConfigError(fmt::format("{} per-engine round counts for horizon {}", options.rounds_per_engine.size(), h));
    }
    if (options.eval && (options.eval->width() != train.width() || options.eval->horizon() != h)) {
        throw DataError("eval instances do not match the training layout");
    }

    // One sorted/binned copy of the shared rows serves all h engines.
    const TrainingData data(FeatureMatrix(train.features(), train.size(), train.width()), params.split_method,
                            params.max_bins);
    std::vector<std::vector<double>> eval_y;
    if (options.eval) {
        for (std::size_t k = 0; k < h; ++k) eval_y.push_back(options.eval->target_column(k));
    }

    std::vector<BoostedModel> engines(h);
    std::vector<std::exception_ptr> errors(h);
    const auto n_engines = static_cast<std::ptrdiff_t>(h);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t kk = 0; kk < n_engines; ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        try {
            auto p = params;
            if (!options.rounds_per_engine.empty()) p.n_trees = options.rounds_per_engine[k];
            const auto y = train.target_column(k);
            std::optional<gbrt::EvalSet> eval;
            if (options.eval) {
                eval = gbrt::EvalSet{FeatureMatrix(options.eval->features(), options.eval->size(), options.eval->width()),
                                     eval_y[k]};
            }
            engines[k] = gbrt::fit(data, y, p, eval);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return MultiOutputForecaster(spec, std::move(covariate_names), std::move(engines));
}

std::string_view to_string(NaiveFallback fallback) {
    switch (fallback) {
        case NaiveFallback::none: return "none";
        case NaiveFallback::time_index: return "time_index";
    }
    return "?";
}

std::optional<NaiveFallback> parse_naive_fallback(std::string_view text) {
    for (auto f : {NaiveFallback::none, NaiveFallback::time_index})
        if (to_string(f) == text) return f;
    return std::nullopt;
}

NaiveForecaster::NaiveForecaster(std::vector<std::string> covariate_names, NaiveFallback fallback,
                                 BoostedModel engine)
    : covariate_names_(std::move(covariate_names)), fallback_(fallback), engine_(std::move(engine)) {
    const std::size_t width = uses_time_index() ? 1 : covariate_names_.size();
    if (width == 0) throw ConfigError("point-wise forecaster has no inputs: no covariates and fallback 'none'");
    if (engine_.n_features() != width) {
        throw DataError(fmt::format("point-wise engine expects {} inputs, forecaster provides {}", engine_.n_features(),
                                    width));
    }
}

std::vector<double> NaiveForecaster::input_row(std::span<const double> covariates, std::size_t time_index) const {
    if (covariates.size() != n_covariates()) {
        throw DataError(fmt::format("{} covariates given, forecaster was trained on {}", covariates.size(),
                                    n_covariates()));
    }
    if (uses_time_index()) return {static_cast<double>(time_index)};
    return {covariates.begin(), covariates.end()};
}

std::vector<double> NaiveForecaster::forecast(const SeriesFrame& frame) const {
    if (frame.n_covariates() != n_covariates()) {
        throw DataError(fmt::format("frame has {} covariates, forecaster was trained on {}", frame.n_covariates(),
                                    n_covariates()));
    }
    std::vector<double> out;
    out.reserve(frame.n_series() * frame.length());
    for (std::size_t i = 0; i < frame.n_series(); ++i)
        for (std::size_t t = 0; t < frame.length(); ++t)
            out.push_back(engine_.predict(input_row(frame.covariate_row(i, t), frame.time_offset() + t)));
    return out;
}

std::vector<double> NaiveForecaster::predict_rows(std::span<const double> covariates,
                                                  std::span<const std::size_t> time_index) const {
    const auto M = n_covariates();
    if (covariates.size() != time_index.size() * M) {
        throw DataError(fmt::format("{} covariate values for {} rows of width {}", covariates.size(),
                                    time_index.size(), M));
    }
    std::vector<double> out(time_index.size());
    for (std::size_t r = 0; r < time_index.size(); ++r)
        out[r] = engine_.predict(input_row(covariates.subspan(r * M, M), time_index[r]));
    return out;
}

namespace {

struct PointRows {
    std::vector<double> x;
    std::vector<double> y;
};

PointRows point_rows(const SeriesFrame& frame, bool time_index) {
    PointRows out;
    for (std::size_t i = 0; i < frame.n_series(); ++i) {
        for (std::size_t t = 0; t < frame.length(); ++t) {
            if (time_index) {
                out.x.push_back(static_cast<double>(frame.time_offset() + t));
            } else {
                auto row = frame.covariate_row(i, t);
                out.x.insert(out.x.end(), row.begin(), row.end());
            }
            out.y.push_back(frame.target(i, t));
        }
    }
    return out;
}

}  // namespace

NaiveForecaster fit_naive(const SeriesFrame& train, const BoostParams& params, NaiveFallback fallback,
                          const SeriesFrame* eval) {
    params.validate();
    if (train.n_series() == 0 || train.length() == 0) throw DataError("training frame is empty");
    train.require_finite();
    const auto M = train.n_covariates();
    const bool time_index = M == 0 && fallback == NaiveFallback::time_index;
    if (M == 0 && !time_index) {
        throw ConfigError("point-wise forecaster has no inputs: no covariates and fallback 'none'");
    }
    const std::size_t width = time_index ? 1 : M;
    const auto rows = point_rows(train, time_index);
    const TrainingData data(FeatureMatrix(rows.x, rows.y.size(), width), params.split_method, params.max_bins);

    std::optional<gbrt::EvalSet> eval_set;
    PointRows eval_rows;
    if (eval) {
        if (eval->n_covariates() != M) throw DataError("eval frame covariates differ from the training frame");
        eval->require_finite();
        eval_rows = point_rows(*eval, time_index);
        eval_set = gbrt::EvalSet{FeatureMatrix(eval_rows.x, eval_rows.y.size(), width), eval_rows.y};
    }
    return NaiveForecaster(train.covariate_names(), fallback, gbrt::fit(data, rows.y, params, eval_set));
}

std::vector<double> persistence(double last, std::size_t h) { return std::vector<double>(h, last); }

namespace {

constexpr int kForecasterFormatVersion = 1;

void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
    out << j.dump(1) << '\n';
}

json read_manifest(const std::filesystem::path& dir, std::string_view kind) {
    const auto path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open forecaster manifest '{}'", path.string()));
    try {
        json j;
        in >> j;
        if (j.at("format").get<std::string>() != "tsboost.forecaster") throw DataError("not a forecaster manifest");
        if (j.at("version").get<int>() != kForecasterFormatVersion) {
            throw DataError(fmt::format("unsupported forecaster manifest version {}", j.at("version").get<int>()));
        }
        if (j.at("kind").get<std::string>() != kind) {
            throw DataError(fmt::format("manifest describes a '{}' forecaster, expected '{}'",
                                        j.at("kind").get<std::string>(), kind));
        }
        return j;
    } catch (const json::exception& e) {
        throw DataError(fmt::format("malformed forecaster manifest '{}': {}", path.string(), e.what()));
    }
}

}  // namespace

void save_forecaster(const MultiOutputForecaster& f, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json engines = json::array();
    for (std::size_t k = 0; k < f.horizon(); ++k) {
        const auto name = fmt::format("engine_{}.json", k);
        gbrt::save_model(f.engines()[k], dir / name);
        engines.push_back(name);
    }
    const auto& w = f.window();
    write_json(json{{"format", "tsboost.forecaster"},
                    {"version", kForecasterFormatVersion},
                    {"kind", "window_multi_output"},
                    {"lookup", w.lookup},
                    {"horizon", w.horizon},
                    {"mode", std::string(to_string(w.mode))},
                    {"stride", w.stride},
                    {"include_series_id", w.include_series_id},
                    {"n_covariates", f.n_covariates()},
                    {"covariate_names", f.covariate_names()},
                    {"engines", std::move(engines)}},
               dir / "manifest.json");
}

void save_forecaster(const NaiveForecaster& f, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    gbrt::save_model(f.engine(), dir / "engine_0.json");
    write_json(json{{"format", "tsboost.forecaster"},
                    {"version", kForecasterFormatVersion},
                    {"kind", "point_wise"},
                    {"n_covariates", f.n_covariates()},
                    {"covariate_names", f.covariate_names()},
                    {"fallback", std::string(to_string(f.fallback()))},
                    {"engines", json::array({"engine_0.json"})}},
               dir / "manifest.json");
}

MultiOutputForecaster load_multi_output(const std::filesystem::path& dir) {
    const auto j = read_manifest(dir, "window_multi_output");
    try {
        WindowSpec w;
        w.lookup = j.at("lookup").get<std::size_t>();
        w.horizon = j.at("horizon").get<std::size_t>();
        const auto mode = parse_covariate_mode(j.at("mode").get<std::string>());
        if (!mode) throw DataError("manifest: unknown covariate mode");
        w.mode = *mode;
        w.stride = j.at("stride").get<std::size_t>();
        w.include_series_id = j.at("include_series_id").get<bool>();
        auto names = j.at("covariate_names").get<std::vector<std::string>>();
        if (names.size() != j.at("n_covariates").get<std::size_t>()) throw DataError("manifest: covariate count mismatch");
        std::vector<BoostedModel> engines;
        for (const auto& name : j.at("engines")) engines.push_back(gbrt::load_model(dir / name.get<std::string>()));
        return MultiOutputForecaster(w, std::move(names), std::move(engines));
    } catch (const json::exception& e) {
        throw DataError(fmt::format("malformed forecaster manifest: {}", e.what()));
    }
}

NaiveForecaster load_naive(const std::filesystem::path& dir) {
    const auto j = read_manifest(dir, "point_wise");
    try {
        const auto fallback = parse_naive_fallback(j.at("fallback").get<std::string>());
        if (!fallback) throw DataError("manifest: unknown fallback");
        auto names = j.at("covariate_names").get<std::vector<std::string>>();
        const auto engines = j.at("engines");
        if (engines.size() != 1) throw DataError("point-wise manifest must list exactly one engine");
        return NaiveForecaster(std::move(names), *fallback, gbrt::load_model(dir / engines[0].get<std::string>()));
    } catch (const json::exception& e) {
        throw DataError(fmt::format("malformed forecaster manifest: {}", e.what()));
    }
}

}  // namespace tsboost
