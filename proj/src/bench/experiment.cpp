#include "tsboost/bench/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "tsboost/errors.hpp"

namespace tsboost::bench {

using metrics::EvalReport;
using metrics::Metric;
using nlohmann::json;

namespace {

SeriesFrame drop_covariates(const SeriesFrame& frame) {
    FrameParts p = frame.parts();
    p.n_covariates = 0;
    p.covariates.clear();
    p.covariate_names.clear();
    return SeriesFrame(std::move(p));
}

// Re-throws the captured error with `context` prepended, keeping its category.
[[noreturn]] void rethrow_with_context(const std::exception_ptr& error, const std::string& context) {
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", context, e.what()));
    } catch (const DataError& e) {
        throw DataError(fmt::format("{}: {}", context, e.what()));
    } catch (const NumericalError& e) {
        throw NumericalError(fmt::format("{}: {}", context, e.what()));
    }
}

double score(Metric m, std::span<const double> y, std::span<const double> yhat, std::size_t n_series) {
    switch (m) {
        case Metric::rmse: return metrics::rmse(y, yhat);
        case Metric::mae: return metrics::mae(y, yhat);
        case Metric::wape: return metrics::wape(y, yhat);
        case Metric::mape: return metrics::mape(y, yhat).value;
        case Metric::rse: return metrics::rse(y, yhat);
        // Selection minimizes, so correlation enters negated.
        case Metric::corr: return -metrics::corr(y, yhat, n_series).value;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Scaled-space predictions laid out (series, point) back to original units.
void unscale(const Standardizer& scaler, std::vector<double>& values, std::size_t n_series) {
    if (scaler.empty() || values.empty()) return;
    const auto per_series = values.size() / n_series;
    for (std::size_t i = 0; i < n_series; ++i)
        for (std::size_t t = 0; t < per_series; ++t) values[i * per_series + t] = scaler.inverse(i, values[i * per_series + t]);
}

std::vector<double> leading_targets(const SeriesFrame& frame, std::size_t count) {
    std::vector<double> out;
    out.reserve(frame.n_series() * count);
    for (std::size_t i = 0; i < frame.n_series(); ++i) {
        const auto y = frame.target_series(i);
        out.insert(out.end(), y.begin(), y.begin() + static_cast<std::ptrdiff_t>(count));
    }
    return out;
}

// Training frame, evaluation frame and their scaled versions for one stage.
struct Stage {
    SeriesFrame train;
    SeriesFrame eval;
    Standardizer scaler;
    SeriesFrame train_scaled;
    SeriesFrame eval_scaled;
};

Stage make_stage(SeriesFrame train, SeriesFrame eval, bool standardize) {
    Stage s{std::move(train), std::move(eval), {}, {}, {}};
    if (standardize) {
        s.scaler = Standardizer::fit(s.train);
        s.train_scaled = s.scaler.transform(s.train);
        s.eval_scaled = s.scaler.transform(s.eval);
    } else {
        s.train_scaled = s.train;
        s.eval_scaled = s.eval;
    }
    return s;
}

std::vector<int> engine_rounds(const std::vector<gbrt::BoostedModel>& engines) {
    std::vector<int> out;
    for (const auto& e : engines) out.push_back(static_cast<int>(std::max<std::size_t>(1, e.trees().size())));
    return out;
}

Selection pick_best(ModelKind model, const std::vector<gbrt::BoostParams>& grid, std::vector<Trial> trials) {
    Selection sel;
    sel.model = model;
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const auto& t : trials) {
        if (!std::isnan(t.score) && (!found || t.score < best)) {
            best = t.score;
            sel.grid_index = t.grid_index;
            sel.rounds_per_engine = t.rounds_per_engine;
            found = true;
        }
    }
    if (!found) throw NumericalError(fmt::format("every grid point of model '{}' scored NaN", to_string(model)));
    sel.params = grid[sel.grid_index];
    sel.trials = std::move(trials);
    return sel;
}

std::string format_number(double v) { return std::isnan(v) ? std::string("nan") : fmt::format("{}", v); }

double parse_double(std::string_view text, const std::string& where) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw DataError(fmt::format("{}: '{}' is not a number", where, text));
    }
    return v;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (auto& c : out) {
        const auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || c == '_' || c == '-' || c == '.')) c = '_';
    }
    return out.empty() ? std::string("_") : out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
    out << text;
}

}  // namespace

SeriesFrame prepare_frame(const ExperimentConfig& config) {
    SeriesFrame frame = load_delimited(config.dataset.path, config.dataset.schema);
    if (!config.dataset.series.empty()) {
        for (auto i : config.dataset.series) {
            if (i >= frame.n_series()) {
                throw ConfigError(fmt::format("dataset.series: index {} but the file has {} series", i, frame.n_series()));
            }
        }
        frame = frame.select_series(config.dataset.series);
    }
    if (config.covariates == CovariatePlan::none || config.covariates == CovariatePlan::time) {
        frame = drop_covariates(frame);
    }
    frame = impute_missing(frame, config.dataset.impute);
    if (config.covariates == CovariatePlan::time || config.covariates == CovariatePlan::native_time) {
        frame = derive_time_covariates(frame, config.time_features);
    }
    frame.require_finite();
    return frame;
}

std::vector<Selection> tune(const ExperimentConfig& config, const SeriesFrame& prefix) {
    const auto& grid = config.grid;
    const auto v = config.split.valid_len;
    std::vector<Selection> out;
    if (v == 0) {
        for (auto model : config.models) {
            if (model == ModelKind::persistence) continue;
            Selection sel;
            sel.model = model;
            sel.params = grid.front();
            out.push_back(sel);
        }
        return out;
    }

    const auto w = config.window;
    if (v < w.horizon) {
        throw ConfigError(fmt::format("split.valid = {} is shorter than the horizon {}", v, w.horizon));
    }
    const Stage stage = make_stage(prefix.slice(0, prefix.length() - v), prefix.slice(prefix.length() - v, prefix.length()),
                                   config.standardize);
    const auto n = prefix.n_series();
    const Metric primary = config.metrics.front();

    for (auto model : config.models) {
        if (model == ModelKind::persistence) continue;
        std::vector<Trial> trials(grid.size());
        std::vector<std::exception_ptr> errors(grid.size());

        if (model == ModelKind::wb) {
            const auto train_set = make_training_set(stage.train_scaled, w);
            const auto eval = make_test_set(stage.train_scaled, stage.eval_scaled, w);
            const auto covered = eval.instances.size() / n * w.horizon;
            const auto truth = leading_targets(stage.eval, covered);
            const auto n_grid = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for num_threads(config.workers) schedule(dynamic)
            for (std::ptrdiff_t gg = 0; gg < n_grid; ++gg) {
                const auto g = static_cast<std::size_t>(gg);
                try {
                    WbFitOptions options;
                    if (grid[g].early_stopping_rounds > 0) options.eval = &eval.instances;
                    const auto f = fit_wb(train_set, w, stage.train_scaled.covariate_names(), grid[g], options);
                    auto pred = f.predict_rows(eval.instances);
                    unscale(stage.scaler, pred, n);
                    trials[g].grid_index = g;
                    trials[g].score = score(primary, truth, pred, n);
                    if (grid[g].early_stopping_rounds > 0) trials[g].rounds_per_engine = engine_rounds(f.engines());
                } catch (...) {
                    errors[g] = std::current_exception();
                }
            }
        } else {
            const auto truth = leading_targets(stage.eval, stage.eval.length());
            const auto n_grid = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for num_threads(config.workers) schedule(dynamic)
            for (std::ptrdiff_t gg = 0; gg < n_grid; ++gg) {
                const auto g = static_cast<std::size_t>(gg);
                try {
                    const bool es = grid[g].early_stopping_rounds > 0;
                    const auto f =
                        fit_naive(stage.train_scaled, grid[g], config.naive_fallback, es ? &stage.eval_scaled : nullptr);
                    auto pred = f.forecast(stage.eval_scaled);
                    unscale(stage.scaler, pred, n);
                    trials[g].grid_index = g;
                    trials[g].score = score(primary, truth, pred, n);
                    if (es) trials[g].rounds_per_engine = engine_rounds({f.engine()});
                } catch (...) {
                    errors[g] = std::current_exception();
                }
            }
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            if (errors[g]) {
                rethrow_with_context(errors[g], fmt::format("model {} grid point {} ({})", to_string(model), g,
                                                            describe(grid[g])));
            }
        }
        out.push_back(pick_best(model, grid, std::move(trials)));
    }
    return out;
}

RunResult run_experiment(const ExperimentConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    const SeriesFrame frame = prepare_frame(config);
    config.split.validate(frame.length());
    const auto t_prime = config.split.train_len;
    const auto tau = config.split.test_len;
    const auto w = config.window;
    const auto h = w.horizon;
    const auto n = frame.n_series();

    RunResult result;
    {
        // Selection only ever sees [0, t').
        const SeriesFrame prefix = frame.slice(0, t_prime);
        result.selections = tune(config, prefix);
    }

    const Stage stage = make_stage(frame.slice(0, t_prime), frame.slice(t_prime, t_prime + tau), config.standardize);
    const auto tiles = make_test_set(stage.train_scaled, stage.eval_scaled, w);
    const auto blocks = tiles.instances.size() / n;
    const auto covered = blocks * h;
    if (covered == 0) throw ConfigError(fmt::format("split.test = {} holds no complete horizon of {}", tau, h));
    const auto truth = leading_targets(stage.eval, covered);

    auto& audit = result.audit;
    audit.train_end = t_prime;
    audit.test_windows = blocks;
    audit.dropped_points = tiles.dropped_points;
    audit.first_test_target = std::numeric_limits<std::size_t>::max();
    for (std::size_t r = 0; r < tiles.instances.size(); ++r) {
        audit.first_test_target = std::min(audit.first_test_target, tiles.instances.anchor(r) + 1);
        audit.last_test_target = std::max(audit.last_test_target, tiles.instances.anchor(r) + h);
    }
    audit.last_train_target = t_prime - 1;  // point-wise and persistence models read at most [0, t')

    auto selection_for = [&](ModelKind m) -> const Selection& {
        for (const auto& s : result.selections)
            if (s.model == m) return s;
        throw std::logic_error("no selection for model");
    };

    std::vector<std::string> common_notes;
    common_notes.push_back(fmt::format("test region [{}, {}), {} windows of {} steps per series", t_prime,
                                       t_prime + tau, blocks, h));
    if (tiles.dropped_points > 0) {
        common_notes.push_back(fmt::format("final {} test points dropped: test length is not a multiple of h",
                                           tiles.dropped_points));
    }

    for (auto model : config.models) {
        std::vector<double> pred;
        std::vector<std::string> notes = common_notes;
        if (model == ModelKind::wb) {
            const auto& sel = selection_for(model);
            const auto train_set = make_training_set(stage.train_scaled, w);
            for (std::size_t r = 0; r < train_set.size(); ++r) {
                audit.last_train_target = std::max(audit.last_train_target, train_set.anchor(r) + h);
            }
            WbFitOptions options;
            options.rounds_per_engine = sel.rounds_per_engine;
            auto params = sel.params;
            params.early_stopping_rounds = 0;
            const auto f = fit_wb(train_set, w, stage.train_scaled.covariate_names(), params, options);
            pred = f.predict_rows(tiles.instances);  // rows (i, b), columns k → point (i, b·h + k)
            unscale(stage.scaler, pred, n);
        } else if (model == ModelKind::naive) {
            const auto& sel = selection_for(model);
            auto params = sel.params;
            params.early_stopping_rounds = 0;
            if (!sel.rounds_per_engine.empty()) params.n_trees = sel.rounds_per_engine.front();
            const auto f = fit_naive(stage.train_scaled, params, config.naive_fallback);
            pred = f.forecast(stage.eval_scaled.slice(0, covered));
            unscale(stage.scaler, pred, n);
            notes.push_back(f.uses_time_index() ? "point-wise inputs: absolute time index (no covariates available)"
                                                : fmt::format("point-wise inputs: {} concurrent covariates",
                                                              f.n_covariates()));
        } else {
            pred.resize(n * covered);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t b = 0; b < blocks; ++b) {
                    const auto fc = persistence(frame.target(i, t_prime - 1 + b * h), h);
                    std::copy(fc.begin(), fc.end(), pred.begin() + static_cast<std::ptrdiff_t>(i * covered + b * h));
                }
            }
        }
        if (audit.last_train_target >= audit.train_end || audit.first_test_target < audit.train_end) {
            throw std::logic_error(fmt::format("protocol violation: training reached index {}, test starts at {}",
                                               audit.last_train_target, audit.first_test_target));
        }

        auto report = metrics::evaluate(config.dataset.name, std::string(to_string(model)), config.digest, truth, pred,
                                        n, config.metrics);
        report.notes.insert(report.notes.begin(), notes.begin(), notes.end());
        if (config.retain_predictions) {
            for (std::size_t i = 0; i < n; ++i) {
                metrics::SeriesTrace trace;
                trace.series = frame.series_names()[i];
                for (std::size_t j = 0; j < covered; ++j) {
                    trace.time_index.push_back(t_prime + j);
                    trace.actual.push_back(truth[i * covered + j]);
                    trace.predicted.push_back(pred[i * covered + j]);
                }
                report.traces.push_back(std::move(trace));
            }
        }
        result.reports.push_back(std::move(report));
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

std::string render_selection_json(const std::vector<Selection>& selections) {
    json out = json::array();
    for (const auto& s : selections) {
        json trials = json::array();
        for (const auto& t : s.trials) {
            trials.push_back(json{{"grid_index", t.grid_index},
                                  {"score", std::isnan(t.score) ? json(nullptr) : json(t.score)},
                                  {"rounds_per_engine", t.rounds_per_engine}});
        }
        out.push_back(json{{"model", std::string(to_string(s.model))},
                           {"grid_index", s.grid_index},
                           {"params", describe(s.params)},
                           {"rounds_per_engine", s.rounds_per_engine},
                           {"trials", std::move(trials)}});
    }
    return out.dump(1) + "\n";
}

std::string render_report(const ExperimentConfig& config, const RunResult& result) {
    std::string out;
    out += fmt::format("dataset        {}\n", config.dataset.name);
    out += fmt::format("config digest  {}\n", config.digest);
    out += fmt::format("window         w={} h={} mode={} stride={}\n", config.window.lookup, config.window.horizon,
                       to_string(config.window.mode), config.window.stride);
    out += fmt::format("covariates     {}\n", to_string(config.covariates));
    out += fmt::format("split          train={} valid={} test={}\n", config.split.train_len, config.split.valid_len,
                       config.split.test_len);
    out += fmt::format("grid points    {}\n\n", config.grid.size());
    out += metrics::render_table(result.reports, config.metrics);
    out += "\nselected\n";
    for (const auto& s : result.selections) {
        out += fmt::format("  {:<6} grid point {}: {}\n", to_string(s.model), s.grid_index, describe(s.params));
        if (!s.rounds_per_engine.empty()) {
            out += fmt::format("         rounds per engine: {}\n", fmt::join(s.rounds_per_engine, ","));
        }
    }
    return out;
}

void write_run_outputs(const ExperimentConfig& config, const RunResult& result) {
    const auto& dir = config.output_dir;
    std::filesystem::create_directories(dir);
    write_text(dir / "report.txt", render_report(config, result));
    write_text(dir / "report.csv", metrics::render_csv(result.reports));
    write_text(dir / "selection.json", render_selection_json(result.selections));

    const auto& a = result.audit;
    const json manifest{{"dataset", config.dataset.name},
                        {"dataset_path", config.dataset.path_text},
                        {"config_digest", config.digest},
                        {"config", config.canonical_text},
                        {"seed", config.seed},
                        {"version", TSBOOST_VERSION},
                        {"wall_seconds", result.wall_seconds},
                        {"protocol",
                         {{"train_end", a.train_end},
                          {"last_train_target", a.last_train_target},
                          {"first_test_target", a.first_test_target},
                          {"last_test_target", a.last_test_target},
                          {"test_windows_per_series", a.test_windows},
                          {"dropped_points", a.dropped_points}}}};
    write_text(dir / "manifest.json", manifest.dump(1) + "\n");

    if (config.retain_predictions) {
        std::string csv = "dataset,model,series,time_index,actual,predicted\n";
        for (const auto& r : result.reports)
            for (const auto& t : r.traces)
                for (std::size_t j = 0; j < t.time_index.size(); ++j)
                    csv += fmt::format("{},{},{},{},{},{}\n", r.dataset, r.model, t.series, t.time_index[j],
                                       format_number(t.actual[j]), format_number(t.predicted[j]));
        write_text(dir / "predictions.csv", csv);
    }
}

std::vector<MetricDelta> compare(const EvalReport& a, const EvalReport& b) {
    if (a.dataset != b.dataset) {
        throw DataError(fmt::format("cannot compare reports from different datasets ('{}' vs '{}')", a.dataset, b.dataset));
    }
    std::vector<std::string> names_a, names_b;
    for (const auto& [k, v] : a.values) names_a.push_back(k);
    for (const auto& [k, v] : b.values) names_b.push_back(k);
    std::sort(names_a.begin(), names_a.end());
    std::sort(names_b.begin(), names_b.end());
    if (names_a != names_b) throw DataError("cannot compare reports with different metric sets");

    std::vector<MetricDelta> out;
    for (const auto& [name, va] : a.values) {
        MetricDelta d;
        d.metric = name;
        d.a = va;
        d.b = *b.value(name);
        const bool higher_is_better = name == "corr";
        if (std::isnan(d.a) || std::isnan(d.b)) {
            d.relative = std::numeric_limits<double>::quiet_NaN();
            d.verdict = "undefined (missing value)";
        } else if (d.a == 0.0) {
            d.relative = d.b == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
            d.verdict = d.b == 0.0 ? "equal" : "undefined (a = 0)";
        } else {
            d.relative = (d.b - d.a) / std::abs(d.a);
            if (d.b == d.a) {
                d.verdict = "equal";
            } else {
                d.verdict = (d.b < d.a) != higher_is_better ? "b better" : "b worse";
            }
        }
        out.push_back(d);
    }
    return out;
}

std::string render_comparison(const EvalReport& a, const EvalReport& b, const std::vector<MetricDelta>& deltas) {
    std::string out = fmt::format("dataset {}: a = {}, b = {}\n", a.dataset, a.model, b.model);
    out += fmt::format("{:<6}  {:>12}  {:>12}  {:>10}  {}\n", "metric", "a", "b", "(b-a)/a", "verdict");
    for (const auto& d : deltas) {
        const auto rel = std::isnan(d.relative) ? std::string("n/a") : fmt::format("{:+.2f}%", 100.0 * d.relative);
        out += fmt::format("{:<6}  {:>12.6g}  {:>12.6g}  {:>10}  {}\n", d.metric, d.a, d.b, rel, d.verdict);
    }
    return out;
}

std::vector<EvalReport> read_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open report '{}'", path.string()));
    std::string line;
    if (!std::getline(in, line) || line != "dataset,model,metric,value,config_digest") {
        throw DataError(fmt::format("'{}' is not a report file (unexpected header)", path.string()));
    }
    std::vector<EvalReport> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 5) throw DataError(fmt::format("{} row {}: expected 5 fields", path.string(), row));
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const EvalReport& r) { return r.dataset == f[0] && r.model == f[1]; });
        if (it == out.end()) {
            out.push_back(EvalReport{f[0], f[1], f[4], {}, {}, {}});
            it = out.end() - 1;
        }
        it->values.emplace_back(f[2], parse_double(f[3], fmt::format("{} row {}", path.string(), row)));
    }
    return out;
}

void read_predictions_csv(const std::filesystem::path& path, std::vector<EvalReport>& reports) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("no retained predictions at '{}'; set eval.retain_predictions = true and rerun",
                                    path.string()));
    }
    std::string line;
    if (!std::getline(in, line) || line != "dataset,model,series,time_index,actual,predicted") {
        throw DataError(fmt::format("'{}' is not a predictions file (unexpected header)", path.string()));
    }
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        const auto where = fmt::format("{} row {}", path.string(), row);
        if (f.size() != 6) throw DataError(fmt::format("{}: expected 6 fields", where));
        auto it = std::find_if(reports.begin(), reports.end(),
                               [&](const EvalReport& r) { return r.dataset == f[0] && r.model == f[1]; });
        if (it == reports.end()) continue;
        if (it->traces.empty() || it->traces.back().series != f[2]) it->traces.push_back(metrics::SeriesTrace{f[2], {}, {}, {}});
        auto& t = it->traces.back();
        t.time_index.push_back(static_cast<std::size_t>(parse_double(f[3], where)));
        t.actual.push_back(parse_double(f[4], where));
        t.predicted.push_back(parse_double(f[5], where));
    }
}

std::size_t emit_plot_data(std::span<const EvalReport> reports, const std::filesystem::path& dir) {
    for (const auto& r : reports) {
        if (r.traces.empty()) {
            throw DataError(fmt::format("report {}/{} carries no predictions; set eval.retain_predictions = true and "
                                        "rerun",
                                        r.dataset, r.model));
        }
    }
    std::size_t files = 0;
    for (const auto& r : reports) {
        std::filesystem::create_directories(dir);
        for (const auto& t : r.traces) {
            std::string csv = "time_index,actual,predicted\n";
            for (std::size_t j = 0; j < t.time_index.size(); ++j)
                csv += fmt::format("{},{},{}\n", t.time_index[j], format_number(t.actual[j]), format_number(t.predicted[j]));
            write_text(dir / fmt::format("{}__{}__{}.csv", sanitize(r.dataset), sanitize(r.model), sanitize(t.series)),
                       csv);
            ++files;
        }
    }
    return files;
}

}  // namespace tsboost::bench
