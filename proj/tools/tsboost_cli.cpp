// tsboost command-line harness.
//
//   tsboost prepare  <config> [--out FILE]
//   tsboost tune     <config>
//   tsboost run      <config>
//   tsboost compare  <report_a.csv> <report_b.csv> [--model-a M] [--model-b M]
//   tsboost plotdata <run_dir> [--out DIR]
//
// Exit status: 0 success, 1 config error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <iostream>

#include "tsboost/bench/experiment.hpp"
#include "tsboost/errors.hpp"
#include "tsboost/ingest.hpp"

namespace fs = std::filesystem;
using namespace tsboost;
using namespace tsboost::bench;

namespace {

struct GlobalOptions {
    std::vector<std::string> overrides;
    std::string data_dir;
};

fs::path resolve_data_dir(const GlobalOptions& g) {
    if (!g.data_dir.empty()) return g.data_dir;
    if (const char* env = std::getenv("TSBOOST_DATA_DIR")) return env;
    return "data";
}

ExperimentConfig load_config(const std::string& path, const GlobalOptions& g) {
    auto kv = read_config_file(path);
    for (const auto& o : g.overrides) apply_override(kv, o);
    return parse_config(kv, resolve_data_dir(g));
}

const metrics::EvalReport& pick(const std::vector<metrics::EvalReport>& reports, const std::string& model,
                                const std::string& file) {
    if (model.empty()) {
        if (reports.size() != 1) {
            throw ConfigError(fmt::format("'{}' holds {} models; choose one with --model-a/--model-b", file,
                                          reports.size()));
        }
        return reports.front();
    }
    for (const auto& r : reports)
        if (r.model == model) return r;
    throw ConfigError(fmt::format("'{}' has no rows for model '{}'", file, model));
}

int run(int argc, char** argv) {
    CLI::App app{"Window-based gradient-boosted tree forecasting benchmark"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--set", g.overrides, "Override a config key: section.key=value (repeatable)");
    app.add_option("--data-dir", g.data_dir, "Directory relative dataset paths resolve against "
                                             "(default: $TSBOOST_DATA_DIR, else ./data)");
    app.add_flag_callback("--version", [] {
        std::cout << "tsboost " << TSBOOST_VERSION << '\n';
        std::exit(0);
    });

    std::string config_path;
    std::string out_path;

    auto* prepare = app.add_subcommand("prepare", "Ingest, impute and derive covariates; write the canonical frame");
    prepare->add_option("config", config_path)->required();
    prepare->add_option("--out", out_path, "Output file (default: <output.dir>/prepared.csv)");

    auto* tune_cmd = app.add_subcommand("tune", "Grid search on the validation split only");
    tune_cmd->add_option("config", config_path)->required();

    auto* run_cmd = app.add_subcommand("run", "Grid search, final retraining and test evaluation");
    run_cmd->add_option("config", config_path)->required();

    std::string report_a, report_b, model_a, model_b;
    auto* compare_cmd = app.add_subcommand("compare", "Relative metric differences (b - a) / a");
    compare_cmd->add_option("report_a", report_a)->required();
    compare_cmd->add_option("report_b", report_b)->required();
    compare_cmd->add_option("--model-a", model_a);
    compare_cmd->add_option("--model-b", model_b);

    std::string run_dir;
    auto* plot_cmd = app.add_subcommand("plotdata", "Per-series (time, actual, predicted) files from a run");
    plot_cmd->add_option("run_dir", run_dir)->required();
    plot_cmd->add_option("--out", out_path, "Output directory (default: <run_dir>/plot)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (prepare->parsed()) {
        const auto config = load_config(config_path, g);
        const auto frame = prepare_frame(config);
        const fs::path out = out_path.empty() ? config.output_dir / "prepared.csv" : fs::path(out_path);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        write_delimited(frame, out);
        std::cout << fmt::format("{}: {} series x {} steps, {} covariates -> {}\n", config.dataset.name,
                                 frame.n_series(), frame.length(), frame.n_covariates(), out.string());
    } else if (tune_cmd->parsed()) {
        const auto config = load_config(config_path, g);
        const auto frame = prepare_frame(config);
        config.split.validate(frame.length());
        const auto selections = tune(config, frame.slice(0, config.split.train_len));
        fs::create_directories(config.output_dir);
        const auto json = render_selection_json(selections);
        std::ofstream(config.output_dir / "selection.json") << json;
        for (const auto& s : selections)
            std::cout << fmt::format("{}: grid point {}: {}\n", to_string(s.model), s.grid_index, describe(s.params));
    } else if (run_cmd->parsed()) {
        const auto config = load_config(config_path, g);
        const auto result = run_experiment(config);
        write_run_outputs(config, result);
        std::cout << render_report(config, result);
        std::cout << fmt::format("\nwrote {} ({:.1f} s)\n", config.output_dir.string(), result.wall_seconds);
    } else if (compare_cmd->parsed()) {
        const auto a_reports = read_report_csv(report_a);
        const auto b_reports = read_report_csv(report_b);
        const auto& a = pick(a_reports, model_a, report_a);
        const auto& b = pick(b_reports, model_b, report_b);
        std::cout << render_comparison(a, b, compare(a, b));
    } else if (plot_cmd->parsed()) {
        auto reports = read_report_csv(fs::path(run_dir) / "report.csv");
        read_predictions_csv(fs::path(run_dir) / "predictions.csv", reports);
        const fs::path out = out_path.empty() ? fs::path(run_dir) / "plot" : fs::path(out_path);
        const auto files = emit_plot_data(reports, out);
        std::cout << fmt::format("wrote {} files to {}\n", files, out.string());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
