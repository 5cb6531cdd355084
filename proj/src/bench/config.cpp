#include "tsboost/bench/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <fmt/format.h>
#include <set>

#include "tsboost/calendar.hpp"
#include "tsboost/errors.hpp"

namespace tsboost::bench {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Every key the harness understands. Lookups of anything else are a typo.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "dataset.name", "dataset.path", "dataset.layout", "dataset.delimiter", "dataset.timestamp_column",
        "dataset.timestamp_format", "dataset.calendar_columns", "dataset.start", "dataset.sample_rate",
        "dataset.targets", "dataset.covariates", "dataset.onehot", "dataset.ignore", "dataset.series_id_column",
        "dataset.unlisted", "dataset.missing_tokens", "dataset.impute", "dataset.series",
        "split.train", "split.test", "split.valid",
        "window.lookup", "window.horizon", "window.mode", "window.stride", "window.include_series_id",
        "covariates.plan", "covariates.time_features",
        "models.run", "models.naive_fallback",
        "boost.n_trees", "boost.learning_rate", "boost.max_depth", "boost.lambda", "boost.gamma",
        "boost.min_child_weight", "boost.subsample", "boost.colsample", "boost.split_method", "boost.max_bins",
        "boost.early_stopping_rounds", "boost.base_score",
        "eval.metrics", "eval.standardize", "eval.retain_predictions",
        "output.dir",
        "run.seed", "run.workers"};
    return keys;
}

class Reader {
public:
    explicit Reader(const KeyValues& kv) : kv_(kv) {}

    std::optional<std::string> get(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        return it->second;
    }
    std::string str(const std::string& key, std::string fallback = {}) const { return get(key).value_or(fallback); }
    std::string required(const std::string& key) const {
        auto v = get(key);
        if (!v || v->empty()) throw ConfigError(fmt::format("missing required key '{}'", key));
        return *v;
    }
    std::vector<std::string> list(const std::string& key) const { return split_list(str(key)); }

    template <typename T>
    T number(const std::string& key, T fallback) const {
        const auto v = get(key);
        return v ? parse_number<T>(key, *v) : fallback;
    }

    bool boolean(const std::string& key, bool fallback) const {
        const auto v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "yes" || *v == "1") return true;
        if (*v == "false" || *v == "no" || *v == "0") return false;
        throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, *v));
    }

    template <typename T>
    static T parse_number(const std::string& key, std::string_view text) {
        T value{};
        const auto s = trim(text);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, s));
        }
        return value;
    }

private:
    const KeyValues& kv_;
};

template <typename T, typename Parse>
T parse_enum(const Reader& r, const std::string& key, T fallback, Parse parse) {
    const auto v = r.get(key);
    if (!v) return fallback;
    const auto parsed = parse(*v);
    if (!parsed) throw ConfigError(fmt::format("{}: unknown value '{}'", key, *v));
    return *parsed;
}

// "0-69,75" → 0..69, 75
std::vector<std::size_t> parse_index_list(const std::string& key, const std::vector<std::string>& items) {
    std::vector<std::size_t> out;
    for (const auto& item : items) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(Reader::parse_number<std::size_t>(key, item));
            continue;
        }
        const auto lo = Reader::parse_number<std::size_t>(key, item.substr(0, dash));
        const auto hi = Reader::parse_number<std::size_t>(key, item.substr(dash + 1));
        if (hi < lo) throw ConfigError(fmt::format("{}: empty range '{}'", key, item));
        for (auto i = lo; i <= hi; ++i) out.push_back(i);
    }
    return out;
}

void check_identifier(const std::string& key, const std::string& value) {
    const bool ok = !value.empty() && std::all_of(value.begin(), value.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
    if (!ok) throw ConfigError(fmt::format("{}: '{}' must be non-empty and use only [A-Za-z0-9_.-]", key, value));
}

Schema parse_schema(const Reader& r) {
    Schema s;
    s.layout = parse_enum(r, "dataset.layout", Layout::wide, [](std::string_view v) -> std::optional<Layout> {
        if (v == "wide") return Layout::wide;
        if (v == "long") return Layout::long_;
        return std::nullopt;
    });
    const auto delim = r.str("dataset.delimiter", ",");
    if (delim == "tab") {
        s.delimiter = '\t';
    } else if (delim.size() == 1) {
        s.delimiter = delim[0];
    } else {
        throw ConfigError(fmt::format("dataset.delimiter: expected one character or 'tab', got '{}'", delim));
    }
    s.timestamp_column = r.str("dataset.timestamp_column");
    s.timestamp_format = parse_enum(r, "dataset.timestamp_format", TimestampFormat::iso8601,
                                    [](std::string_view v) -> std::optional<TimestampFormat> {
                                        if (v == "iso8601") return TimestampFormat::iso8601;
                                        if (v == "epoch_seconds") return TimestampFormat::epoch_seconds;
                                        return std::nullopt;
                                    });
    const auto cal = r.list("dataset.calendar_columns");
    if (cal.size() > 4) throw ConfigError("dataset.calendar_columns: at most year, month, day, hour");
    std::string* parts[] = {&s.calendar_columns.year, &s.calendar_columns.month, &s.calendar_columns.day,
                            &s.calendar_columns.hour};
    for (std::size_t k = 0; k < cal.size(); ++k) *parts[k] = cal[k];
    if (const auto start = r.get("dataset.start")) {
        s.start = calendar::parse_iso8601(*start);
        if (!s.start) throw ConfigError(fmt::format("dataset.start: '{}' is not an ISO-8601 date", *start));
    }
    if (const auto rate = r.get("dataset.sample_rate")) {
        const auto d = calendar::parse_duration(*rate);
        if (!d) throw ConfigError(fmt::format("dataset.sample_rate: '{}' is not a duration", *rate));
        s.sample_rate = *d;
    }
    s.target_columns = r.list("dataset.targets");
    s.covariate_columns = r.list("dataset.covariates");
    s.onehot_columns = r.list("dataset.onehot");
    s.ignore_columns = r.list("dataset.ignore");
    s.series_id_column = r.str("dataset.series_id_column");
    s.unlisted = parse_enum(r, "dataset.unlisted", UnlistedRole::reject,
                            [](std::string_view v) -> std::optional<UnlistedRole> {
                                if (v == "reject") return UnlistedRole::reject;
                                if (v == "ignore") return UnlistedRole::ignore;
                                if (v == "target") return UnlistedRole::target;
                                if (v == "covariate") return UnlistedRole::covariate;
                                return std::nullopt;
                            });
    if (const auto tokens = r.get("dataset.missing_tokens")) {
        s.missing_tokens.clear();
        for (const auto& t : split_list(*tokens)) s.missing_tokens.push_back(t == "<empty>" ? std::string() : t);
    }
    return s;
}

// Cartesian product of the [boost] lists; the last key varies fastest.
std::vector<gbrt::BoostParams> parse_grid(const Reader& r, std::uint64_t seed) {
    std::vector<gbrt::BoostParams> grid{gbrt::BoostParams{}};
    grid.front().seed = seed;
    auto expand = [&](const std::string& key, auto assign) {
        const auto values = r.list(key);
        if (values.empty()) return;
        std::vector<gbrt::BoostParams> next;
        for (const auto& base : grid) {
            for (const auto& v : values) {
                auto p = base;
                assign(p, key, v);
                next.push_back(p);
            }
        }
        grid = std::move(next);
    };
    using P = gbrt::BoostParams;
    using R = Reader;
    expand("boost.n_trees", [](P& p, const std::string& k, const std::string& v) { p.n_trees = R::parse_number<int>(k, v); });
    expand("boost.learning_rate",
           [](P& p, const std::string& k, const std::string& v) { p.learning_rate = R::parse_number<double>(k, v); });
    expand("boost.max_depth", [](P& p, const std::string& k, const std::string& v) { p.max_depth = R::parse_number<int>(k, v); });
    expand("boost.lambda", [](P& p, const std::string& k, const std::string& v) { p.lambda = R::parse_number<double>(k, v); });
    expand("boost.gamma", [](P& p, const std::string& k, const std::string& v) { p.gamma = R::parse_number<double>(k, v); });
    expand("boost.min_child_weight",
           [](P& p, const std::string& k, const std::string& v) { p.min_child_weight = R::parse_number<double>(k, v); });
    expand("boost.subsample", [](P& p, const std::string& k, const std::string& v) { p.subsample = R::parse_number<double>(k, v); });
    expand("boost.colsample", [](P& p, const std::string& k, const std::string& v) { p.colsample = R::parse_number<double>(k, v); });
    expand("boost.split_method", [](P& p, const std::string& k, const std::string& v) {
        const auto m = gbrt::parse_split_method(v);
        if (!m) throw ConfigError(fmt::format("{}: unknown value '{}'", k, v));
        p.split_method = *m;
    });
    expand("boost.max_bins", [](P& p, const std::string& k, const std::string& v) { p.max_bins = R::parse_number<int>(k, v); });
    expand("boost.early_stopping_rounds", [](P& p, const std::string& k, const std::string& v) {
        p.early_stopping_rounds = R::parse_number<int>(k, v);
    });
    expand("boost.base_score", [](P& p, const std::string& k, const std::string& v) {
        if (v == "mean") {
            p.base_score.reset();
        } else {
            p.base_score = R::parse_number<double>(k, v);
        }
    });
    for (std::size_t g = 0; g < grid.size(); ++g) {
        try {
            grid[g].validate();
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("grid point {} ({}): {}", g, describe(grid[g]), e.what()));
        }
    }
    return grid;
}

}  // namespace

std::string_view to_string(CovariatePlan plan) {
    switch (plan) {
        case CovariatePlan::none: return "none";
        case CovariatePlan::time: return "time";
        case CovariatePlan::native: return "native";
        case CovariatePlan::native_time: return "native+time";
    }
    return "?";
}

std::optional<CovariatePlan> parse_covariate_plan(std::string_view text) {
    for (auto p : {CovariatePlan::none, CovariatePlan::time, CovariatePlan::native, CovariatePlan::native_time})
        if (to_string(p) == text) return p;
    return std::nullopt;
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::wb: return "wb";
        case ModelKind::naive: return "naive";
        case ModelKind::persistence: return "persistence";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    for (auto k : {ModelKind::wb, ModelKind::naive, ModelKind::persistence})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        auto item = trim(text.substr(pos, end - pos));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string describe(const gbrt::BoostParams& p) {
    return fmt::format(
        "n_trees={} learning_rate={} max_depth={} lambda={} gamma={} min_child_weight={} subsample={} colsample={} "
        "split_method={} max_bins={} early_stopping_rounds={} base_score={} seed={}",
        p.n_trees, p.learning_rate, p.max_depth, p.lambda, p.gamma, p.min_child_weight, p.subsample, p.colsample,
        gbrt::to_string(p.split_method), p.max_bins, p.early_stopping_rounds,
        p.base_score ? fmt::format("{}", *p.base_score) : std::string("mean"), p.seed);
}

KeyValues read_config_file(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(fmt::format("cannot read config '{}': {}", path.string(), e.what()));
    }
    KeyValues kv;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(fmt::format("{}: key '{}' is outside any [section]", path.string(), section));
        for (const auto& [key, value] : body) kv[section + "." + key] = trim(value.data());
    }
    return kv;
}

void apply_override(KeyValues& kv, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(fmt::format("override '{}' is not of the form section.key=value", assignment));
    }
    const auto key = trim(assignment.substr(0, eq));
    if (!known_keys().contains(key)) throw ConfigError(fmt::format("override names unknown key '{}'", key));
    kv[key] = trim(assignment.substr(eq + 1));
}

ExperimentConfig parse_config(const KeyValues& kv, const std::filesystem::path& data_dir) {
    for (const auto& [key, value] : kv) {
        if (!known_keys().contains(key)) throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
    const Reader r(kv);
    ExperimentConfig c;

    c.dataset.name = r.required("dataset.name");
    check_identifier("dataset.name", c.dataset.name);
    c.dataset.path_text = r.required("dataset.path");
    c.dataset.path = std::filesystem::path(c.dataset.path_text);
    if (c.dataset.path.is_relative()) c.dataset.path = data_dir / c.dataset.path;
    c.dataset.schema = parse_schema(r);
    c.dataset.impute = parse_enum(r, "dataset.impute", ImputePolicy::forward_fill, parse_impute_policy);
    c.dataset.series = parse_index_list("dataset.series", r.list("dataset.series"));

    c.split.train_len = r.number<std::size_t>("split.train", 0);
    c.split.test_len = r.number<std::size_t>("split.test", 0);
    c.split.valid_len = r.number<std::size_t>("split.valid", 0);
    if (c.split.train_len == 0 || c.split.test_len == 0) throw ConfigError("split.train and split.test are required");
    if (c.split.valid_len >= c.split.train_len) throw ConfigError("split.valid must be shorter than split.train");

    c.window.lookup = r.number<std::size_t>("window.lookup", 1);
    c.window.horizon = r.number<std::size_t>("window.horizon", 1);
    c.window.mode = parse_enum(r, "window.mode", CovariateMode::last_instance, parse_covariate_mode);
    c.window.stride = r.number<std::size_t>("window.stride", 1);
    c.window.include_series_id = r.boolean("window.include_series_id", false);
    try {
        c.window.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("[window]: {}", e.what()));
    }

    c.covariates = parse_enum(r, "covariates.plan", CovariatePlan::none, parse_covariate_plan);
    for (const auto& f : r.list("covariates.time_features")) {
        const auto tf = parse_time_feature(f);
        if (!tf) throw ConfigError(fmt::format("covariates.time_features: unknown feature '{}'", f));
        c.time_features.push_back(*tf);
    }
    const bool wants_time = c.covariates == CovariatePlan::time || c.covariates == CovariatePlan::native_time;
    if (wants_time && c.time_features.empty()) {
        throw ConfigError(fmt::format("covariates.plan = {} needs covariates.time_features", to_string(c.covariates)));
    }

    for (const auto& m : r.list("models.run")) {
        const auto kind = parse_model_kind(m);
        if (!kind) throw ConfigError(fmt::format("models.run: unknown model '{}'", m));
        if (std::find(c.models.begin(), c.models.end(), *kind) != c.models.end()) {
            throw ConfigError(fmt::format("models.run: '{}' listed twice", m));
        }
        c.models.push_back(*kind);
    }
    if (c.models.empty()) throw ConfigError("models.run lists no models");
    c.naive_fallback = parse_enum(r, "models.naive_fallback", NaiveFallback::time_index, parse_naive_fallback);

    c.seed = r.number<std::uint64_t>("run.seed", 0);
    c.workers = r.number<int>("run.workers", 1);
    if (c.workers < 1) throw ConfigError("run.workers must be at least 1");
    c.grid = parse_grid(r, c.seed);

    for (const auto& m : r.list("eval.metrics")) {
        const auto metric = metrics::parse_metric(m);
        if (!metric) throw ConfigError(fmt::format("eval.metrics: unknown metric '{}'", m));
        c.metrics.push_back(*metric);
    }
    if (c.metrics.empty()) c.metrics = {metrics::Metric::rmse, metrics::Metric::wape, metrics::Metric::mae};
    c.standardize = r.boolean("eval.standardize", false);
    c.retain_predictions = r.boolean("eval.retain_predictions", false);
    c.output_dir = r.str("output.dir", "results/" + c.dataset.name);

    const bool tuning = c.grid.size() > 1 ||
                        std::any_of(c.grid.begin(), c.grid.end(), [](const auto& p) { return p.early_stopping_rounds > 0; });
    if (tuning && c.split.valid_len == 0) {
        throw ConfigError("a grid with several points or early stopping needs split.valid > 0");
    }

    // Where results go and how many threads compute them do not change them.
    for (const auto& [key, value] : kv) {
        if (key == "output.dir" || key == "run.workers") continue;
        c.canonical_text += key + "=" + value + "\n";
    }
    c.digest = sha256_hex(c.canonical_text);
    return c;
}

std::string sha256_hex(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

}  // namespace tsboost::bench
