#include "tsboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "tsboost/errors.hpp"

namespace tsboost::metrics {

namespace {

void check_lengths(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) {
        throw DataError(fmt::format("metric inputs differ in length: {} actual vs {} predicted", y.size(), yhat.size()));
    }
    if (y.empty()) throw DataError("metric inputs are empty");
}

double sum_sq_error(std::span<const double> y, std::span<const double> yhat) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return s;
}

double sum_abs_error(std::span<const double> y, std::span<const double> yhat) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
    return s;
}

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Shortest representation that round-trips; NaN spelled out.
std::string format_value(double v) { return std::isnan(v) ? std::string("nan") : fmt::format("{}", v); }

}  // namespace

double rmse(std::span<const double> y, std::span<const double> yhat) {
    check_lengths(y, yhat);
    return std::sqrt(sum_sq_error(y, yhat) / static_cast<double>(y.size()));
}

double mae(std::span<const double> y, std::span<const double> yhat) {
    check_lengths(y, yhat);
    return sum_abs_error(y, yhat) / static_cast<double>(y.size());
}

double wape(std::span<const double> y, std::span<const double> yhat) {
    check_lengths(y, yhat);
    double denom = 0.0;
    for (double v : y) denom += std::abs(v);
    if (!(denom > 0.0)) throw NumericalError("wape undefined: sum of |actual| is zero");
    return sum_abs_error(y, yhat) / denom;
}

MapeResult mape(std::span<const double> y, std::span<const double> yhat) {
    check_lengths(y, yhat);
    MapeResult out;
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) {
            ++out.skipped;
            continue;
        }
        s += std::abs(y[i] - yhat[i]) / std::abs(y[i]);
    }
    const auto used = y.size() - out.skipped;
    if (used == 0) throw NumericalError("mape undefined: every actual value is zero");
    out.value = s / static_cast<double>(used);
    return out;
}

double rse(std::span<const double> y, std::span<const double> yhat) {
    check_lengths(y, yhat);
    const double ybar = mean(y);
    double denom = 0.0;
    for (double v : y) denom += (v - ybar) * (v - ybar);
    if (!(denom > 0.0)) throw NumericalError("rse undefined: actual values are constant");
    return std::sqrt(sum_sq_error(y, yhat)) / std::sqrt(denom);
}

CorrResult corr(std::span<const double> y, std::span<const double> yhat, std::size_t n_series) {
    check_lengths(y, yhat);
    if (n_series == 0 || y.size() % n_series != 0) {
        throw DataError(fmt::format("{} points do not split into {} equal series", y.size(), n_series));
    }
    const auto len = y.size() / n_series;
    if (len < 2) throw DataError("corr needs at least 2 points per series");
    CorrResult out;
    double total = 0.0;
    for (std::size_t i = 0; i < n_series; ++i) {
        const auto a = y.subspan(i * len, len);
        const auto b = yhat.subspan(i * len, len);
        const double ma = mean(a);
        const double mb = mean(b);
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
            sab += (a[t] - ma) * (b[t] - mb);
            saa += (a[t] - ma) * (a[t] - ma);
            sbb += (b[t] - mb) * (b[t] - mb);
        }
        if (!(saa > 0.0) || !(sbb > 0.0)) {
            ++out.skipped;
            continue;
        }
        total += std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
    }
    if (out.skipped == n_series) throw NumericalError("corr undefined: every series has zero variance");
    out.value = total / static_cast<double>(n_series - out.skipped);
    return out;
}

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::rmse: return "rmse";
        case Metric::mae: return "mae";
        case Metric::wape: return "wape";
        case Metric::mape: return "mape";
        case Metric::rse: return "rse";
        case Metric::corr: return "corr";
    }
    return "?";
}

std::optional<Metric> parse_metric(std::string_view text) {
    for (auto m : {Metric::rmse, Metric::mae, Metric::wape, Metric::mape, Metric::rse, Metric::corr})
        if (to_string(m) == text) return m;
    return std::nullopt;
}

std::string_view formula(Metric m) {
    switch (m) {
        case Metric::rmse: return "sqrt(mean((y - yhat)^2)), pooled over all series and time points";
        case Metric::mae: return "mean(|y - yhat|), pooled";
        case Metric::wape: return "sum|y - yhat| / sum|y|, pooled";
        case Metric::mape: return "mean(|y - yhat| / |y|) over points with y != 0, pooled";
        case Metric::rse: return "sqrt(sum (y - yhat)^2) / sqrt(sum (y - mean(y))^2), pooled";
        case Metric::corr: return "mean over series of pearson(y_i, yhat_i), zero-variance series skipped";
    }
    return "?";
}

std::optional<double> EvalReport::value(std::string_view metric) const {
    for (const auto& [name, v] : values)
        if (name == metric) return v;
    return std::nullopt;
}

EvalReport evaluate(std::string dataset, std::string model, std::string config_digest, std::span<const double> y,
                    std::span<const double> yhat, std::size_t n_series, std::span<const Metric> metrics) {
    check_lengths(y, yhat);
    EvalReport r;
    r.dataset = std::move(dataset);
    r.model = std::move(model);
    r.config_digest = std::move(config_digest);
    for (auto m : metrics) {
        double v = std::nan("");
        try {
            switch (m) {
                case Metric::rmse: v = rmse(y, yhat); break;
                case Metric::mae: v = mae(y, yhat); break;
                case Metric::wape: v = wape(y, yhat); break;
                case Metric::rse: v = rse(y, yhat); break;
                case Metric::mape: {
                    const auto res = mape(y, yhat);
                    v = res.value;
                    if (res.skipped > 0) r.notes.push_back(fmt::format("mape skipped {} zero actuals", res.skipped));
                    break;
                }
                case Metric::corr: {
                    const auto res = corr(y, yhat, n_series);
                    v = res.value;
                    if (res.skipped > 0) {
                        r.notes.push_back(fmt::format("corr skipped {} zero-variance series", res.skipped));
                    }
                    break;
                }
            }
        } catch (const NumericalError& e) {
            r.notes.push_back(e.what());
        }
        r.values.emplace_back(std::string(to_string(m)), v);
    }
    return r;
}

std::string render_table(std::span<const EvalReport> reports, std::span<const Metric> metrics) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"dataset", "model"};
    for (auto m : metrics) header.emplace_back(to_string(m));
    rows.push_back(header);
    for (const auto& r : reports) {
        std::vector<std::string> row{r.dataset, r.model};
        for (auto m : metrics) {
            const auto v = r.value(to_string(m));
            row.push_back(v ? (std::isnan(*v) ? "nan" : fmt::format("{:.6g}", *v)) : "-");
        }
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

    std::string out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            // Text columns left-aligned, numbers right-aligned.
            line += c < 2 ? fmt::format("{:<{}}", row[c], width[c]) : fmt::format("{:>{}}", row[c], width[c]);
            if (c + 1 < row.size()) line += "  ";
        }
        out += line + '\n';
    }
    for (const auto& r : reports)
        for (const auto& note : r.notes) out += fmt::format("note [{} / {}]: {}\n", r.dataset, r.model, note);
    out += '\n';
    for (auto m : metrics) out += fmt::format("{:<5} = {}\n", to_string(m), formula(m));
    return out;
}

std::string render_csv(std::span<const EvalReport> reports) {
    std::string out = "dataset,model,metric,value,config_digest\n";
    for (const auto& r : reports)
        for (const auto& [name, v] : r.values)
            out += fmt::format("{},{},{},{},{}\n", r.dataset, r.model, name, format_value(v), r.config_digest);
    return out;
}

}  // namespace tsboost::metrics
