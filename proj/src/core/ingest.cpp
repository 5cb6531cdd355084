#include "tsboost/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string_view>
#include <unordered_map>

#include "tsboost/calendar.hpp"
#include "tsboost/errors.hpp"

namespace tsboost {

namespace {

enum class Role { timestamp, cal_year, cal_month, cal_day, cal_hour, target, covariate, onehot, series_id, ignore };

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

void split_line(std::string_view line, char delim, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

struct CellParser {
    const Schema& schema;
    std::string_view column;
    std::size_t line_no;

    bool is_missing(std::string_view cell) const {
        return std::find(schema.missing_tokens.begin(), schema.missing_tokens.end(), cell) !=
               schema.missing_tokens.end();
    }

    double number(std::string_view cell) const {
        if (is_missing(cell)) return kMissing;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
            throw DataError(fmt::format("row {}, column '{}': cannot parse '{}' as a number", line_no, column, cell));
        }
        return v;
    }

    unsigned calendar_part(std::string_view cell) const {
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
            throw DataError(fmt::format("row {}, column '{}': cannot parse '{}' as a calendar field", line_no,
                                        column, cell));
        }
        return v;
    }

    std::int64_t timestamp(std::string_view cell) const {
        if (schema.timestamp_format == TimestampFormat::epoch_seconds) {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec == std::errc{} && ptr == cell.data() + cell.size()) return v;
        } else if (auto ts = calendar::parse_iso8601(cell)) {
            return *ts;
        }
        throw DataError(fmt::format("row {}, column '{}': cannot parse timestamp '{}'", line_no, column, cell));
    }
};

struct RowRecord {
    std::size_t line_no = 0;
    std::optional<std::int64_t> timestamp;
    std::string series_id;
    std::vector<double> targets;
    std::vector<double> covariates;
    std::vector<std::string> categories;  // one per onehot column; empty = missing
};

bool is_calendar_column(const Schema& schema, const std::string& name) {
    const auto& cal = schema.calendar_columns;
    return !name.empty() && (name == cal.year || name == cal.month || name == cal.day || name == cal.hour);
}

std::map<std::string, Role> assign_roles(const std::vector<std::string>& header, const Schema& schema) {
    std::map<std::string, Role> roles;
    const std::set<std::string> present(header.begin(), header.end());
    auto claim = [&](const std::string& name, Role role) {
        if (name.empty()) return;
        if (!present.count(name)) throw DataError(fmt::format("schema column '{}' not found in header", name));
        if (roles.count(name)) throw DataError(fmt::format("column '{}' assigned more than one role", name));
        roles[name] = role;
    };
    claim(schema.timestamp_column, Role::timestamp);
    claim(schema.calendar_columns.year, Role::cal_year);
    claim(schema.calendar_columns.month, Role::cal_month);
    claim(schema.calendar_columns.day, Role::cal_day);
    claim(schema.calendar_columns.hour, Role::cal_hour);
    claim(schema.series_id_column, Role::series_id);
    for (const auto& c : schema.target_columns) claim(c, Role::target);
    for (const auto& c : schema.covariate_columns) {
        // A calendar field may also be a predictor; load_delimited reads it twice.
        if (is_calendar_column(schema, c)) continue;
        claim(c, Role::covariate);
    }
    for (const auto& c : schema.onehot_columns) claim(c, Role::onehot);
    for (const auto& c : schema.ignore_columns) claim(c, Role::ignore);
    for (const auto& c : header) {
        if (roles.count(c)) continue;
        switch (schema.unlisted) {
            case UnlistedRole::reject:
                throw DataError(fmt::format("column '{}' has no role in the schema", c));
            case UnlistedRole::ignore: roles[c] = Role::ignore; break;
            case UnlistedRole::target: roles[c] = Role::target; break;
            case UnlistedRole::covariate: roles[c] = Role::covariate; break;
        }
    }
    return roles;
}

void check_timeline(const std::vector<std::int64_t>& ts, const std::vector<std::size_t>& lines, std::int64_t& rate,
                    const std::string& series) {
    if (ts.size() > 1 && rate <= 0) rate = ts[1] - ts[0];
    for (std::size_t t = 1; t < ts.size(); ++t) {
        if (ts[t] <= ts[t - 1]) {
            throw DataError(fmt::format("row {}: timestamp {} not after previous {}{}", lines[t],
                                        calendar::format_iso8601(ts[t]), calendar::format_iso8601(ts[t - 1]),
                                        series.empty() ? "" : " in series '" + series + "'"));
        }
        if (ts[t] - ts[t - 1] != rate) {
            throw DataError(fmt::format("row {}: timestamp gap of {}s where the sample rate is {}s{}", lines[t],
                                        ts[t] - ts[t - 1], rate,
                                        series.empty() ? "" : " in series '" + series + "'"));
        }
    }
}

}  // namespace

SeriesFrame load_delimited(const std::filesystem::path& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open data file '{}'", path.string()));

    std::string line;
    if (!std::getline(in, line)) throw DataError(fmt::format("data file '{}' is empty", path.string()));
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    std::vector<std::string_view> cells;
    split_line(line, schema.delimiter, cells);
    std::vector<std::string> header(cells.begin(), cells.end());
    {
        std::set<std::string> seen;
        for (const auto& h : header)
            if (!seen.insert(h).second) throw DataError(fmt::format("duplicate header column '{}'", h));
    }
    const auto roles = assign_roles(header, schema);

    std::vector<Role> col_role;
    std::vector<bool> calendar_covariate;
    std::vector<std::string> target_names, covariate_names, onehot_names;
    for (const auto& h : header) {
        const Role r = roles.at(h);
        col_role.push_back(r);
        const bool both = is_calendar_column(schema, h) &&
                          std::find(schema.covariate_columns.begin(), schema.covariate_columns.end(), h) !=
                              schema.covariate_columns.end();
        calendar_covariate.push_back(both);
        if (r == Role::target) target_names.push_back(h);
        if (r == Role::covariate || both) covariate_names.push_back(h);
        if (r == Role::onehot) onehot_names.push_back(h);
    }
    if (target_names.empty()) throw DataError("schema assigns no target column");
    if (schema.layout == Layout::long_) {
        if (schema.series_id_column.empty()) throw DataError("long layout requires a series-id column");
        if (target_names.size() != 1) throw DataError("long layout requires exactly one target column");
    } else if (!schema.series_id_column.empty()) {
        throw DataError("wide layout does not take a series-id column");
    }
    const bool has_ts_column = !schema.timestamp_column.empty() || schema.calendar_columns.any();

    std::vector<RowRecord> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        split_line(line, schema.delimiter, cells);
        if (cells.size() != header.size()) {
            throw DataError(fmt::format("row {}: {} fields, header has {}", line_no, cells.size(), header.size()));
        }
        RowRecord rec;
        rec.line_no = line_no;
        int year = -1;
        unsigned month = 1, day = 1, hour = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const CellParser p{schema, header[c], line_no};
            switch (col_role[c]) {
                case Role::timestamp: rec.timestamp = p.timestamp(cells[c]); break;
                case Role::cal_year: year = static_cast<int>(p.calendar_part(cells[c])); break;
                case Role::cal_month: month = p.calendar_part(cells[c]); break;
                case Role::cal_day: day = p.calendar_part(cells[c]); break;
                case Role::cal_hour: hour = p.calendar_part(cells[c]); break;
                case Role::target: rec.targets.push_back(p.number(cells[c])); break;
                case Role::covariate: rec.covariates.push_back(p.number(cells[c])); break;
                case Role::onehot:
                    rec.categories.emplace_back(p.is_missing(cells[c]) ? std::string_view{} : cells[c]);
                    break;
                case Role::series_id: rec.series_id = std::string(cells[c]); break;
                case Role::ignore: break;
            }
            if (calendar_covariate[c]) rec.covariates.push_back(p.number(cells[c]));
        }
        if (schema.calendar_columns.any()) {
            if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23) {
                throw DataError(fmt::format("row {}: invalid calendar fields {}-{}-{} {}h", line_no, year, month,
                                            day, hour));
            }
            rec.timestamp = calendar::from_civil(year, month, day, hour);
        }
        rows.push_back(std::move(rec));
    }
    if (rows.empty()) throw DataError(fmt::format("data file '{}' has no data rows", path.string()));

    // One-hot vocabularies: sorted distinct categories per column.
    std::vector<std::vector<std::string>> vocab(onehot_names.size());
    for (std::size_t k = 0; k < onehot_names.size(); ++k) {
        std::set<std::string> cats;
        for (const auto& r : rows)
            if (!r.categories[k].empty()) cats.insert(r.categories[k]);
        vocab[k].assign(cats.begin(), cats.end());
    }
    std::vector<std::string> all_cov_names = covariate_names;
    for (std::size_t k = 0; k < onehot_names.size(); ++k)
        for (const auto& cat : vocab[k]) all_cov_names.push_back(onehot_names[k] + "=" + cat);
    const std::size_t M = all_cov_names.size();

    auto append_covariates = [&](const RowRecord& r, std::vector<double>& out) {
        out.insert(out.end(), r.covariates.begin(), r.covariates.end());
        for (std::size_t k = 0; k < vocab.size(); ++k) {
            for (const auto& cat : vocab[k]) {
                if (r.categories[k].empty()) {
                    out.push_back(kMissing);
                } else {
                    out.push_back(r.categories[k] == cat ? 1.0 : 0.0);
                }
            }
        }
    };

    FrameParts parts;
    parts.n_covariates = M;
    parts.covariate_names = all_cov_names;
    std::int64_t rate = schema.sample_rate;

    if (schema.layout == Layout::wide) {
        const std::size_t n = target_names.size();
        const std::size_t T = rows.size();
        parts.n_series = n;
        parts.length = T;
        parts.series_names = target_names;
        parts.targets.resize(n * T);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t i = 0; i < n; ++i) parts.targets[i * T + t] = rows[t].targets[i];
        std::vector<double> shared;
        shared.reserve(T * M);
        for (const auto& r : rows) append_covariates(r, shared);
        for (std::size_t i = 0; i < n; ++i) parts.covariates.insert(parts.covariates.end(), shared.begin(), shared.end());
        if (has_ts_column) {
            std::vector<std::int64_t> ts;
            std::vector<std::size_t> lines;
            for (const auto& r : rows) {
                ts.push_back(*r.timestamp);
                lines.push_back(r.line_no);
            }
            check_timeline(ts, lines, rate, "");
            parts.timestamps = std::move(ts);
        }
    } else {
        std::vector<std::string> ids;
        std::unordered_map<std::string, std::vector<const RowRecord*>> groups;
        for (const auto& r : rows) {
            auto [it, inserted] = groups.try_emplace(r.series_id);
            if (inserted) ids.push_back(r.series_id);
            it->second.push_back(&r);
        }
        const std::size_t T = groups.at(ids.front()).size();
        parts.n_series = ids.size();
        parts.length = T;
        parts.series_names = ids;
        for (const auto& id : ids) {
            const auto& g = groups.at(id);
            if (g.size() != T) {
                throw DataError(fmt::format("series '{}' has {} rows, series '{}' has {}; all series need equal length",
                                            id, g.size(), ids.front(), T));
            }
            std::vector<std::int64_t> ts;
            std::vector<std::size_t> lines;
            for (const auto* r : g) {
                parts.targets.push_back(r->targets[0]);
                append_covariates(*r, parts.covariates);
                if (has_ts_column) {
                    ts.push_back(*r->timestamp);
                    lines.push_back(r->line_no);
                }
            }
            if (has_ts_column) {
                check_timeline(ts, lines, rate, id);
                if (!parts.timestamps) {
                    parts.timestamps = std::move(ts);
                } else if (*parts.timestamps != ts) {
                    throw DataError(fmt::format("series '{}' does not share the timestamp axis of series '{}'", id,
                                                ids.front()));
                }
            }
        }
    }

    if (!has_ts_column && schema.start) {
        if (schema.sample_rate <= 0) throw DataError("a synthesized timeline needs an explicit sample rate");
        std::vector<std::int64_t> ts(parts.length);
        for (std::size_t t = 0; t < parts.length; ++t)
            ts[t] = *schema.start + static_cast<std::int64_t>(t) * schema.sample_rate;
        parts.timestamps = std::move(ts);
    }
    parts.sample_rate = rate;
    return SeriesFrame(std::move(parts));
}

void write_delimited(const SeriesFrame& frame, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
    auto num = [](double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string("NA"); };

    std::string header = "series";
    if (frame.has_timestamps()) header += ",timestamp";
    header += ",target";
    for (const auto& c : frame.covariate_names()) header += "," + c;
    out << header << '\n';
    for (std::size_t i = 0; i < frame.n_series(); ++i) {
        for (std::size_t t = 0; t < frame.length(); ++t) {
            std::string row = frame.series_names()[i];
            if (frame.has_timestamps()) row += fmt::format(",{}", frame.timestamps()[t]);
            row += "," + num(frame.target(i, t));
            for (double v : frame.covariate_row(i, t)) row += "," + num(v);
            out << row << '\n';
        }
    }
    if (!out) throw DataError(fmt::format("write to '{}' failed", path.string()));
}

Schema canonical_schema(const SeriesFrame& frame) {
    Schema s;
    s.layout = Layout::long_;
    s.series_id_column = "series";
    s.target_columns = {"target"};
    if (frame.has_timestamps()) {
        s.timestamp_column = "timestamp";
        s.timestamp_format = TimestampFormat::epoch_seconds;
    }
    s.sample_rate = frame.sample_rate();
    s.unlisted = UnlistedRole::covariate;
    s.missing_tokens = {"NA"};
    return s;
}

}  // namespace tsboost
