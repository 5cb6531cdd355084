#include "tsboost/series_frame.hpp"

#include <cmath>
#include <fmt/format.h>

#include "tsboost/errors.hpp"

namespace tsboost {

SeriesFrame::SeriesFrame(FrameParts parts) : parts_(std::move(parts)) {
    const auto n = parts_.n_series;
    const auto T = parts_.length;
    const auto M = parts_.n_covariates;
    if (n == 0 || T == 0) {
        throw DataError("series frame must hold at least one series and one time step");
    }
    if (parts_.targets.size() != n * T) {
        throw DataError(fmt::format("target storage has {} values, expected {}", parts_.targets.size(), n * T));
    }
    if (parts_.covariates.size() != n * T * M) {
        throw DataError(
            fmt::format("covariate storage has {} values, expected {}", parts_.covariates.size(), n * T * M));
    }
    if (parts_.covariate_names.empty() && M > 0) {
        for (std::size_t m = 0; m < M; ++m) parts_.covariate_names.push_back(fmt::format("cov{}", m));
    }
    if (parts_.covariate_names.size() != M) {
        throw DataError("covariate name count does not match covariate channel count");
    }
    if (parts_.series_names.empty()) {
        for (std::size_t i = 0; i < n; ++i) parts_.series_names.push_back(fmt::format("series{}", i));
    }
    if (parts_.series_names.size() != n) {
        throw DataError("series name count does not match series count");
    }
    if (parts_.timestamps) {
        const auto& ts = *parts_.timestamps;
        if (ts.size() != T) {
            throw DataError(fmt::format("timestamp axis has {} entries, expected {}", ts.size(), T));
        }
        if (T > 1 && parts_.sample_rate <= 0) {
            parts_.sample_rate = ts[1] - ts[0];
        }
        for (std::size_t t = 1; t < T; ++t) {
            if (ts[t] <= ts[t - 1]) {
                throw DataError(fmt::format("timestamps not strictly increasing at time index {}", t));
            }
            if (ts[t] - ts[t - 1] != parts_.sample_rate) {
                throw DataError(fmt::format("timestamp gap at time index {}: step {}s, sample rate {}s", t,
                                            ts[t] - ts[t - 1], parts_.sample_rate));
            }
        }
    }
}

const std::vector<std::int64_t>& SeriesFrame::timestamps() const {
    if (!parts_.timestamps) throw DataError("frame has no timestamps");
    return *parts_.timestamps;
}

std::optional<std::size_t> SeriesFrame::covariate_index(const std::string& name) const {
    for (std::size_t m = 0; m < parts_.covariate_names.size(); ++m) {
        if (parts_.covariate_names[m] == name) return m;
    }
    return std::nullopt;
}

std::span<const double> SeriesFrame::target_series(std::size_t series) const {
    return {parts_.targets.data() + series * parts_.length, parts_.length};
}

std::span<const double> SeriesFrame::covariate_row(std::size_t series, std::size_t t) const {
    const auto M = parts_.n_covariates;
    return {parts_.covariates.data() + (series * parts_.length + t) * M, M};
}

bool SeriesFrame::has_missing() const {
    for (double v : parts_.targets)
        if (!std::isfinite(v)) return true;
    for (double v : parts_.covariates)
        if (!std::isfinite(v)) return true;
    return false;
}

void SeriesFrame::require_finite() const {
    const auto T = parts_.length;
    const auto M = parts_.n_covariates;
    for (std::size_t k = 0; k < parts_.targets.size(); ++k) {
        if (!std::isfinite(parts_.targets[k])) {
            throw DataError(fmt::format("non-finite target in series '{}' at time index {}",
                                        parts_.series_names[k / T], parts_.time_offset + k % T));
        }
    }
    for (std::size_t k = 0; k < parts_.covariates.size(); ++k) {
        if (!std::isfinite(parts_.covariates[k])) {
            const auto cell = k / M;
            throw DataError(fmt::format("non-finite covariate '{}' in series '{}' at time index {}",
                                        parts_.covariate_names[k % M], parts_.series_names[cell / T],
                                        parts_.time_offset + cell % T));
        }
    }
}

SeriesFrame SeriesFrame::slice(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > parts_.length) {
        throw DataError(fmt::format("slice [{}, {}) outside frame of length {}", begin, end, parts_.length));
    }
    const auto n = parts_.n_series;
    const auto T = parts_.length;
    const auto M = parts_.n_covariates;
    const auto len = end - begin;

    FrameParts out;
    out.n_series = n;
    out.length = len;
    out.n_covariates = M;
    out.series_names = parts_.series_names;
    out.covariate_names = parts_.covariate_names;
    out.sample_rate = parts_.sample_rate;
    out.time_offset = parts_.time_offset + begin;
    out.targets.reserve(n * len);
    out.covariates.reserve(n * len * M);
    for (std::size_t i = 0; i < n; ++i) {
        auto tb = parts_.targets.begin() + static_cast<std::ptrdiff_t>(i * T);
        out.targets.insert(out.targets.end(), tb + static_cast<std::ptrdiff_t>(begin),
                           tb + static_cast<std::ptrdiff_t>(end));
        auto cb = parts_.covariates.begin() + static_cast<std::ptrdiff_t>(i * T * M);
        out.covariates.insert(out.covariates.end(), cb + static_cast<std::ptrdiff_t>(begin * M),
                              cb + static_cast<std::ptrdiff_t>(end * M));
    }
    if (parts_.timestamps) {
        out.timestamps.emplace(parts_.timestamps->begin() + static_cast<std::ptrdiff_t>(begin),
                               parts_.timestamps->begin() + static_cast<std::ptrdiff_t>(end));
    }
    return SeriesFrame(std::move(out));
}

SeriesFrame SeriesFrame::select_series(std::span<const std::size_t> indices) const {
    if (indices.empty()) throw DataError("series selection is empty");
    const auto T = parts_.length;
    const auto M = parts_.n_covariates;
    FrameParts out;
    out.n_series = indices.size();
    out.length = T;
    out.n_covariates = M;
    out.covariate_names = parts_.covariate_names;
    out.timestamps = parts_.timestamps;
    out.sample_rate = parts_.sample_rate;
    out.time_offset = parts_.time_offset;
    for (auto i : indices) {
        if (i >= parts_.n_series) {
            throw DataError(fmt::format("series index {} out of range (n = {})", i, parts_.n_series));
        }
        out.series_names.push_back(parts_.series_names[i]);
        auto ts = target_series(i);
        out.targets.insert(out.targets.end(), ts.begin(), ts.end());
        auto cb = parts_.covariates.begin() + static_cast<std::ptrdiff_t>(i * T * M);
        out.covariates.insert(out.covariates.end(), cb, cb + static_cast<std::ptrdiff_t>(T * M));
    }
    return SeriesFrame(std::move(out));
}

SeriesFrame SeriesFrame::concat_time(const SeriesFrame& other) const {
    if (other.n_series() != n_series() || other.n_covariates() != n_covariates() ||
        other.covariate_names() != covariate_names()) {
        throw DataError("cannot concatenate frames with different series or covariate layout");
    }
    if (other.time_offset() != time_offset() + length()) {
        throw DataError(fmt::format("cannot concatenate: second frame starts at {}, first ends at {}",
                                    other.time_offset(), time_offset() + length()));
    }
    if (has_timestamps() != other.has_timestamps()) {
        throw DataError("cannot concatenate frames with and without timestamps");
    }
    const auto n = n_series();
    const auto M = n_covariates();
    const auto T1 = length();
    const auto T2 = other.length();
    FrameParts out;
    out.n_series = n;
    out.length = T1 + T2;
    out.n_covariates = M;
    out.series_names = parts_.series_names;
    out.covariate_names = parts_.covariate_names;
    out.sample_rate = parts_.sample_rate;
    out.time_offset = parts_.time_offset;
    for (std::size_t i = 0; i < n; ++i) {
        auto a = target_series(i);
        auto b = other.target_series(i);
        out.targets.insert(out.targets.end(), a.begin(), a.end());
        out.targets.insert(out.targets.end(), b.begin(), b.end());
        auto ca = parts_.covariates.begin() + static_cast<std::ptrdiff_t>(i * T1 * M);
        out.covariates.insert(out.covariates.end(), ca, ca + static_cast<std::ptrdiff_t>(T1 * M));
        auto cb = other.parts_.covariates.begin() + static_cast<std::ptrdiff_t>(i * T2 * M);
        out.covariates.insert(out.covariates.end(), cb, cb + static_cast<std::ptrdiff_t>(T2 * M));
    }
    if (parts_.timestamps) {
        std::vector<std::int64_t> ts = *parts_.timestamps;
        ts.insert(ts.end(), other.timestamps().begin(), other.timestamps().end());
        out.timestamps = std::move(ts);
    }
    return SeriesFrame(std::move(out));
}

SeriesFrame SeriesFrame::with_targets(std::vector<double> targets) const {
    FrameParts out = parts_;
    out.targets = std::move(targets);
    return SeriesFrame(std::move(out));
}

}  // namespace tsboost
