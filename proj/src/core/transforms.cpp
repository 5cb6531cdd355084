#include "tsboost/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "tsboost/calendar.hpp"
#include "tsboost/errors.hpp"

namespace tsboost {

namespace {

// Visits every (series, channel) column of a frame as a strided view over
// `values`: channel 0 is the target, channels 1..M the covariates.
template <typename Fn>
void for_each_channel(FrameParts& parts, Fn&& fn) {
    const auto T = parts.length;
    const auto M = parts.n_covariates;
    for (std::size_t i = 0; i < parts.n_series; ++i) {
        fn(i, std::string("target"), parts.targets.data() + i * T, std::size_t{1});
        for (std::size_t m = 0; m < M; ++m) {
            fn(i, parts.covariate_names[m], parts.covariates.data() + i * T * M + m, M);
        }
    }
}

std::optional<std::size_t> first_observed(const double* v, std::size_t T, std::size_t stride) {
    for (std::size_t t = 0; t < T; ++t)
        if (std::isfinite(v[t * stride])) return t;
    return std::nullopt;
}

}  // namespace

std::string_view to_string(ImputePolicy policy) {
    switch (policy) {
        case ImputePolicy::forward_fill: return "forward_fill";
        case ImputePolicy::zero: return "zero";
        case ImputePolicy::drop_leading: return "drop_leading";
    }
    return "?";
}

std::optional<ImputePolicy> parse_impute_policy(std::string_view text) {
    for (auto p : {ImputePolicy::forward_fill, ImputePolicy::zero, ImputePolicy::drop_leading})
        if (to_string(p) == text) return p;
    return std::nullopt;
}

SeriesFrame impute_missing(const SeriesFrame& frame, ImputePolicy policy) {
    FrameParts parts = frame.parts();

    std::size_t drop = 0;
    for_each_channel(parts, [&](std::size_t i, const std::string& name, double* v, std::size_t stride) {
        const auto first = first_observed(v, parts.length, stride);
        if (!first) {
            throw DataError(fmt::format("channel entirely missing: '{}' in series '{}'", name, parts.series_names[i]));
        }
        drop = std::max(drop, *first);
    });

    for_each_channel(parts, [&](std::size_t, const std::string&, double* v, std::size_t stride) {
        const auto T = parts.length;
        if (policy == ImputePolicy::zero) {
            for (std::size_t t = 0; t < T; ++t)
                if (!std::isfinite(v[t * stride])) v[t * stride] = 0.0;
            return;
        }
        double last = v[*first_observed(v, T, stride) * stride];
        for (std::size_t t = 0; t < T; ++t) {
            double& cell = v[t * stride];
            if (std::isfinite(cell)) {
                last = cell;
            } else {
                cell = last;
            }
        }
    });

    // Fill before trimming so a gap right after the cut takes the value seen
    // in the dropped prefix.
    if (policy == ImputePolicy::drop_leading && drop > 0) {
        if (drop >= parts.length) throw DataError("drop_leading would remove every time step");
        auto trimmed = SeriesFrame(std::move(parts)).slice(drop, frame.length()).parts();
        trimmed.time_offset = frame.time_offset();
        parts = std::move(trimmed);
    }
    return SeriesFrame(std::move(parts));
}

std::string_view to_string(TimeFeature feature) {
    switch (feature) {
        case TimeFeature::hour_of_day: return "hour_of_day";
        case TimeFeature::day_of_week: return "day_of_week";
        case TimeFeature::day_of_month: return "day_of_month";
        case TimeFeature::month: return "month";
        case TimeFeature::is_weekend: return "is_weekend";
    }
    return "?";
}

std::optional<TimeFeature> parse_time_feature(std::string_view text) {
    for (auto f : {TimeFeature::hour_of_day, TimeFeature::day_of_week, TimeFeature::day_of_month, TimeFeature::month,
                   TimeFeature::is_weekend})
        if (to_string(f) == text) return f;
    return std::nullopt;
}

SeriesFrame derive_time_covariates(const SeriesFrame& frame, std::span<const TimeFeature> features) {
    if (features.empty()) return frame;
    if (!frame.has_timestamps()) throw DataError("time covariates require a frame with timestamps");

    std::vector<TimeFeature> todo;
    for (auto f : features) {
        const std::string name(to_string(f));
        if (frame.covariate_index(name)) continue;
        if (std::find(todo.begin(), todo.end(), f) == todo.end()) todo.push_back(f);
    }
    if (todo.empty()) return frame;

    const auto& ts = frame.timestamps();
    const auto T = frame.length();
    const auto M_old = frame.n_covariates();
    const auto M_new = M_old + todo.size();

    std::vector<double> derived(T * todo.size());
    for (std::size_t t = 0; t < T; ++t) {
        const auto c = calendar::to_civil(ts[t]);
        for (std::size_t k = 0; k < todo.size(); ++k) {
            double v = 0.0;
            switch (todo[k]) {
                case TimeFeature::hour_of_day: v = c.hour; break;
                case TimeFeature::day_of_week: v = c.weekday; break;
                case TimeFeature::day_of_month: v = c.day; break;
                case TimeFeature::month: v = c.month; break;
                case TimeFeature::is_weekend: v = c.weekday >= 5 ? 1.0 : 0.0; break;
            }
            derived[t * todo.size() + k] = v;
        }
    }

    FrameParts parts = frame.parts();
    std::vector<double> covs;
    covs.reserve(frame.n_series() * T * M_new);
    for (std::size_t i = 0; i < frame.n_series(); ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            auto row = frame.covariate_row(i, t);
            covs.insert(covs.end(), row.begin(), row.end());
            covs.insert(covs.end(), derived.begin() + static_cast<std::ptrdiff_t>(t * todo.size()),
                        derived.begin() + static_cast<std::ptrdiff_t>((t + 1) * todo.size()));
        }
    }
    parts.covariates = std::move(covs);
    parts.n_covariates = M_new;
    for (auto f : todo) parts.covariate_names.emplace_back(to_string(f));
    return SeriesFrame(std::move(parts));
}

Standardizer Standardizer::fit(const SeriesFrame& reference) {
    Standardizer s;
    for (std::size_t i = 0; i < reference.n_series(); ++i) {
        auto y = reference.target_series(i);
        double mean = 0.0;
        for (double v : y) mean += v;
        mean /= static_cast<double>(y.size());
        double var = 0.0;
        for (double v : y) var += (v - mean) * (v - mean);
        var /= static_cast<double>(y.size());
        const double sd = std::sqrt(var);
        s.mean_.push_back(mean);
        s.scale_.push_back(sd > 0.0 ? sd : 1.0);
    }
    return s;
}

SeriesFrame Standardizer::transform(const SeriesFrame& frame) const {
    if (frame.n_series() != mean_.size()) throw DataError("standardizer fitted on a different series count");
    std::vector<double> y = frame.parts().targets;
    const auto T = frame.length();
    for (std::size_t i = 0; i < mean_.size(); ++i)
        for (std::size_t t = 0; t < T; ++t) y[i * T + t] = (y[i * T + t] - mean_[i]) / scale_[i];
    return frame.with_targets(std::move(y));
}

}  // namespace tsboost
