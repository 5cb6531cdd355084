#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "tsboost/series_frame.hpp"

namespace tsboost::testing {

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("tsboost_test_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path write(const std::string& name, const std::string& contents) const {
        auto p = path_ / name;
        std::ofstream(p) << contents;
        return p;
    }

private:
    std::filesystem::path path_;
};

/// n series of length T, M covariates, values from a seeded uniform.
inline SeriesFrame random_frame(std::size_t n, std::size_t T, std::size_t M, std::uint64_t seed,
                                bool timestamps = true) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    FrameParts p;
    p.n_series = n;
    p.length = T;
    p.n_covariates = M;
    p.targets.resize(n * T);
    p.covariates.resize(n * T * M);
    for (auto& v : p.targets) v = dist(rng);
    for (auto& v : p.covariates) v = dist(rng);
    if (timestamps) {
        p.timestamps.emplace(T);
        for (std::size_t t = 0; t < T; ++t) (*p.timestamps)[t] = 1262304000 + static_cast<std::int64_t>(t) * 3600;
        p.sample_rate = 3600;
    }
    return SeriesFrame(std::move(p));
}

/// Single-series frame whose target at time t is `t` and whose covariate m at
/// time t is 1000·(m+1) + t, so every value encodes its own time index.
inline SeriesFrame indexed_frame(std::size_t n, std::size_t T, std::size_t M) {
    FrameParts p;
    p.n_series = n;
    p.length = T;
    p.n_covariates = M;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < T; ++t) p.targets.push_back(static_cast<double>(t) + 100000.0 * static_cast<double>(i));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t m = 0; m < M; ++m)
                p.covariates.push_back(1000.0 * static_cast<double>(m + 1) + static_cast<double>(t) +
                                       100000.0 * static_cast<double>(i));
    return SeriesFrame(std::move(p));
}

}  // namespace tsboost::testing
