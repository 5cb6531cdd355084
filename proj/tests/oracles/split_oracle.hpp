#pragma once

// Test-only reference implementations. Nothing here calls into the engine:
// gains, sums and thresholds are recomputed directly from the rows.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

namespace tsboost::oracle {

struct RootSplit {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Exhaustive root split: every feature, every midpoint between consecutive
/// distinct values, sums recomputed from scratch for each candidate.
/// Ties keep the lowest feature, then the lowest threshold.
inline RootSplit best_root_split(const std::vector<std::vector<double>>& x, const std::vector<double>& g,
                                 const std::vector<double>& h, double lambda, double gamma, double min_child_weight) {
    RootSplit best;
    const std::size_t n = x.size();
    const std::size_t F = x.front().size();
    double G = 0.0, H = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        G += g[i];
        H += h[i];
    }
    for (std::size_t f = 0; f < F; ++f) {
        std::set<double> distinct;
        for (const auto& row : x) distinct.insert(row[f]);
        const std::vector<double> v(distinct.begin(), distinct.end());
        for (std::size_t k = 1; k < v.size(); ++k) {
            const double thr = 0.5 * (v[k - 1] + v[k]);
            double gl = 0.0, hl = 0.0, gr = 0.0, hr = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (x[i][f] <= v[k - 1]) {
                    gl += g[i];
                    hl += h[i];
                } else {
                    gr += g[i];
                    hr += h[i];
                }
            }
            if (hl < min_child_weight || hr < min_child_weight) continue;
            const double gain =
                0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - G * G / (H + lambda)) - gamma;
            if (gain > best.gain) best = RootSplit{static_cast<int>(f), thr, gain};
        }
    }
    return best;
}

/// Minimizes  G·w + ½·H·w² + ½·λ·w²  by bisection on the sign of its
/// derivative over [-1e6, 1e6]. A value grid cannot resolve the argmin below
/// sqrt(eps) because the objective is flat there; the slope can.
inline double minimize_leaf_objective(double G, double H, double lambda) {
    auto slope = [&](double w) { return G + H * w + lambda * w; };
    double lo = -1e6, hi = 1e6;
    for (int it = 0; it < 200 && lo < hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (slope(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Random regression instance: rows × features uniform values quantized to a
/// coarse grid (so ties occur), gradients standard normal, hessians 1.
struct Instance {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
};

inline Instance random_instance(std::size_t rows, std::size_t features, std::uint64_t seed, bool quantize = true) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    Instance out;
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> row(features);
        for (auto& v : row) v = quantize ? std::round(u(rng) * 4.0) / 4.0 : u(rng);
        out.x.push_back(row);
        out.y.push_back(std::sin(row[0]) * 3.0 + (features > 1 ? row[1] * row[1] * 0.1 : 0.0) + noise(rng));
    }
    return out;
}

}  // namespace tsboost::oracle
