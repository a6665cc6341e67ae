#pragma once

// Independent check tooling for the fitting code: a brute-force grid
// minimizer that never touches the closed-form estimator, and a Spearman
// rank correlation with average ranks for ties.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace support {

struct GridFit {
    double b = 0;
    double c = 0;
    double sse = std::numeric_limits<double>::infinity();
};

/// Minimize sum (Y_i - (c - b*X_i))^2 by dense grid search over (b, c),
/// zooming the box around the best cell until the step is far below the
/// comparison tolerance. Deliberately knows nothing about normal equations.
inline GridFit grid_least_squares(const std::vector<std::pair<double, double>>& points,
                                  double b_lo = -8, double b_hi = 8,
                                  double c_lo = -15, double c_hi = 15) {
    std::vector<std::pair<double, double>> logs;
    logs.reserve(points.size());
    for (const auto& [x, y] : points) {
        logs.emplace_back(std::log10(x), std::log10(y));
    }
    auto sse = [&](double b, double c) {
        double s = 0;
        for (const auto& [X, Y] : logs) {
            double d = Y - (c - b * X);
            s += d * d;
        }
        return s;
    };

    constexpr int kCells = 60;
    constexpr int kZooms = 16;
    GridFit best;
    for (int pass = 0; pass < kZooms; ++pass) {
        double db = (b_hi - b_lo) / kCells;
        double dc = (c_hi - c_lo) / kCells;
        for (int i = 0; i <= kCells; ++i) {
            double b = b_lo + db * i;
            for (int j = 0; j <= kCells; ++j) {
                double c = c_lo + dc * j;
                double s = sse(b, c);
                if (s < best.sse) {
                    best = {b, c, s};
                }
            }
        }
        double span_b = (b_hi - b_lo) * 0.25;
        double span_c = (c_hi - c_lo) * 0.25;
        b_lo = best.b - span_b / 2;
        b_hi = best.b + span_b / 2;
        c_lo = best.c - span_c / 2;
        c_hi = best.c + span_c / 2;
    }
    return best;
}

inline std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    return pearson(average_ranks(a), average_ranks(b));
}

} // namespace support
