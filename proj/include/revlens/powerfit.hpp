#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "revlens/csv.hpp"
#include "revlens/temporal.hpp"

namespace revlens {

constexpr int kDefaultXOffset = 1;
constexpr int kMinFitPoints = 3;

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitInput {
    std::vector<std::pair<double, double>> points; // (x, y), both > 0
    int dropped = 0;                               // bins excluded for y = 0
};

/// Model y = a * x^(-b), fitted as Y = c - b*X on X = lg x, Y = lg y.
/// intercept is c = lg a.
struct PowerLawFit {
    double intercept = 0;
    double coefficient = 0;
    std::optional<double> r2_model_mean;
    std::optional<double> r2_standard;
    int n_points = 0;
    int dropped = 0;
};

/// Turn an attention series into fit points: x = ti + x_offset, y = mean
/// member count. Zero-count bins cannot enter the log transform; they are
/// dropped and counted.
inline FitInput prepare_fit_input(const IntervalSeries& series, int x_offset = kDefaultXOffset) {
    FitInput input;
    for (const auto& [ti, count] : series.counts) {
        double x = ti + x_offset;
        if (count <= 0) {
            ++input.dropped;
            continue;
        }
        if (x <= 0) {
            throw FitError("x must be positive (ti " + std::to_string(ti) + ", offset " +
                           std::to_string(x_offset) + ")");
        }
        input.points.emplace_back(x, count);
    }
    if (input.points.size() < kMinFitPoints) {
        throw FitError("insufficient data: " + std::to_string(input.points.size()) +
                       " usable points");
    }
    return input;
}

/// R² variant with spread measured around the mean MODEL value: deviation of
/// the fitted curve over deviation of the data, both about that same mean.
/// Coincides with the textbook score when (b, c) is the least-squares line.
inline std::optional<double> r_squared_model_mean(const FitInput& input, const PowerLawFit& fit) {
    double n = static_cast<double>(input.points.size());
    double mean_m = 0;
    std::vector<double> model(input.points.size());
    for (std::size_t i = 0; i < input.points.size(); ++i) {
        model[i] = fit.intercept - fit.coefficient * std::log10(input.points[i].first);
        mean_m += model[i];
    }
    mean_m /= n;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < input.points.size(); ++i) {
        double y = std::log10(input.points[i].second);
        num += (model[i] - mean_m) * (model[i] - mean_m);
        den += (y - mean_m) * (y - mean_m);
    }
    if (den == 0) return std::nullopt;
    return num / den;
}

/// Textbook R²: 1 - SSE / SST.
inline std::optional<double> r_squared_standard(const FitInput& input, const PowerLawFit& fit) {
    double n = static_cast<double>(input.points.size());
    double mean_y = 0;
    for (const auto& [x, y] : input.points) mean_y += std::log10(y);
    mean_y /= n;
    double sse = 0, sst = 0;
    for (const auto& [x, y] : input.points) {
        double yy = std::log10(y);
        double m = fit.intercept - fit.coefficient * std::log10(x);
        sse += (yy - m) * (yy - m);
        sst += (yy - mean_y) * (yy - mean_y);
    }
    if (sst == 0) return std::nullopt;
    return 1.0 - sse / sst;
}

/// Closed-form log-log least squares:
///   b = [ΣX·ΣY - n·ΣXY] / [n·ΣX² - (ΣX)²],  c = mean(Y) + b·mean(X).
inline PowerLawFit fit_power_law(const FitInput& input) {
    const double n = static_cast<double>(input.points.size());
    if (input.points.size() < kMinFitPoints) {
        throw FitError("insufficient data: " + std::to_string(input.points.size()) +
                       " usable points");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double min_x = input.points.front().first, max_x = min_x;
    for (const auto& [x, y] : input.points) {
        double X = std::log10(x);
        double Y = std::log10(y);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
    }
    if (min_x == max_x) {
        throw FitError("degenerate abscissa: all x identical");
    }
    PowerLawFit fit;
    fit.coefficient = (sx * sy - n * sxy) / (n * sxx - sx * sx);
    fit.intercept = sy / n + fit.coefficient * (sx / n);
    fit.n_points = static_cast<int>(input.points.size());
    fit.dropped = input.dropped;
    fit.r2_model_mean = r_squared_model_mean(input, fit);
    fit.r2_standard = r_squared_standard(input, fit);
    return fit;
}

/// Squared deviance of log10(y) around the line c - b*X, X = log10(x).
inline double fit_deviance(const FitInput& input, double b, double c) {
    double m = 0;
    for (const auto& [x, y] : input.points) {
        double d = std::log10(y) - (c - b * std::log10(x));
        m += d * d;
    }
    return m;
}

/// Report grouping at the 0.6 / 0.7 / 0.8 boundaries.
inline std::string r2_bucket(double r2) {
    if (r2 < 0.6) return "<0.6";
    if (r2 < 0.7) return "0.6\xE2\x80\x93" "0.7"; // en dash
    if (r2 < 0.8) return "0.7\xE2\x80\x93" "0.8";
    return "\xE2\x89\xA5" "0.8"; // >= sign
}

namespace detail {

inline std::string fmt_fixed2(double v) {
    std::string s = fmt_fixed(v, 2);
    return s == "-0.00" ? "0.00" : s;
}

} // namespace detail

struct FitRow {
    int aspect_id = 0;
    std::string label;
    PowerLawFit fit;
};

inline std::string fit_table_csv(const std::vector<FitRow>& rows) {
    std::string out = "aspect_id,label,intercept,coefficient,r2,bucket,n_points,dropped\n";
    for (const auto& row : rows) {
        out += std::to_string(row.aspect_id);
        out += ',';
        out += csv_escape(row.label);
        out += ',';
        out += detail::fmt_fixed2(row.fit.intercept);
        out += ',';
        out += detail::fmt_fixed2(row.fit.coefficient);
        out += ',';
        if (row.fit.r2_model_mean) {
            out += detail::fmt_fixed2(*row.fit.r2_model_mean);
            out += ',';
            out += r2_bucket(*row.fit.r2_model_mean);
        } else {
            out += ',';
        }
        out += ',';
        out += std::to_string(row.fit.n_points);
        out += ',';
        out += std::to_string(row.fit.dropped);
        out += '\n';
    }
    return out;
}

} // namespace revlens
