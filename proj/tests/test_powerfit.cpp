#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "revlens/powerfit.hpp"
#include "revlens/simulate.hpp"
#include "support/oracle.hpp"

using namespace revlens;

namespace {

IntervalSeries series_of(std::map<int, double> counts) {
    IntervalSeries s;
    s.aspect_id = 1;
    s.k = 1;
    for (const auto& [ti, n] : counts) s.total += n;
    s.counts = std::move(counts);
    return s;
}

double gaussian(Rng& rng) {
    double u1 = rng.unit();
    double u2 = rng.unit();
    while (u1 <= 0) u1 = rng.unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

FitInput noisy_input(Rng& rng) {
    FitInput input;
    std::size_t n = 10 + rng.below(82);
    double b = rng.unit() * 5 - 2;
    double c = rng.unit() * 6 - 3;
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i + 1);
        double logy = c - b * std::log10(x) + 0.15 * gaussian(rng);
        input.points.emplace_back(x, std::pow(10.0, logy));
    }
    return input;
}

} // namespace

TEST_CASE("zero bins are dropped before the log transform") {
    auto input = prepare_fit_input(series_of({{0, 8}, {1, 4}, {2, 0}, {3, 1}}), 1);
    REQUIRE(input.points == std::vector<std::pair<double, double>>{{1, 8}, {2, 4}, {4, 1}});
    REQUIRE(input.dropped == 1);
}

TEST_CASE("too few usable points is an error") {
    REQUIRE_THROWS_WITH(prepare_fit_input(series_of({{0, 0}, {1, 0}, {2, 0}})),
                        Catch::Matchers::ContainsSubstring("insufficient data"));
    REQUIRE_THROWS_WITH(prepare_fit_input(series_of({{0, 5}, {1, 3}})),
                        Catch::Matchers::ContainsSubstring("insufficient data"));
}

TEST_CASE("a nonpositive x is out of the log domain") {
    REQUIRE_THROWS_WITH(prepare_fit_input(series_of({{0, 8}, {1, 4}, {2, 2}}), 0),
                        Catch::Matchers::ContainsSubstring("x must be positive"));
}

TEST_CASE("exact power-law points are recovered exactly") {
    std::map<int, double> counts;
    for (int ti = 0; ti < 20; ++ti) {
        double x = ti + 1;
        counts[ti] = 10.0 * std::pow(x, -1.5);
    }
    auto fit = fit_power_law(prepare_fit_input(series_of(std::move(counts))));
    REQUIRE(fit.intercept == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(fit.coefficient == Catch::Approx(1.5).margin(1e-9));
    REQUIRE(fit.r2_model_mean.value() == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(fit.r2_standard.value() == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(fit.n_points == 20);
    REQUIRE(fit.dropped == 0);
}

TEST_CASE("identical abscissae cannot be fitted") {
    FitInput input;
    input.points = {{2, 5}, {2, 7}, {2, 9}};
    REQUIRE_THROWS_WITH(fit_power_law(input),
                        Catch::Matchers::ContainsSubstring("degenerate abscissa"));
}

TEST_CASE("constant ordinates leave both scores undefined") {
    // y = 10 keeps every log exact, so the zero denominators are exact too
    FitInput input;
    input.points = {{1, 10}, {2, 10}, {4, 10}};
    auto fit = fit_power_law(input);
    REQUIRE(fit.coefficient == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(!fit.r2_standard.has_value());
    REQUIRE(!fit.r2_model_mean.has_value());
}

TEST_CASE("the closed form matches a brute-force minimizer") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        auto input = noisy_input(rng);
        auto fit = fit_power_law(input);
        auto oracle = support::grid_least_squares(input.points);
        REQUIRE(fit.coefficient == Catch::Approx(oracle.b).margin(1e-6));
        REQUIRE(fit.intercept == Catch::Approx(oracle.c).margin(1e-6));
    }
}

TEST_CASE("the fitted deviance is a local minimum") {
    Rng rng(7);
    auto input = noisy_input(rng);
    auto fit = fit_power_law(input);
    double base = fit_deviance(input, fit.coefficient, fit.intercept);
    for (double db : {-1e-3, 0.0, 1e-3}) {
        for (double dc : {-1e-3, 0.0, 1e-3}) {
            REQUIRE(fit_deviance(input, fit.coefficient + db, fit.intercept + dc) >=
                    base - 1e-12);
        }
    }
}

TEST_CASE("both r-squared variants coincide on a self-fitted line") {
    // the fitted line passes through the log centroid, so the model mean
    // equals the data mean and the two denominators agree
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        auto input = noisy_input(rng);
        auto fit = fit_power_law(input);
        if (!fit.r2_model_mean || !fit.r2_standard) continue;
        REQUIRE(*fit.r2_model_mean == Catch::Approx(*fit.r2_standard).margin(1e-9));
    }
}

TEST_CASE("the model-mean score differs from the textbook score off-centroid") {
    FitInput input;
    input.points = {{1, 100}, {10, 10}, {100, 2}};
    PowerLawFit off;
    off.coefficient = 0.5; // not the least-squares line for these points
    off.intercept = 1.5;
    auto model_mean = r_squared_model_mean(input, off);
    auto standard = r_squared_standard(input, off);
    REQUIRE(model_mean.has_value());
    REQUIRE(standard.has_value());
    REQUIRE(std::abs(*model_mean - *standard) > 1e-3);
}

TEST_CASE("scores bucket at the reporting boundaries") {
    REQUIRE(r2_bucket(0.59) == "<0.6");
    REQUIRE(r2_bucket(0.60) == "0.6\xE2\x80\x93" "0.7");
    REQUIRE(r2_bucket(0.69) == "0.6\xE2\x80\x93" "0.7");
    REQUIRE(r2_bucket(0.70) == "0.7\xE2\x80\x93" "0.8");
    REQUIRE(r2_bucket(0.79) == "0.7\xE2\x80\x93" "0.8");
    REQUIRE(r2_bucket(0.80) == "\xE2\x89\xA5" "0.8");
    REQUIRE(r2_bucket(0.99) == "\xE2\x89\xA5" "0.8");
}

TEST_CASE("fit rows render to two decimals with buckets") {
    PowerLawFit fit;
    fit.intercept = 0.58;
    fit.coefficient = 1.19;
    fit.r2_model_mean = 0.82;
    fit.n_points = 60;
    fit.dropped = 2;
    auto csv = fit_table_csv({{20, "aspect 20", fit}});
    REQUIRE(csv == "aspect_id,label,intercept,coefficient,r2,bucket,n_points,dropped\n"
                   "20,aspect 20,0.58,1.19,0.82,\xE2\x89\xA5" "0.8,60,2\n");
}

TEST_CASE("negative zero never reaches the table") {
    PowerLawFit fit;
    fit.intercept = -0.001;
    fit.coefficient = -0.004;
    fit.r2_model_mean = 0.5;
    fit.n_points = 3;
    auto csv = fit_table_csv({{1, "flat", fit}});
    REQUIRE(csv == "aspect_id,label,intercept,coefficient,r2,bucket,n_points,dropped\n"
                   "1,flat,0.00,0.00,0.50,<0.6,3,0\n");
}

TEST_CASE("undefined scores leave their columns empty") {
    PowerLawFit fit;
    fit.intercept = 0.7;
    fit.coefficient = 0;
    fit.n_points = 3;
    auto csv = fit_table_csv({{4, "const", fit}});
    REQUIRE(csv == "aspect_id,label,intercept,coefficient,r2,bucket,n_points,dropped\n"
                   "4,const,0.70,0.00,,,3,0\n");
}
