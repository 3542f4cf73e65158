#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "demandcast/diagnostics.hpp"
#include "demandcast/error.hpp"
#include "oracles.hpp"

using namespace demandcast;

namespace {

// Statistic at which the p-value surface equals p (the surface is increasing).
double implied_statistic(double p) {
    double lo = -20.0, hi = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mackinnon_pvalue(mid, AdfRegression::Constant).value < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Reported pairs are display-rounded in both numbers and do not all agree
// exactly, so compare the statistic implied by the reported p-value.
void check_reported_pair(double statistic, double reported_p, double tol) {
    const double implied = implied_statistic(reported_p);
    INFO("statistic " << statistic << " reported p " << reported_p << " implied statistic " << implied);
    CHECK(std::abs(implied - statistic) <= tol);
}

}  // namespace

TEST_CASE("MacKinnon p-values reproduce reported statistic/p-value pairs", "[diagnostics]") {
    check_reported_pair(-10.403, 1.88e-18, 0.0025);
    check_reported_pair(-10.258, 4.31e-18, 0.0025);
    check_reported_pair(-5.227, 7.73e-6, 0.0025);
    check_reported_pair(-5.393, 3.49e-6, 0.0025);
    check_reported_pair(-5.363, 4.042e-6, 0.0025);
    check_reported_pair(-5.390, 3.53e-6, 0.0025);
    check_reported_pair(-10.073, 1.23e-17, 0.0025);
    check_reported_pair(-10.072, 1.24e-17, 0.0025);
    // Reported with two decimals only.
    check_reported_pair(-5.45, 2.55e-6, 0.01);
}

TEST_CASE("MacKinnon p-value clamps outside the surface", "[diagnostics]") {
    const auto p = mackinnon_pvalue(-21.152, AdfRegression::Constant);
    CHECK(p.clamped);
    CHECK(p.value == 1e-8);
    const auto q = mackinnon_pvalue(5.0, AdfRegression::Constant);
    CHECK(q.clamped);
    CHECK(q.value == 1.0 - 1e-8);
    const auto mid = mackinnon_pvalue(-2.86, AdfRegression::Constant);
    CHECK_FALSE(mid.clamped);
    CHECK(std::abs(mid.value - 0.05) < 0.005);
    CHECK(mackinnon_pvalue(-1.94, AdfRegression::None).value == Catch::Approx(0.05).margin(0.005));
    CHECK(mackinnon_pvalue(-3.41, AdfRegression::ConstantTrend).value == Catch::Approx(0.05).margin(0.005));
}

TEST_CASE("MacKinnon critical values", "[diagnostics]") {
    const auto c = mackinnon_critical_values(AdfRegression::Constant, 100000);
    CHECK(c[0] == Catch::Approx(-3.43).margin(0.005));
    CHECK(c[1] == Catch::Approx(-2.86).margin(0.005));
    CHECK(c[2] == Catch::Approx(-2.57).margin(0.005));
    const auto small = mackinnon_critical_values(AdfRegression::Constant, 100);
    CHECK(small[1] < c[1]);
}

TEST_CASE("ADF basics", "[diagnostics]") {
    const auto ar = oracle::simulate_arma({0.5}, {}, 500, 3);
    const auto r = adf_test(ar);
    CHECK(r.rejects_unit_root());
    CHECK(r.n_effective == ar.size() - static_cast<std::size_t>(r.used_lags) - 1);
    CHECK(r.max_lag == static_cast<int>(std::floor(12.0 * std::pow(5.0, 0.25))));
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);

    const auto fixed = adf_test(ar, AdfRegression::Constant, 3, LagSelection::Fixed);
    CHECK(fixed.used_lags == 3);

    const auto walk = oracle::random_walk(500, 4);
    CHECK_FALSE(adf_test(walk).rejects_unit_root());

    CHECK_THROWS_AS(adf_test(std::vector<double>(19, 1.0)), InsufficientData);
    CHECK_THROWS_AS(adf_test(TimeSeries::from_values({1, kMissing, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16,
                                                      17, 18, 19, 20, 21, 22})),
                    InvalidArgument);
}

TEST_CASE("ADF statistic is invariant under positive affine maps", "[diagnostics]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto x = oracle::simulate_arma({0.8}, {0.3}, 400, seed);
        auto y = x;
        for (auto& v : y) v = 250.0 * v + 9000.0;
        for (auto reg : {AdfRegression::Constant, AdfRegression::ConstantTrend}) {
            const auto a = adf_test(x, reg);
            const auto b = adf_test(y, reg);
            CHECK(a.used_lags == b.used_lags);
            CHECK(std::abs(a.statistic - b.statistic) <= 1e-9);
        }
    }
}

TEST_CASE("ADF rejection rates on a small Monte Carlo", "[diagnostics]") {
    int walk_rejections = 0, ar_rejections = 0;
    const int reps = 200;
    for (int i = 0; i < reps; ++i) {
        walk_rejections += adf_test(oracle::random_walk(500, 1000 + i)).rejects_unit_root();
        ar_rejections += adf_test(oracle::simulate_arma({0.5}, {}, 500, 5000 + i)).rejects_unit_root();
    }
    CHECK(walk_rejections <= 0.12 * reps);
    CHECK(ar_rejections >= 0.9 * reps);
}

TEST_CASE("ACF examples", "[diagnostics]") {
    std::vector<double> alt(200);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 2.0 : 1.0;
    const auto a = acf(alt, 4);
    CHECK(a.values[0] == Catch::Approx(-1.0).margin(0.01));
    CHECK(a.values[1] == Catch::Approx(1.0).margin(0.02));
    CHECK(a.band == Catch::Approx(1.96 / std::sqrt(200.0)));

    const auto ar = oracle::simulate_arma({0.5}, {}, 10000, 8);
    const auto r = acf(ar, 5);
    for (int k = 1; k <= 5; ++k) CHECK(std::abs(r.values[static_cast<std::size_t>(k - 1)] - std::pow(0.5, k)) <= 0.03);

    const auto wn = oracle::simulate_arma({}, {}, 5000, 9);
    const auto w = acf(wn, 40);
    int inside = 0;
    for (double v : w.values) {
        inside += std::abs(v) < 3.0 / std::sqrt(5000.0);
        CHECK(std::abs(v) <= 1.0);
    }
    CHECK(inside >= 38);

    CHECK_THROWS_AS(acf(std::vector<double>(50, 3.0), 5), InsufficientData);
    CHECK_THROWS_AS(acf(wn, 5000), InsufficientData);
}

TEST_CASE("PACF agrees with regression oracle", "[diagnostics]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = oracle::simulate_arma({0.6, -0.2}, {0.4}, 300, 70 + seed);
        const auto p = pacf(x, 12);
        const auto ref = oracle::regression_pacf(x, 12);
        for (std::size_t k = 0; k < 12; ++k) CHECK(std::abs(p.values[k] - ref[k]) <= 1e-6);
        CHECK(p.values[0] == acf(x, 1).values[0]);
    }
}

TEST_CASE("PACF of an AR(1) cuts off after lag 1", "[diagnostics]") {
    const auto x = oracle::simulate_arma({0.7}, {}, 10000, 12);
    const auto p = pacf(x, 10);
    CHECK(std::abs(p.values[0] - 0.7) <= 0.03);
    for (std::size_t k = 1; k < 10; ++k) CHECK(std::abs(p.values[k]) < 0.05);
    CHECK_THROWS_AS(pacf(x, 6000), InsufficientData);
}

TEST_CASE("Durbin-Levinson solves Yule-Walker", "[diagnostics]") {
    const auto gamma = oracle::arma_autocov({0.5, 0.3}, {}, 5);
    const auto lr = durbin_levinson(gamma, 2);
    CHECK(lr.coefficients[0] == Catch::Approx(0.5).margin(1e-10));
    CHECK(lr.coefficients[1] == Catch::Approx(0.3).margin(1e-10));
    CHECK(lr.innovation_variance == Catch::Approx(1.0).margin(1e-10));
    CHECK(lr.partials[1] == Catch::Approx(0.3).margin(1e-10));
    const std::vector<double> bad{1.0, 1.5};
    CHECK_THROWS_AS(durbin_levinson(bad, 1), NumericalError);
}

TEST_CASE("differencing recommendation", "[diagnostics]") {
    const auto ar = TimeSeries::from_values(oracle::simulate_arma({0.5}, {}, 500, 21));
    CHECK(recommend_differencing(ar).spec.d == 0);
    auto walk = oracle::random_walk(500, 22);
    CHECK(recommend_differencing(TimeSeries::from_values(walk)).spec.d == 1);
    CHECK_THROWS_AS(recommend_differencing(TimeSeries::from_values(std::vector<double>(30, 1.0))), InsufficientData);
}

TEST_CASE("ADF ladder flags over-differencing", "[diagnostics]") {
    const auto ar = TimeSeries::from_values(oracle::simulate_arma({0.5}, {}, 800, 31));
    const auto ladder = adf_ladder(ar);
    REQUIRE(ladder.size() == 3);
    CHECK(ladder[0].order == 0);
    CHECK_FALSE(ladder[0].over_differencing_risk);
    CHECK(ladder[2].over_differencing_risk);
    CHECK(ladder[2].lag1_acf < -0.5);

    const auto walk = TimeSeries::from_values(oracle::random_walk(800, 32));
    const auto wl = adf_ladder(walk);
    CHECK_FALSE(wl[0].adf.rejects_unit_root());
    CHECK(wl[1].adf.p_value < 0.01);
    CHECK_FALSE(wl[1].over_differencing_risk);
}
