#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "demandcast/mackinnon.hpp"
#include "demandcast/series.hpp"

namespace demandcast {

enum class LagSelection { Aic, Fixed };

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool p_clamped = false;
    int used_lags = 0;
    int max_lag = 0;
    std::size_t n_effective = 0;  // n - used_lags - 1
    AdfRegression regression = AdfRegression::Constant;
    std::array<double, 3> critical_values{};  // 1%, 5%, 10%

    bool rejects_unit_root(double level = 0.05) const { return p_value < level; }
};

/// Augmented Dickey-Fuller test. Regresses the first difference on the lagged
/// level, `used_lags` lagged differences and the deterministic terms. With
/// LagSelection::Aic the lag is picked on a common sample over 0..max_lag; the
/// default max_lag is floor(12 (n/100)^{1/4}).
AdfResult adf_test(const TimeSeries& series, AdfRegression regression = AdfRegression::Constant,
                   std::optional<int> max_lag = std::nullopt, LagSelection selection = LagSelection::Aic);
AdfResult adf_test(std::span<const double> values, AdfRegression regression = AdfRegression::Constant,
                   std::optional<int> max_lag = std::nullopt, LagSelection selection = LagSelection::Aic);

enum class CorrelogramKind { Acf, Pacf };

struct CorrelogramResult {
    CorrelogramKind kind = CorrelogramKind::Acf;
    std::vector<double> values;  // lags 1..L
    double band = 0.0;           // 1.96 / sqrt(n)
    std::size_t n = 0;
};

/// Sample autocorrelations with the biased 1/n autocovariance.
CorrelogramResult acf(const TimeSeries& series, int max_lag);
CorrelogramResult acf(std::span<const double> values, int max_lag);

/// Partial autocorrelations via Durbin-Levinson on the sample ACF.
CorrelogramResult pacf(const TimeSeries& series, int max_lag);
CorrelogramResult pacf(std::span<const double> values, int max_lag);

/// Biased sample autocovariances at lags 0..max_lag.
std::vector<double> autocovariances(std::span<const double> values, int max_lag);

struct LevinsonResult {
    std::vector<double> coefficients;  // AR(order) prediction coefficients
    std::vector<double> partials;      // reflection coefficients, lags 1..order
    double innovation_variance = 0.0;  // in the units of autocov[0]
};

/// Solves the Yule-Walker equations for orders 1..order. Throws NumericalError
/// when the sequence is not positive definite.
LevinsonResult durbin_levinson(std::span<const double> autocov, int order);

struct DifferencingAdvice {
    DifferenceSpec spec;  // D is never recommended automatically
    AdfResult adf;        // test on the recommended series
    double lag1_acf = 0.0;
    bool over_differenced = false;
    double weekly_acf = 0.0;  // lag-7 autocorrelation, informational
};

/// Smallest d in {0, 1, 2} whose d-times differenced series rejects the unit
/// root at 5%. Throws InsufficientData if none does.
DifferencingAdvice recommend_differencing(const TimeSeries& series, AdfRegression regression = AdfRegression::Constant);

struct AdfLadderRow {
    int order = 0;
    AdfResult adf;
    double lag1_acf = 0.0;
    bool over_differencing_risk = false;
};

/// ADF at regular differencing orders 0, 1, 2. A row is flagged as an
/// over-differencing risk when a lower order already rejected the unit root
/// and this order's p-value underflows the tabulated range (clamped) or its lag-1 ACF
/// is below -0.5.
std::vector<AdfLadderRow> adf_ladder(const TimeSeries& series, AdfRegression regression = AdfRegression::Constant);

}  // namespace demandcast
