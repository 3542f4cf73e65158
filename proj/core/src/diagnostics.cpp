#include "demandcast/diagnostics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "demandcast/error.hpp"

namespace demandcast {

namespace {

struct OlsFit {
    double t_first = 0.0;  // t-ratio of the first regressor
    double aic = 0.0;
};

OlsFit ols_first_tstat(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const auto nobs = static_cast<double>(X.rows());
    const auto k = X.cols();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) throw NumericalError("singular ADF regression matrix");
    const Eigen::VectorXd beta = qr.solve(y);
    const double ssr = (y - X * beta).squaredNorm();
    if (!(ssr > 0.0)) throw NumericalError("ADF regression has zero residual variance");
    const double s2 = ssr / (nobs - static_cast<double>(k));

    // (X'X)^{-1} = P R^{-1} R^{-T} P^T, so its (0,0) entry is the squared norm of
    // the row of R^{-1} belonging to column 0.
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::Index pos = 0;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = 0; i < k; ++i) {
        if (perm[i] == 0) pos = i;
    }
    const double var0 = s2 * Rinv.row(pos).squaredNorm();

    OlsFit out;
    out.t_first = beta[0] / std::sqrt(var0);
    const double llf = -nobs / 2.0 * (std::log(2.0 * std::numbers::pi) + std::log(ssr / nobs) + 1.0);
    out.aic = -2.0 * llf + 2.0 * static_cast<double>(k);
    return out;
}

int trend_terms(AdfRegression r) {
    switch (r) {
        case AdfRegression::None: return 0;
        case AdfRegression::Constant: return 1;
        case AdfRegression::ConstantTrend: return 2;
    }
    return 1;
}

// Rows are dx[first..], regressors: lagged level, `lags` lagged differences, deterministic terms.
OlsFit adf_regression(std::span<const double> x, std::span<const double> dx, int lags, std::size_t first,
                      AdfRegression regression) {
    const std::size_t rows = dx.size() - first;
    const int ntrend = trend_terms(regression);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), 1 + lags + ntrend);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;
        const auto i = static_cast<Eigen::Index>(r);
        y[i] = dx[t];
        X(i, 0) = x[t];
        for (int j = 1; j <= lags; ++j) X(i, j) = dx[t - static_cast<std::size_t>(j)];
        if (ntrend >= 1) X(i, 1 + lags) = 1.0;
        if (ntrend >= 2) X(i, 2 + lags) = static_cast<double>(r + 1);
    }
    return ols_first_tstat(X, y);
}

void require_complete(const TimeSeries& series, const char* what) {
    if (series.has_missing()) throw InvalidArgument(std::string(what) + " requires a series without missing values");
}

}  // namespace

AdfResult adf_test(const TimeSeries& series, AdfRegression regression, std::optional<int> max_lag,
                   LagSelection selection) {
    require_complete(series, "ADF test");
    return adf_test(series.values(), regression, max_lag, selection);
}

AdfResult adf_test(std::span<const double> x, AdfRegression regression, std::optional<int> max_lag,
                   LagSelection selection) {
    const std::size_t n = x.size();
    if (n < 20) throw InsufficientData("ADF test needs at least 20 observations, got " + std::to_string(n));
    const int ntrend = trend_terms(regression);
    const int cap = static_cast<int>(n / 2) - ntrend - 1;

    int lmax = 0;
    if (max_lag) {
        if (*max_lag < 0) throw InvalidArgument("ADF max_lag must be non-negative");
        if (*max_lag > cap)
            throw InvalidArgument("ADF max_lag " + std::to_string(*max_lag) + " exceeds n/2 - trend terms - 1 = " +
                                  std::to_string(cap));
        lmax = *max_lag;
    } else {
        lmax = static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
        lmax = std::min(lmax, cap);
    }

    std::vector<double> dx(n - 1);
    for (std::size_t t = 0; t + 1 < n; ++t) dx[t] = x[t + 1] - x[t];

    int lag = lmax;
    if (selection == LagSelection::Aic) {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= lmax; ++k) {
            const double aic = adf_regression(x, dx, k, static_cast<std::size_t>(lmax), regression).aic;
            if (aic < best) {
                best = aic;
                lag = k;
            }
        }
    }

    const auto fit = adf_regression(x, dx, lag, static_cast<std::size_t>(lag), regression);
    AdfResult out;
    out.statistic = fit.t_first;
    const auto p = mackinnon_pvalue(fit.t_first, regression);
    out.p_value = p.value;
    out.p_clamped = p.clamped;
    out.used_lags = lag;
    out.max_lag = lmax;
    out.n_effective = n - static_cast<std::size_t>(lag) - 1;
    out.regression = regression;
    out.critical_values = mackinnon_critical_values(regression, out.n_effective);
    return out;
}

std::vector<double> autocovariances(std::span<const double> x, int max_lag) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t)
            acc += (x[t] - mean) * (x[t + static_cast<std::size_t>(k)] - mean);
        out[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
    }
    return out;
}

CorrelogramResult acf(const TimeSeries& series, int max_lag) {
    require_complete(series, "ACF");
    return acf(series.values(), max_lag);
}

CorrelogramResult acf(std::span<const double> x, int max_lag) {
    if (max_lag < 1) throw InvalidArgument("ACF max_lag must be at least 1");
    if (static_cast<std::size_t>(max_lag) >= x.size())
        throw InsufficientData("ACF max_lag must be smaller than the series length");
    const auto gamma = autocovariances(x, max_lag);
    if (!(gamma[0] > 0.0)) throw InsufficientData("ACF undefined for a constant series");
    CorrelogramResult out;
    out.kind = CorrelogramKind::Acf;
    out.n = x.size();
    out.band = 1.96 / std::sqrt(static_cast<double>(x.size()));
    for (int k = 1; k <= max_lag; ++k) out.values.push_back(gamma[static_cast<std::size_t>(k)] / gamma[0]);
    return out;
}

LevinsonResult durbin_levinson(std::span<const double> autocov, int order) {
    if (order < 0 || autocov.size() < static_cast<std::size_t>(order) + 1)
        throw InvalidArgument("Durbin-Levinson needs autocovariances up to the requested order");
    LevinsonResult out;
    double v = autocov[0];
    if (!(v > 0.0)) throw NumericalError("Durbin-Levinson: non-positive variance");
    std::vector<double> phi;
    for (int k = 1; k <= order; ++k) {
        double num = autocov[static_cast<std::size_t>(k)];
        for (int j = 1; j < k; ++j) num -= phi[static_cast<std::size_t>(j - 1)] * autocov[static_cast<std::size_t>(k - j)];
        const double kappa = num / v;
        if (!std::isfinite(kappa) || std::abs(kappa) >= 1.0)
            throw NumericalError("Durbin-Levinson breakdown at lag " + std::to_string(k) +
                                 ": autocovariance sequence is not positive definite");
        std::vector<double> next(static_cast<std::size_t>(k));
        for (int j = 1; j < k; ++j)
            next[static_cast<std::size_t>(j - 1)] =
                phi[static_cast<std::size_t>(j - 1)] - kappa * phi[static_cast<std::size_t>(k - j - 1)];
        next[static_cast<std::size_t>(k - 1)] = kappa;
        phi = std::move(next);
        v *= 1.0 - kappa * kappa;
        out.partials.push_back(kappa);
    }
    out.coefficients = std::move(phi);
    out.innovation_variance = v;
    return out;
}

CorrelogramResult pacf(const TimeSeries& series, int max_lag) {
    require_complete(series, "PACF");
    return pacf(series.values(), max_lag);
}

CorrelogramResult pacf(std::span<const double> x, int max_lag) {
    if (max_lag < 1) throw InvalidArgument("PACF max_lag must be at least 1");
    if (static_cast<std::size_t>(max_lag) > x.size() / 2)
        throw InsufficientData("PACF max_lag must not exceed half the series length");
    const auto gamma = autocovariances(x, max_lag);
    if (!(gamma[0] > 0.0)) throw InsufficientData("PACF undefined for a constant series");
    // Work on correlations so lag 1 matches the ACF bit for bit.
    std::vector<double> rho(gamma.size());
    rho[0] = 1.0;
    for (std::size_t k = 1; k < gamma.size(); ++k) rho[k] = gamma[k] / gamma[0];
    CorrelogramResult out;
    out.kind = CorrelogramKind::Pacf;
    out.n = x.size();
    out.band = 1.96 / std::sqrt(static_cast<double>(x.size()));
    out.values = durbin_levinson(rho, max_lag).partials;
    return out;
}

namespace {

std::vector<double> regular_difference(std::span<const double> x, int d) {
    std::vector<double> v(x.begin(), x.end());
    for (int i = 0; i < d; ++i) {
        for (std::size_t t = 0; t + 1 < v.size(); ++t) v[t] = v[t + 1] - v[t];
        v.pop_back();
    }
    return v;
}

double lag_acf(std::span<const double> x, int lag) {
    if (x.size() <= static_cast<std::size_t>(lag)) return 0.0;
    return acf(x, lag).values.back();
}

}  // namespace

DifferencingAdvice recommend_differencing(const TimeSeries& series, AdfRegression regression) {
    require_complete(series, "differencing recommendation");
    if (series.size() < 50)
        throw InsufficientData("differencing recommendation needs at least 50 observations, got " +
                               std::to_string(series.size()));
    for (int d = 0; d <= 2; ++d) {
        const auto v = regular_difference(series.values(), d);
        const auto adf = adf_test(v, regression);
        if (adf.rejects_unit_root()) {
            DifferencingAdvice out;
            out.spec = DifferenceSpec{d, 0, 1};
            out.adf = adf;
            out.lag1_acf = lag_acf(v, 1);
            out.over_differenced = out.lag1_acf < -0.5;
            out.weekly_acf = lag_acf(v, 7);
            return out;
        }
    }
    throw InsufficientData("no regular differencing order up to 2 rejects the unit root at 5%");
}

std::vector<AdfLadderRow> adf_ladder(const TimeSeries& series, AdfRegression regression) {
    require_complete(series, "ADF ladder");
    std::vector<AdfLadderRow> rows;
    bool rejected_below = false;
    for (int d = 0; d <= 2; ++d) {
        const auto v = regular_difference(series.values(), d);
        AdfLadderRow row;
        row.order = d;
        row.adf = adf_test(v, regression);
        row.lag1_acf = lag_acf(v, 1);
        row.over_differencing_risk = rejected_below && (row.adf.p_clamped || row.lag1_acf < -0.5);
        rejected_below = rejected_below || row.adf.rejects_unit_root();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace demandcast
