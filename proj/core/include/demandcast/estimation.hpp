#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "demandcast/series.hpp"

namespace demandcast {

inline constexpr int kDefaultStateCap = 70;

/// Multiplicative seasonal ARIMA order (p,d,q)(P,D,Q,s).
struct SarimaSpec {
    int p = 0, d = 0, q = 0;
    int P = 0, D = 0, Q = 0;
    int s = 1;
    bool with_intercept = true;

    /// Intercept defaults to on only when nothing is differenced.
    static SarimaSpec arima(int p, int d, int q);
    static SarimaSpec seasonal(int p, int d, int q, int P, int D, int Q, int s);
    /// Parses "p,d,q" or "p,d,q,P,D,Q,s".
    static SarimaSpec parse(std::string_view text);

    bool has_seasonal_terms() const noexcept { return P > 0 || D > 0 || Q > 0; }
    std::size_t ar_degree() const noexcept { return static_cast<std::size_t>(p + P * s); }
    std::size_t ma_degree() const noexcept { return static_cast<std::size_t>(q + Q * s); }
    std::size_t state_dim() const noexcept { return std::max(ar_degree(), ma_degree() + 1); }
    /// Estimated parameters including the innovation variance.
    int parameter_count() const noexcept { return p + q + P + Q + (with_intercept ? 1 : 0) + 1; }
    DifferenceSpec difference_spec() const { return DifferenceSpec{d, D, has_seasonal_terms() ? s : 1}; }

    void validate(int state_cap = kDefaultStateCap) const;
    /// Period collapsed to 1 when there are no seasonal terms.
    SarimaSpec normalized() const;

    /// "(p,d,q)" or "(p,d,q)(P,D,Q,s)".
    std::string to_string() const;

    friend bool operator==(const SarimaSpec& a, const SarimaSpec& b) = default;
};

struct SarimaParams {
    /// Mean of the differenced series (the "c" of the ARMA equation is
    /// intercept * (1 - sum of expanded AR coefficients)).
    double intercept = 0.0;
    std::vector<double> phi;             // non-seasonal AR
    std::vector<double> theta;           // non-seasonal MA
    std::vector<double> seasonal_phi;    // seasonal AR
    std::vector<double> seasonal_theta;  // seasonal MA
    double sigma2 = 1.0;

    static SarimaParams zeros(const SarimaSpec& spec);
    void check_dimensions(const SarimaSpec& spec) const;
    double constant_term(const SarimaSpec& spec) const;
};

struct ExpandedArma {
    std::vector<double> ar;  // lag j at index j-1, AR form 1 - sum a_j B^j
    std::vector<double> ma;  // lag j at index j-1, MA form 1 + sum b_j B^j
};

/// phi(B) Phi(B^s) and theta(B) Theta(B^s).
ExpandedArma expand_polynomials(const SarimaSpec& spec, const SarimaParams& params);

/// Exact Gaussian log-likelihood (nats) of the series under (spec, params):
/// difference, remove the intercept, then Kalman-filter the expanded ARMA from
/// its stationary state distribution.
double log_likelihood(const SarimaSpec& spec, const SarimaParams& params, const TimeSeries& series);

struct FitOptions {
    int restarts = 3;
    std::size_t max_evaluations = 5000;  // per start
    double tolerance = 1e-8;             // relative simplex size
    std::uint64_t seed = 20230531;
    int state_cap = kDefaultStateCap;
};

struct SarimaFit {
    SarimaSpec spec;
    SarimaParams params;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t n_obs = 0;
    /// One-step innovations (MW), one per differenced observation.
    std::vector<double> residuals;
    /// One-step in-sample predictions on the original scale, aligned with the
    /// last n_obs values of the training series.
    std::vector<double> fitted;
    bool converged = false;
    std::size_t evaluations = 0;
    std::vector<std::string> warnings;
};

/// Exact maximum likelihood. Coefficient blocks are optimized in an
/// unconstrained space mapped through the partial-autocorrelation transform,
/// the variance and the mean are profiled out, and the simplex search starts
/// from Hannan-Rissanen estimates followed by perturbed restarts.
SarimaFit fit(const SarimaSpec& spec, const TimeSeries& series, const FitOptions& options = {});

/// Sets loglik/aic/bic from the spec's parameter count.
void set_information_criteria(SarimaFit& fit, double loglik);

struct Forecast {
    Date start{};  // date of the first forecast step
    std::vector<double> point;
    std::vector<double> variance;
    std::vector<double> lower;  // point - 1.96 sd
    std::vector<double> upper;

    std::size_t horizon() const noexcept { return point.size(); }
};

struct ForecastOptions {
    /// 0 means the default cap max(3 s, 365).
    std::size_t max_horizon = 0;
};

/// h-step forecasts on the original scale with exact error variances
/// (state uncertainty plus future shocks, propagated through integration).
Forecast forecast(const SarimaFit& fit, const TimeSeries& series, std::size_t horizon,
                  const ForecastOptions& options = {});

/// One-step in-sample predictions and innovations for fixed parameters.
struct OneStep {
    std::vector<double> fitted;
    std::vector<double> residuals;
};
OneStep one_step_predictions(const SarimaSpec& spec, const SarimaParams& params, const TimeSeries& series);

/// Gaussian sample path of length n. The ARMA part runs a burn-in of
/// max(100, 10 r) steps; d and D integrations start from zeros.
TimeSeries simulate(const SarimaSpec& spec, const SarimaParams& params, std::size_t n, std::uint64_t seed);

}  // namespace demandcast
