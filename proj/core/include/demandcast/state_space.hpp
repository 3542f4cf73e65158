#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace demandcast {

/// Zero-mean ARMA in Harvey's state-space form with unit innovation variance.
///
///   state_{t+1} = T state_t + R eps_{t+1},   w_t = state_t[0]
///
/// T carries the AR coefficients in its first column and ones on the
/// superdiagonal; R = (1, b_1, ..., b_{r-1}). The dimension is
/// r = max(p, q + 1) for AR degree p and MA degree q.
class ArmaStateSpace {
public:
    ArmaStateSpace(std::vector<double> ar, std::vector<double> ma);

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<double>& ar() const noexcept { return ar_; }
    const std::vector<double>& ma() const noexcept { return ma_; }

    /// a_{i+1} padded with zeros up to the state dimension.
    double ar_at(std::size_t i) const noexcept { return i < ar_.size() ? ar_[i] : 0.0; }
    /// R_i: 1 for i = 0, b_i afterwards, zero past the MA degree.
    double r_at(std::size_t i) const noexcept { return i == 0 ? 1.0 : (i <= ma_.size() ? ma_[i - 1] : 0.0); }

    /// psi weights of the MA(infinity) representation, lags 0..count-1.
    std::vector<double> psi_weights(std::size_t count) const;

    /// Autocovariances at lags 0..max_lag for unit innovation variance.
    /// Throws NumericalError if the AR part is (numerically) non-stationary.
    std::vector<double> autocovariances(std::size_t max_lag) const;

    /// Solution of P = T P T' + R R' (the stationary state covariance), built
    /// from the autocovariances in O(r^2).
    Eigen::MatrixXd stationary_covariance() const;

    /// x <- T x
    void apply_transition(std::span<double> x) const;

private:
    std::vector<double> ar_;
    std::vector<double> ma_;
    std::size_t dim_;
};

struct KalmanOutput {
    /// One-step innovations and their variances (unit innovation scale), for
    /// each filtered input column.
    std::vector<std::vector<double>> innovations;
    std::vector<double> variances;
    /// Predicted state mean per column and covariance after the last observation.
    std::vector<Eigen::VectorXd> next_state;
    Eigen::MatrixXd next_covariance;
    std::size_t steady_state_at = 0;  // 0 if the covariance never settled
};

/// Filters one or more equally long series through the same model. The gain
/// sequence does not depend on the data, so extra columns (for example a
/// column of ones for a GLS mean) cost only O(r) per step each.
KalmanOutput kalman_filter(const ArmaStateSpace& model, std::span<const std::span<const double>> columns);

struct ConcentratedLikelihood {
    double loglik = 0.0;       // with the innovation variance profiled out
    double sigma2 = 0.0;       // profiled innovation variance
    double mean = 0.0;         // GLS mean, zero when not estimated
    double sum_log_f = 0.0;
    double sum_sq = 0.0;       // sum of v^2 / f after mean removal
    std::size_t n = 0;
};

/// Exact Gaussian log-likelihood maximized over sigma2 (and over the mean when
/// `estimate_mean` is set).
ConcentratedLikelihood concentrated_loglik(const ArmaStateSpace& model, std::span<const double> w, bool estimate_mean);

/// Exact Gaussian log-likelihood of zero-mean data at a given innovation variance.
double exact_loglik(const ArmaStateSpace& model, std::span<const double> w, double sigma2);

}  // namespace demandcast
