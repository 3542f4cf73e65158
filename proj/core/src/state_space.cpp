#include "demandcast/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "demandcast/error.hpp"

namespace demandcast {

ArmaStateSpace::ArmaStateSpace(std::vector<double> ar, std::vector<double> ma)
    : ar_(std::move(ar)), ma_(std::move(ma)), dim_(std::max(ar_.size(), ma_.size() + 1)) {}

std::vector<double> ArmaStateSpace::psi_weights(std::size_t count) const {
    std::vector<double> psi(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        double v = j == 0 ? 1.0 : (j <= ma_.size() ? ma_[j - 1] : 0.0);
        for (std::size_t i = 1; i <= std::min(j, ar_.size()); ++i) v += ar_[i - 1] * psi[j - i];
        psi[j] = v;
    }
    return psi;
}

std::vector<double> ArmaStateSpace::autocovariances(std::size_t max_lag) const {
    const std::size_t p = ar_.size();
    const std::size_t q = ma_.size();
    const auto psi = psi_weights(q + 1);
    auto b = [&](std::size_t j) { return j == 0 ? 1.0 : ma_[j - 1]; };
    // sum_{j=k}^{q} b_j psi_{j-k}: covariance of the MA part of w_t with w_{t-k}.
    auto ma_cross = [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t j = k; j <= q; ++j) acc += b(j) * psi[j - k];
        return acc;
    };

    std::vector<double> gamma(std::max(max_lag, p) + 1, 0.0);
    // gamma(k) - sum_i a_i gamma(|k-i|) = ma_cross(k) for k = 0..p.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p + 1), static_cast<Eigen::Index>(p + 1));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(p + 1));
    for (std::size_t k = 0; k <= p; ++k) {
        for (std::size_t i = 1; i <= p; ++i) {
            const std::size_t lag = k >= i ? k - i : i - k;
            A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(lag)) -= ar_[i - 1];
        }
        rhs[static_cast<Eigen::Index>(k)] = ma_cross(k);
    }
    const Eigen::VectorXd head = A.partialPivLu().solve(rhs);
    if (!head.allFinite() || !(head[0] > 0.0))
        throw NumericalError("stationary covariance solve failed: AR part is not stationary");
    for (std::size_t k = 0; k <= p; ++k) gamma[k] = head[static_cast<Eigen::Index>(k)];
    for (std::size_t k = p + 1; k < gamma.size(); ++k) {
        double v = k <= q ? ma_cross(k) : 0.0;
        for (std::size_t i = 1; i <= p; ++i) v += ar_[i - 1] * gamma[k - i];
        gamma[k] = v;
    }
    gamma.resize(max_lag + 1);
    return gamma;
}

Eigen::MatrixXd ArmaStateSpace::stationary_covariance() const {
    const std::size_t r = dim_;
    const auto gamma = autocovariances(r);
    const auto psi = psi_weights(r);

    // Row 0: Cov(w_t, state_t[k]) where state_t[k] = sum_{m>=k} a_{m+1} w_{t-1-m+k} + b_m eps_{t-m+k}.
    std::vector<double> top(r + 1, 0.0);
    top[0] = gamma[0];
    for (std::size_t k = 1; k < r; ++k) {
        double acc = 0.0;
        for (std::size_t m = k; m < r; ++m) acc += ar_at(m) * gamma[1 + m - k] + r_at(m) * psi[m - k];
        top[k] = acc;
    }

    // state_t[i] = a_{i+1} w_{t-1} + state_{t-1}[i+1] + R_i eps_t, filled from the bottom-right.
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r + 1), static_cast<Eigen::Index>(r + 1));
    for (std::size_t k = 0; k < r; ++k) {
        P(0, static_cast<Eigen::Index>(k)) = top[k];
        P(static_cast<Eigen::Index>(k), 0) = top[k];
    }
    for (std::size_t i = r; i-- > 1;) {
        for (std::size_t j = r; j-- > i;) {
            const double v = ar_at(i) * ar_at(j) * gamma[0] + ar_at(i) * top[j + 1] + ar_at(j) * top[i + 1] +
                             P(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(j + 1)) + r_at(i) * r_at(j);
            P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            P(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    const Eigen::MatrixXd out = P.topLeftCorner(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    if (!out.allFinite()) throw NumericalError("stationary state covariance is not finite");
    return out;
}

void ArmaStateSpace::apply_transition(std::span<double> x) const {
    const double x0 = x[0];
    for (std::size_t i = 0; i < dim_; ++i) x[i] = ar_at(i) * x0 + (i + 1 < dim_ ? x[i + 1] : 0.0);
}

KalmanOutput kalman_filter(const ArmaStateSpace& model, std::span<const std::span<const double>> columns) {
    const std::size_t r = model.dim();
    const std::size_t W = r + 1;  // padded row stride; row/column r stay zero
    const std::size_t ncol = columns.size();
    const std::size_t n = ncol == 0 ? 0 : columns[0].size();

    std::vector<double> P(W * W, 0.0);
    {
        const auto P0 = model.stationary_covariance();
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) P[i * W + j] = P0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    std::vector<double> ar(W, 0.0), R(W, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        ar[i] = model.ar_at(i);
        R[i] = model.r_at(i);
    }

    KalmanOutput out;
    out.innovations.assign(ncol, std::vector<double>(n));
    out.variances.resize(n);
    std::vector<std::vector<double>> state(ncol, std::vector<double>(W, 0.0));
    std::vector<double> g(W, 0.0), Pn(W * W, 0.0);
    bool steady = false;
    constexpr double kSteadyTol = 1e-12;

    for (std::size_t t = 0; t < n; ++t) {
        const double F = P[0];
        if (!(F > 0.0) || !std::isfinite(F)) throw NumericalError("Kalman filter: non-positive prediction variance");
        out.variances[t] = F;
        for (std::size_t i = 0; i < r; ++i) g[i] = P[i * W];

        for (std::size_t c = 0; c < ncol; ++c) {
            auto& a = state[c];
            const double v = columns[c][t] - a[0];
            out.innovations[c][t] = v;
            const double scale = v / F;
            // Filtered state[0] equals the observation, so T(a + g v/F) simplifies.
            const double a0 = a[0] + g[0] * scale;
            for (std::size_t i = 0; i < r; ++i) a[i] = ar[i] * a0 + (a[i + 1] + g[i + 1] * scale);
        }

        if (!steady) {
            // The filtered covariance has a zero first row/column, so T M T' + R R'
            // reduces to a shifted copy of M plus R R'.
            double change = 0.0;
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = i; j < r; ++j) {
                    const double v = P[(i + 1) * W + j + 1] - g[i + 1] * g[j + 1] / F + R[i] * R[j];
                    Pn[i * W + j] = v;
                    Pn[j * W + i] = v;
                    change = std::max(change, std::abs(v - P[i * W + j]));
                }
            }
            P.swap(Pn);
            if (change <= kSteadyTol * F) {
                steady = true;
                out.steady_state_at = t + 1;
            }
        }
    }

    out.next_state.reserve(ncol);
    for (const auto& a : state) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(r));
        for (std::size_t i = 0; i < r; ++i) v[static_cast<Eigen::Index>(i)] = a[i];
        out.next_state.push_back(std::move(v));
    }
    out.next_covariance.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            out.next_covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = P[i * W + j];
    return out;
}

ConcentratedLikelihood concentrated_loglik(const ArmaStateSpace& model, std::span<const double> w, bool estimate_mean) {
    const std::size_t n = w.size();
    if (n == 0) throw InsufficientData("likelihood of an empty series");
    std::vector<double> ones;
    std::vector<std::span<const double>> cols{w};
    if (estimate_mean) {
        ones.assign(n, 1.0);
        cols.emplace_back(ones);
    }
    const auto kf = kalman_filter(model, cols);

    ConcentratedLikelihood out;
    out.n = n;
    if (estimate_mean) {
        double num = 0.0, den = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            num += kf.innovations[1][t] * kf.innovations[0][t] / kf.variances[t];
            den += kf.innovations[1][t] * kf.innovations[1][t] / kf.variances[t];
        }
        out.mean = num / den;
    }
    for (std::size_t t = 0; t < n; ++t) {
        double v = kf.innovations[0][t];
        if (estimate_mean) v -= out.mean * kf.innovations[1][t];
        out.sum_sq += v * v / kf.variances[t];
        out.sum_log_f += std::log(kf.variances[t]);
    }
    const auto nd = static_cast<double>(n);
    out.sigma2 = out.sum_sq / nd;
    if (!(out.sigma2 > 0.0)) throw NumericalError("profiled innovation variance is zero");
    out.loglik = -0.5 * (nd * std::log(2.0 * std::numbers::pi) + nd * std::log(out.sigma2) + out.sum_log_f + nd);
    if (!std::isfinite(out.loglik)) throw NumericalError("log-likelihood is not finite");
    return out;
}

double exact_loglik(const ArmaStateSpace& model, std::span<const double> w, double sigma2) {
    if (!(sigma2 > 0.0)) throw InvalidArgument("innovation variance must be positive");
    const std::span<const double> cols[] = {w};
    const auto kf = kalman_filter(model, cols);
    double ll = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
        const double f = sigma2 * kf.variances[t];
        const double v = kf.innovations[0][t];
        ll -= 0.5 * (std::log(2.0 * std::numbers::pi) + std::log(f) + v * v / f);
    }
    if (!std::isfinite(ll)) throw NumericalError("log-likelihood is not finite");
    return ll;
}

}  // namespace demandcast
