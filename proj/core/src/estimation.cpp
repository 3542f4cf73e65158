#include "demandcast/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>

#include "demandcast/diagnostics.hpp"
#include "demandcast/error.hpp"
#include "demandcast/nelder_mead.hpp"
#include "demandcast/polynomial.hpp"
#include "demandcast/state_space.hpp"

namespace demandcast {

SarimaSpec SarimaSpec::arima(int p, int d, int q) {
    SarimaSpec s;
    s.p = p;
    s.d = d;
    s.q = q;
    s.with_intercept = d == 0;
    return s;
}

SarimaSpec SarimaSpec::seasonal(int p, int d, int q, int P, int D, int Q, int s) {
    SarimaSpec spec{p, d, q, P, D, Q, s, d + D == 0};
    return spec.normalized();
}

SarimaSpec SarimaSpec::parse(std::string_view text) {
    std::vector<int> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        auto token = text.substr(pos, comma - pos);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        int v = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size())
            throw InvalidArgument("bad model order '" + std::string(text) + "': expected p,d,q[,P,D,Q,s]");
        parts.push_back(v);
        pos = comma + 1;
    }
    SarimaSpec spec;
    if (parts.size() == 3) {
        spec = arima(parts[0], parts[1], parts[2]);
    } else if (parts.size() == 7) {
        spec = SarimaSpec{parts[0], parts[1], parts[2], parts[3], parts[4], parts[5], parts[6],
                          parts[1] + parts[4] == 0};
    } else {
        throw InvalidArgument("bad model order '" + std::string(text) + "': expected 3 or 7 integers");
    }
    spec.validate();
    return spec.normalized();
}

void SarimaSpec::validate(int state_cap) const {
    if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0) throw InvalidArgument("model orders must be non-negative");
    if (s < 1) throw InvalidArgument("seasonal period must be at least 1");
    if (has_seasonal_terms() && s < 2) throw InvalidArgument("seasonal terms need a period of at least 2");
    difference_spec().validate();
    if (static_cast<int>(ar_degree()) > state_cap || static_cast<int>(ma_degree()) > state_cap)
        throw InvalidArgument("model " + to_string() + " exceeds the state-dimension cap of " + std::to_string(state_cap));
}

SarimaSpec SarimaSpec::normalized() const {
    SarimaSpec out = *this;
    if (!out.has_seasonal_terms()) out.s = 1;
    return out;
}

std::string SarimaSpec::to_string() const {
    std::string out = "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
    if (has_seasonal_terms())
        out += "(" + std::to_string(P) + "," + std::to_string(D) + "," + std::to_string(Q) + "," + std::to_string(s) + ")";
    return out;
}

SarimaParams SarimaParams::zeros(const SarimaSpec& spec) {
    SarimaParams p;
    p.phi.assign(static_cast<std::size_t>(spec.p), 0.0);
    p.theta.assign(static_cast<std::size_t>(spec.q), 0.0);
    p.seasonal_phi.assign(static_cast<std::size_t>(spec.P), 0.0);
    p.seasonal_theta.assign(static_cast<std::size_t>(spec.Q), 0.0);
    return p;
}

void SarimaParams::check_dimensions(const SarimaSpec& spec) const {
    if (phi.size() != static_cast<std::size_t>(spec.p) || theta.size() != static_cast<std::size_t>(spec.q) ||
        seasonal_phi.size() != static_cast<std::size_t>(spec.P) ||
        seasonal_theta.size() != static_cast<std::size_t>(spec.Q))
        throw InvalidArgument("parameter dimensions do not match model " + spec.to_string());
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("innovation variance must be positive");
    if (!spec.with_intercept && intercept != 0.0) throw InvalidArgument("intercept set on a model without one");
}

ExpandedArma expand_polynomials(const SarimaSpec& spec, const SarimaParams& params) {
    params.check_dimensions(spec);
    const int s = spec.has_seasonal_terms() ? spec.s : 1;
    ExpandedArma out;
    out.ar = poly::multiply_ar(params.phi, poly::seasonal_spread(params.seasonal_phi, s));
    out.ma = poly::multiply_ma(params.theta, poly::seasonal_spread(params.seasonal_theta, s));
    return out;
}

double SarimaParams::constant_term(const SarimaSpec& spec) const {
    const auto e = expand_polynomials(spec, *this);
    double sum = 0.0;
    for (double a : e.ar) sum += a;
    return intercept * (1.0 - sum);
}

namespace {

void check_admissible(const SarimaParams& params) {
    if (!poly::is_stationary(params.phi) || !poly::is_stationary(params.seasonal_phi))
        throw InvalidArgument("AR parameters are not stationary");
    if (!poly::is_invertible(params.theta) || !poly::is_invertible(params.seasonal_theta))
        throw InvalidArgument("MA parameters are not invertible");
}

struct Prepared {
    Differenced diffed;
    std::vector<double> w;  // differenced values
};

Prepared prepare(const SarimaSpec& spec, const TimeSeries& series) {
    Prepared out;
    out.diffed = difference(series, spec.difference_spec());
    const auto v = out.diffed.series.values();
    out.w.assign(v.begin(), v.end());
    const std::size_t need = std::max(spec.ar_degree(), spec.ma_degree()) + 1;
    if (out.w.size() <= need)
        throw InsufficientData("model " + spec.to_string() + " needs more than " + std::to_string(need) +
                               " observations after differencing, got " + std::to_string(out.w.size()));
    return out;
}

constexpr double kMaxUnconstrained = 10.0;

std::vector<double> negate(std::vector<double> v) {
    for (auto& x : v) x = -x;
    return v;
}

// Layout of the unconstrained vector: [phi | theta | Phi | Theta].
SarimaParams unpack(const SarimaSpec& spec, std::span<const double> u) {
    std::vector<double> clamped(u.begin(), u.end());
    for (auto& v : clamped) v = std::clamp(v, -kMaxUnconstrained, kMaxUnconstrained);
    const std::span<const double> all(clamped);
    std::size_t at = 0;
    auto take = [&](int count) {
        auto s = all.subspan(at, static_cast<std::size_t>(count));
        at += static_cast<std::size_t>(count);
        return poly::constrain_stationary(s);
    };
    SarimaParams params;
    params.phi = take(spec.p);
    params.theta = negate(take(spec.q));
    params.seasonal_phi = take(spec.P);
    params.seasonal_theta = negate(take(spec.Q));
    return params;
}

std::vector<double> pack(const SarimaParams& params) {
    std::vector<double> u;
    auto put = [&](const std::vector<double>& coeffs) {
        for (double v : poly::unconstrain_stationary(coeffs)) u.push_back(std::clamp(v, -3.0, 3.0));
    };
    put(params.phi);
    put(negate(params.theta));
    put(params.seasonal_phi);
    put(negate(params.seasonal_theta));
    return u;
}

// Hannan-Rissanen: a long Yule-Walker autoregression supplies residual proxies,
// then one least-squares regression on the base AR and MA lags. Cross terms of
// the multiplicative structure are ignored; each block is then pulled inside
// the admissible region.
SarimaParams hannan_rissanen(const SarimaSpec& spec, std::span<const double> w) {
    SarimaParams start = SarimaParams::zeros(spec);
    const std::size_t n = w.size();
    const int s = spec.has_seasonal_terms() ? spec.s : 1;

    std::vector<std::size_t> ar_lags, ma_lags;
    for (int i = 1; i <= spec.p; ++i) ar_lags.push_back(static_cast<std::size_t>(i));
    for (int i = 1; i <= spec.P; ++i) ar_lags.push_back(static_cast<std::size_t>(i * s));
    for (int i = 1; i <= spec.q; ++i) ma_lags.push_back(static_cast<std::size_t>(i));
    for (int i = 1; i <= spec.Q; ++i) ma_lags.push_back(static_cast<std::size_t>(i * s));
    if (ar_lags.empty() && ma_lags.empty()) return start;

    std::vector<double> resid(n, 0.0);
    std::size_t first = 0;
    if (!ma_lags.empty()) {
        const auto m = std::min<std::size_t>(
            std::max<std::size_t>(static_cast<std::size_t>(std::ceil(10.0 * std::log10(static_cast<double>(n)))),
                                  spec.ar_degree() + 2 * spec.ma_degree()),
            n / 4);
        if (m < 1) return start;
        try {
            const auto gamma = autocovariances(w, static_cast<int>(m));
            const auto lr = durbin_levinson(gamma, static_cast<int>(m));
            for (std::size_t t = m; t < n; ++t) {
                double e = w[t];
                for (std::size_t j = 1; j <= m; ++j) e -= lr.coefficients[j - 1] * w[t - j];
                resid[t] = e;
            }
        } catch (const Error&) {
            return start;
        }
        first = m;
    }
    std::size_t max_lag = 0;
    for (auto l : ar_lags) max_lag = std::max(max_lag, l);
    for (auto l : ma_lags) max_lag = std::max(max_lag, l);
    first += max_lag;
    const std::size_t cols = ar_lags.size() + ma_lags.size();
    if (first >= n || n - first < cols + 10) return start;

    Eigen::MatrixXd X(static_cast<Eigen::Index>(n - first), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n - first));
    for (std::size_t t = first; t < n; ++t) {
        const auto row = static_cast<Eigen::Index>(t - first);
        y[row] = w[t];
        Eigen::Index c = 0;
        for (auto l : ar_lags) X(row, c++) = w[t - l];
        for (auto l : ma_lags) X(row, c++) = resid[t - l];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < static_cast<Eigen::Index>(cols)) return start;
    const Eigen::VectorXd beta = qr.solve(y);
    if (!beta.allFinite()) return start;

    Eigen::Index at = 0;
    auto block = [&](int count) {
        std::vector<double> v(static_cast<std::size_t>(count));
        for (auto& x : v) x = beta[at++];
        return v;
    };
    start.phi = poly::shrink_to_stationary(block(spec.p));
    start.seasonal_phi = poly::shrink_to_stationary(block(spec.P));
    start.theta = negate(poly::shrink_to_stationary(negate(block(spec.q))));
    start.seasonal_theta = negate(poly::shrink_to_stationary(negate(block(spec.Q))));
    return start;
}

double sample_mean(std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += v;
    return s / static_cast<double>(w.size());
}

}  // namespace

double log_likelihood(const SarimaSpec& spec, const SarimaParams& params, const TimeSeries& series) {
    spec.validate();
    params.check_dimensions(spec);
    check_admissible(params);
    auto prep = prepare(spec, series);
    if (spec.with_intercept) {
        for (auto& v : prep.w) v -= params.intercept;
    }
    const auto e = expand_polynomials(spec, params);
    const ArmaStateSpace model(e.ar, e.ma);
    return exact_loglik(model, prep.w, params.sigma2);
}

void set_information_criteria(SarimaFit& fit, double loglik) {
    const double k = static_cast<double>(fit.spec.parameter_count());
    fit.loglik = loglik;
    fit.aic = 2.0 * k - 2.0 * loglik;
    fit.bic = k * std::log(static_cast<double>(fit.n_obs)) - 2.0 * loglik;
}

SarimaFit fit(const SarimaSpec& raw_spec, const TimeSeries& series, const FitOptions& options) {
    const SarimaSpec spec = raw_spec.normalized();
    spec.validate(options.state_cap);
    const auto prep = prepare(spec, series);
    const auto& w = prep.w;
    const std::size_t n = w.size();

    SarimaFit out;
    out.spec = spec;
    out.n_obs = n;
    if (n < static_cast<std::size_t>(10 * spec.parameter_count()))
        out.warnings.push_back("only " + std::to_string(n) + " observations for " +
                               std::to_string(spec.parameter_count()) + " parameters");

    std::vector<double> hr_input(w.begin(), w.end());
    if (spec.with_intercept) {
        const double m = sample_mean(w);
        for (auto& v : hr_input) v -= m;
    }

    auto evaluate = [&](std::span<const double> u) -> ConcentratedLikelihood {
        const auto params = unpack(spec, u);
        const auto e = expand_polynomials(spec, params);
        return concentrated_loglik(ArmaStateSpace(e.ar, e.ma), w, spec.with_intercept);
    };
    auto objective = [&](std::span<const double> u) -> double {
        try {
            return -evaluate(u).loglik / static_cast<double>(n);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const std::size_t dim = static_cast<std::size_t>(spec.p + spec.q + spec.P + spec.Q);
    std::vector<double> best_u;
    double best_value = std::numeric_limits<double>::infinity();
    bool best_converged = false;

    if (dim == 0) {
        best_value = objective({});
        best_converged = std::isfinite(best_value);
    } else {
        NelderMeadOptions nm;
        nm.max_evaluations = options.max_evaluations;
        nm.relative_size_tol = options.tolerance;
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> jitter(0.0, 0.3);

        std::vector<double> start = pack(hannan_rissanen(spec, hr_input));
        for (int run = 0; run < std::max(1, options.restarts); ++run) {
            if (run > 0) {
                start = best_u.empty() ? std::vector<double>(dim, 0.0) : best_u;
                for (auto& v : start) v += jitter(rng);
            }
            const auto res = nelder_mead(objective, start, nm);
            out.evaluations += res.evaluations;
            if (res.value < best_value) {
                best_value = res.value;
                best_u = res.x;
                best_converged = res.converged;
            }
        }
    }
    if (!std::isfinite(best_value))
        throw NumericalError("likelihood of " + spec.to_string() + " was not finite at any start");

    const auto ll = evaluate(best_u);
    out.params = unpack(spec, best_u);
    out.params.intercept = spec.with_intercept ? ll.mean : 0.0;
    out.params.sigma2 = ll.sigma2;
    out.converged = best_converged;
    set_information_criteria(out, ll.loglik);

    const auto steps = one_step_predictions(spec, out.params, series);
    out.fitted = steps.fitted;
    out.residuals = steps.residuals;
    return out;
}

OneStep one_step_predictions(const SarimaSpec& spec, const SarimaParams& params, const TimeSeries& series) {
    auto prep = prepare(spec, series);
    if (spec.with_intercept) {
        for (auto& v : prep.w) v -= params.intercept;
    }
    const auto e = expand_polynomials(spec, params);
    const std::span<const double> cols[] = {prep.w};
    const auto kf = kalman_filter(ArmaStateSpace(e.ar, e.ma), cols);

    OneStep out;
    out.residuals = kf.innovations[0];
    const std::size_t lost = spec.difference_spec().lost();
    out.fitted.resize(out.residuals.size());
    for (std::size_t t = 0; t < out.residuals.size(); ++t) out.fitted[t] = series[lost + t] - out.residuals[t];
    return out;
}

Forecast forecast(const SarimaFit& fitted, const TimeSeries& series, std::size_t horizon, const ForecastOptions& options) {
    const auto& spec = fitted.spec;
    const auto& params = fitted.params;
    const std::size_t cap =
        options.max_horizon ? options.max_horizon : std::max<std::size_t>(3 * static_cast<std::size_t>(spec.s), 365);
    if (horizon < 1) throw InvalidArgument("forecast horizon must be at least 1");
    if (horizon > cap)
        throw InvalidArgument("forecast horizon " + std::to_string(horizon) + " exceeds the cap of " + std::to_string(cap));

    auto prep = prepare(spec, series);
    const double mu = spec.with_intercept ? params.intercept : 0.0;
    for (auto& v : prep.w) v -= mu;
    const auto e = expand_polynomials(spec, params);
    const ArmaStateSpace model(e.ar, e.ma);
    const std::span<const double> cols[] = {prep.w};
    const auto kf = kalman_filter(model, cols);

    const std::size_t r = model.dim();
    const std::size_t H = horizon;
    std::vector<double> w_hat(H);
    std::vector<double> a(kf.next_state[0].data(), kf.next_state[0].data() + r);
    for (std::size_t h = 0; h < H; ++h) {
        w_hat[h] = mu + a[0];
        model.apply_transition(a);
    }

    // C(i, j) = Cov(e_i, e_j) of the differenced-scale errors, unit variance.
    Eigen::MatrixXd C(static_cast<Eigen::Index>(H), static_cast<Eigen::Index>(H));
    Eigen::MatrixXd P = kf.next_covariance;
    std::vector<double> x(r);
    for (std::size_t i = 0; i < H; ++i) {
        for (std::size_t k = 0; k < r; ++k) x[k] = P(static_cast<Eigen::Index>(k), 0);
        for (std::size_t j = i; j < H; ++j) {
            C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[0];
            C(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = x[0];
            model.apply_transition(x);
        }
        // P <- T P T' + R R'
        Eigen::MatrixXd next(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
        auto at = [&](std::size_t u, std::size_t v) {
            return (u < r && v < r) ? P(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) : 0.0;
        };
        for (std::size_t u = 0; u < r; ++u) {
            for (std::size_t v = 0; v < r; ++v) {
                next(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) =
                    model.ar_at(u) * model.ar_at(v) * at(0, 0) + model.ar_at(u) * at(0, v + 1) +
                    model.ar_at(v) * at(u + 1, 0) + at(u + 1, v + 1) + model.r_at(u) * model.r_at(v);
            }
        }
        P = std::move(next);
    }

    // Integrate: y_{n+h} = w_{n+h} - sum_j delta_j y_{n+h-j}; the error weights c
    // are the expansion of 1 / delta(B).
    const auto delta = differencing_polynomial(spec.difference_spec());
    const std::size_t m = delta.size() - 1;
    std::vector<double> c(H, 0.0);
    c[0] = 1.0;
    for (std::size_t k = 1; k < H; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= std::min(k, m); ++j) acc -= delta[j] * c[k - j];
        c[k] = acc;
    }

    Forecast out;
    out.start = series.end_date() + std::chrono::days{1};
    const auto y = series.values();
    const std::size_t n = y.size();
    std::vector<double> path(y.begin(), y.end());
    path.reserve(n + H);
    for (std::size_t h = 0; h < H; ++h) {
        double v = w_hat[h];
        for (std::size_t j = 1; j <= m; ++j) v -= delta[j] * path[n + h - j];
        path.push_back(v);

        double var = 0.0;
        for (std::size_t k = 0; k <= h; ++k) {
            double row = 0.0;
            for (std::size_t l = 0; l <= h; ++l) row += C(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) * c[h - l];
            var += c[h - k] * row;
        }
        var *= params.sigma2;
        const double half = 1.96 * std::sqrt(std::max(var, 0.0));
        out.point.push_back(v);
        out.variance.push_back(var);
        out.lower.push_back(v - half);
        out.upper.push_back(v + half);
    }
    return out;
}

TimeSeries simulate(const SarimaSpec& raw_spec, const SarimaParams& params, std::size_t n, std::uint64_t seed) {
    const SarimaSpec spec = raw_spec.normalized();
    spec.validate();
    params.check_dimensions(spec);
    check_admissible(params);
    const auto diff = spec.difference_spec();
    const std::size_t lost = diff.lost();
    if (n <= lost) throw InvalidArgument("simulation length must exceed d + D*s");

    const auto e = expand_polynomials(spec, params);
    const std::size_t burn = std::max<std::size_t>(100, 10 * spec.state_dim());
    const std::size_t m = n - lost;
    const std::size_t total = burn + m;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(params.sigma2));
    std::vector<double> eps(total), w(total);
    for (std::size_t t = 0; t < total; ++t) {
        eps[t] = noise(rng);
        double v = eps[t];
        for (std::size_t j = 1; j <= e.ar.size() && j <= t; ++j) v += e.ar[j - 1] * w[t - j];
        for (std::size_t j = 1; j <= e.ma.size() && j <= t; ++j) v += e.ma[j - 1] * eps[t - j];
        w[t] = v;
    }
    std::vector<double> kept(w.begin() + static_cast<std::ptrdiff_t>(burn), w.end());
    if (spec.with_intercept) {
        for (auto& v : kept) v += params.intercept;
    }
    const auto start = TimeSeries::from_values({}).start_date();
    const TimeSeries differenced(start + std::chrono::days{static_cast<long>(lost)}, std::move(kept));
    const std::vector<double> zeros(lost, 0.0);
    return integrate(differenced, diff, zeros);
}

}  // namespace demandcast
