#include "demandcast/polynomial.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "demandcast/error.hpp"

namespace demandcast::poly {

std::vector<double> seasonal_spread(std::span<const double> coeffs, int period) {
    if (coeffs.empty()) return {};
    const auto s = static_cast<std::size_t>(period);
    std::vector<double> out(coeffs.size() * s, 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) out[(k + 1) * s - 1] = coeffs[k];
    return out;
}

namespace {

// Full product of 1 + sign*sum a_j B^j and 1 + sign*sum b_j B^j, dropping the leading 1.
std::vector<double> multiply(std::span<const double> a, std::span<const double> b, double sign) {
    std::vector<double> pa(a.size() + 1), pb(b.size() + 1);
    pa[0] = pb[0] = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) pa[i + 1] = sign * a[i];
    for (std::size_t i = 0; i < b.size(); ++i) pb[i + 1] = sign * b[i];
    std::vector<double> prod(pa.size() + pb.size() - 1, 0.0);
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pb.size(); ++j) prod[i + j] += pa[i] * pb[j];
    std::vector<double> out(prod.size() - 1);
    for (std::size_t k = 1; k < prod.size(); ++k) out[k - 1] = sign * prod[k];
    return out;
}

}  // namespace

std::vector<double> multiply_ar(std::span<const double> a, std::span<const double> b) { return multiply(a, b, -1.0); }

std::vector<double> multiply_ma(std::span<const double> a, std::span<const double> b) { return multiply(a, b, 1.0); }

std::vector<double> constrain_stationary(std::span<const double> unconstrained) {
    std::vector<double> phi;
    phi.reserve(unconstrained.size());
    for (std::size_t k = 0; k < unconstrained.size(); ++k) {
        const double r = std::tanh(unconstrained[k]);
        std::vector<double> next(k + 1);
        for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - r * phi[k - 1 - j];
        next[k] = r;
        phi = std::move(next);
    }
    return phi;
}

bool reflection_coefficients(std::span<const double> ar, std::vector<double>& partials) {
    std::vector<double> a(ar.begin(), ar.end());
    partials.assign(a.size(), 0.0);
    for (std::size_t k = a.size(); k-- > 0;) {
        const double r = a[k];
        if (!std::isfinite(r) || std::abs(r) >= 1.0) return false;
        partials[k] = r;
        const double denom = 1.0 - r * r;
        std::vector<double> prev(k);
        for (std::size_t j = 0; j < k; ++j) prev[j] = (a[j] + r * a[k - 1 - j]) / denom;
        a = std::move(prev);
    }
    return true;
}

std::vector<double> unconstrain_stationary(std::span<const double> ar) {
    std::vector<double> partials;
    if (!reflection_coefficients(ar, partials)) throw InvalidArgument("AR polynomial is not stationary");
    for (auto& r : partials) r = std::atanh(r);
    return partials;
}

bool is_stationary(std::span<const double> ar) {
    std::vector<double> partials;
    return reflection_coefficients(ar, partials);
}

bool is_invertible(std::span<const double> ma) {
    std::vector<double> neg(ma.begin(), ma.end());
    for (auto& v : neg) v = -v;
    return is_stationary(neg);
}

double max_inverse_root(std::span<const double> ar) {
    std::size_t n = ar.size();
    while (n > 0 && ar[n - 1] == 0.0) --n;
    if (n == 0) return 0.0;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) c(0, static_cast<Eigen::Index>(j)) = ar[j];
    for (std::size_t i = 1; i < n; ++i) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> shrink_to_stationary(std::span<const double> ar) {
    std::vector<double> a(ar.begin(), ar.end());
    for (int attempt = 0; attempt < 200 && !is_stationary(a); ++attempt) {
        double scale = 1.0;
        for (auto& v : a) {
            scale *= 0.9;
            v *= scale;
        }
    }
    if (!is_stationary(a)) a.assign(a.size(), 0.0);
    return a;
}

}  // namespace demandcast::poly
