#include "demandcast/mackinnon.hpp"

#include <cmath>
#include <string>

#include "demandcast/error.hpp"

namespace demandcast {

namespace {

struct Surface {
    double tau_max;
    double tau_min;
    double tau_star;
    std::array<double, 3> small_p;  // ascending powers of tau
    std::array<double, 4> large_p;
};

// One-regressor (N = 1) rows of MacKinnon (1994), Table 3.
constexpr Surface kNone{
    INFINITY, -19.04, -1.04, {0.6344, 1.2378, 3.2496e-2}, {0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2}};
constexpr Surface kConstant{
    2.74, -18.83, -1.61, {2.1659, 1.4412, 3.8269e-2}, {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2}};
constexpr Surface kConstantTrend{
    0.70, -16.18, -2.89, {3.2512, 1.6047, 4.9588e-2}, {2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2}};

// MacKinnon (2010) response surfaces: tau(T) = b0 + b1/T + b2/T^2 + b3/T^3.
constexpr std::array<std::array<double, 4>, 3> kCritNone{{
    {-2.56574, -2.2358, -3.627, 0.0},
    {-1.94100, -0.2686, -3.365, 31.223},
    {-1.61682, 0.2656, -2.714, 25.364},
}};
constexpr std::array<std::array<double, 4>, 3> kCritConstant{{
    {-3.43035, -6.5393, -16.786, -79.433},
    {-2.86154, -2.8903, -4.234, -40.040},
    {-2.56677, -1.5384, -2.809, 0.0},
}};
constexpr std::array<std::array<double, 4>, 3> kCritTrend{{
    {-3.95877, -9.0531, -28.428, -134.155},
    {-3.41049, -4.3904, -9.036, -45.374},
    {-3.12705, -2.5856, -3.925, -22.380},
}};

const Surface& surface(AdfRegression r) {
    switch (r) {
        case AdfRegression::None: return kNone;
        case AdfRegression::Constant: return kConstant;
        case AdfRegression::ConstantTrend: return kConstantTrend;
    }
    return kConstant;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

template <std::size_t N>
double polyval(const std::array<double, N>& c, double x) {
    double acc = 0.0;
    for (std::size_t i = N; i-- > 0;) acc = acc * x + c[i];
    return acc;
}

}  // namespace

std::string_view to_string(AdfRegression regression) {
    switch (regression) {
        case AdfRegression::None: return "n";
        case AdfRegression::Constant: return "c";
        case AdfRegression::ConstantTrend: return "ct";
    }
    return "c";
}

AdfRegression parse_adf_regression(std::string_view text) {
    if (text == "n" || text == "none") return AdfRegression::None;
    if (text == "c" || text == "constant") return AdfRegression::Constant;
    if (text == "ct" || text == "trend") return AdfRegression::ConstantTrend;
    throw InvalidArgument("unknown ADF regression '" + std::string(text) + "'");
}

PValue mackinnon_pvalue(double statistic, AdfRegression regression) {
    constexpr double kFloor = 1e-8;
    const auto& s = surface(regression);
    if (std::isnan(statistic)) throw NumericalError("ADF statistic is NaN");
    if (statistic > s.tau_max) return {1.0 - kFloor, true};
    if (statistic < s.tau_min) return {kFloor, true};
    const double z = statistic <= s.tau_star ? polyval(s.small_p, statistic) : polyval(s.large_p, statistic);
    return {normal_cdf(z), false};
}

std::array<double, 3> mackinnon_critical_values(AdfRegression regression, std::size_t nobs) {
    const auto& table = regression == AdfRegression::None       ? kCritNone
                        : regression == AdfRegression::Constant ? kCritConstant
                                                                : kCritTrend;
    const double inv = 1.0 / static_cast<double>(nobs);
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) out[i] = polyval(table[i], inv);
    return out;
}

}  // namespace demandcast
