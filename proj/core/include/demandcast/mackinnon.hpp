#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace demandcast {

/// Deterministic terms included in the Dickey-Fuller regression.
enum class AdfRegression { None, Constant, ConstantTrend };

std::string_view to_string(AdfRegression regression);
AdfRegression parse_adf_regression(std::string_view text);

struct PValue {
    double value = 1.0;
    bool clamped = false;  // statistic fell outside the tabulated response surface
};

/// Approximate asymptotic p-value of a single-series Dickey-Fuller tau
/// statistic from MacKinnon's (1994) normal-CDF response surfaces. Outside the
/// tabulated range the value is clamped to [1e-8, 1 - 1e-8].
PValue mackinnon_pvalue(double statistic, AdfRegression regression);

/// Finite-sample 1%, 5%, 10% critical values (MacKinnon 2010).
std::array<double, 3> mackinnon_critical_values(AdfRegression regression, std::size_t nobs);

}  // namespace demandcast
