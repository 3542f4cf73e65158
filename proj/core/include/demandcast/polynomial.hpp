#pragma once

#include <span>
#include <vector>

// Lag polynomials are stored without their leading 1: element j-1 is the
// coefficient of B^j. AR polynomials read 1 - sum a_j B^j, MA polynomials read
// 1 + sum b_j B^j.
namespace demandcast::poly {

/// Places coefficient k at lag (k+1)*period.
std::vector<double> seasonal_spread(std::span<const double> coeffs, int period);

/// (1 - sum a_j B^j)(1 - sum b_j B^j), returned in AR form.
std::vector<double> multiply_ar(std::span<const double> a, std::span<const double> b);

/// (1 + sum a_j B^j)(1 + sum b_j B^j), returned in MA form.
std::vector<double> multiply_ma(std::span<const double> a, std::span<const double> b);

/// Maps unconstrained reals to the coefficients of a stationary AR polynomial:
/// tanh gives partial autocorrelations in (-1, 1), the Durbin-Levinson
/// recursion turns them into AR coefficients.
std::vector<double> constrain_stationary(std::span<const double> unconstrained);

/// Inverse of constrain_stationary. Throws InvalidArgument when `ar` is not
/// strictly stationary.
std::vector<double> unconstrain_stationary(std::span<const double> ar);

/// Partial autocorrelations of a stationary AR polynomial (step-down recursion).
/// Returns false if some |partial| >= 1, i.e. a root lies on or inside the unit circle.
bool reflection_coefficients(std::span<const double> ar, std::vector<double>& partials);

bool is_stationary(std::span<const double> ar);
bool is_invertible(std::span<const double> ma);

/// Largest modulus of the inverse roots of 1 - sum a_j z^j (companion eigenvalues).
/// Zero for an empty polynomial.
double max_inverse_root(std::span<const double> ar);

/// Scales a_j by lambda^j with lambda = 0.9 until the polynomial is stationary.
std::vector<double> shrink_to_stationary(std::span<const double> ar);

}  // namespace demandcast::poly
