#pragma once

#include <complex>
#include <vector>

namespace mmfso {

// Zeroth-order Bessel function of the first kind.
double bessel_j0(double x);

// Modified Bessel function of the first kind I_nu(x). Throws NumericError
// when the unscaled value overflows; use bessel_i_scaled there.
double bessel_i(double nu, double x);

// exp(-x) * I_nu(x), finite for all x >= 0.
double bessel_i_scaled(double nu, double x);

double erf(double x);
double erfc(double x);
// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

// Principal-value exponential integral Ei(x); x = 0 throws.
double exp_integral_ei(double x);
// exp(u) * E1(u) for u > 0, i.e. -exp(u) Ei(-u), without overflow.
double exp_e1_scaled(double u);

// Upper incomplete gamma function Gamma(tau, x).
double upper_incomplete_gamma(double tau, double x);

// Coefficient of x^i in (sum_{t=0}^{m} x^t / t!)^j. Zero outside 0..j*m.
double phi_coeff(int i, int j, int m);
// All coefficients 0..j*m of the same polynomial (memoized per thread).
const std::vector<double>& phi_polynomial(int j, int m);
// log Phi(i, j, m) for i = 0..j*m, finite for orders where the plain
// coefficients under- or overflow (-inf where the value underflows to 0).
const std::vector<double>& log_phi_polynomial(int j, int m);

// log Gamma(z) for complex z (any branch; intended for exp()).
std::complex<double> log_gamma(std::complex<double> z);

// log|Gamma(x)| and its sign for real x; sign is 0 at the poles.
double log_abs_gamma(double x, int* sign);

}  // namespace mmfso
