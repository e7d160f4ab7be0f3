#pragma once

#include "singdet/errors.hpp"

namespace singdet::specfun {

// Bessel/Gamma order.  Finite; the zero finder additionally requires >= 0.
struct Order {
    double value;
    explicit Order(double v);
};

// Gamma function for x > 0.  Lanczos rational approximation, relative error
// below 1e-13 on [0.1, 50].
double gamma_fn(double x);
double log_gamma(double x);

// Modified Bessel function I_nu(z), nu in [0, 12), z >= 0.  Power series for
// small z, exponential asymptotic series for z > 15 + nu^2 (the two regimes
// overlap to better than 1e-11 at the switch for the supported orders).
// Throws RangeError carrying log I when the result exceeds double range.
double bessel_i(Order nu, double z);

// Modified Bessel function K_nu(z), z > 0, via the exponentially convergent
// trapezoid rule on the cosh integral representation (uniform in the order,
// integer orders included; cross-checked against the I_{+-nu} reflection
// formula in the tests).
double bessel_k(Order nu, double z);

// log I_nu(z) and log K_nu(z); safe over the full argument range used by the
// resolvent kernels (up to ~1e3, where I overflows and K underflows).
double bessel_i_log(Order nu, double z);
double bessel_k_log(Order nu, double z);

// Bessel function of the first kind J_nu(x), x >= 0.  Power series for
// x <= 2, Bessel integral representation beyond (uniformly accurate in the
// supported order range, unlike the Hankel expansion).
double bessel_j(Order nu, double x);

// k-th positive zero of J_nu, k >= 1; absolute error below 1e-10.
double bessel_j_zero(Order nu, int k);

}  // namespace singdet::specfun
