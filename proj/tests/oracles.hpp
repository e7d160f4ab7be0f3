#pragma once

// Test-only reference implementations in extended precision, independent of
// the code paths they validate: Stirling-with-shift gamma, plain power series
// for the Bessel functions, reflection for K, bisection for Bessel zeros.

#include <cmath>
#include <stdexcept>

namespace oracles {

inline long double ld_log_gamma(long double x) {
    // Stirling with argument shift to y >= 30; Bernoulli terms through B_16.
    static const long double bern[] = {
        1.0L / 12.0L,       -1.0L / 360.0L,      1.0L / 1260.0L,  -1.0L / 1680.0L,
        1.0L / 1188.0L,     -691.0L / 360360.0L, 1.0L / 156.0L,   -3617.0L / 122400.0L};
    int shift = 0;
    long double y = x;
    while (y < 30.0L) {
        ++shift;
        y += 1.0L;
    }
    const long double pi = 3.14159265358979323846264338327950288L;
    long double lg = (y - 0.5L) * std::log(y) - y + 0.5L * std::log(2.0L * pi);
    long double ypow = y;
    for (int k = 0; k < 8; ++k) {
        lg += bern[k] / ypow;
        ypow *= y * y;
    }
    for (int i = 0; i < shift; ++i) lg -= std::log(x + i);
    return lg;
}

inline long double ld_gamma(long double x) { return std::exp(ld_log_gamma(x)); }

inline long double ld_bessel_i(long double nu, long double z) {
    const long double q = 0.25L * z * z;
    long double term = std::exp(nu * std::log(0.5L * z) - ld_log_gamma(nu + 1.0L));
    long double sum = term;
    for (int k = 0; k < 500; ++k) {
        term *= q / ((k + 1.0L) * (nu + k + 1.0L));
        sum += term;
        if (term < 1e-22L * sum) break;
    }
    return sum;
}

// I_{-nu} for non-integer nu (gamma at negative arguments via reflection).
inline long double ld_bessel_i_neg(long double nu, long double z) {
    const long double pi = 3.14159265358979323846264338327950288L;
    const long double q = 0.25L * z * z;
    long double g1mnu = pi / (std::sin(pi * (1.0L - nu)) * ld_gamma(nu));
    long double term = std::pow(0.5L * z, -nu) / g1mnu;
    long double sum = term;
    for (int k = 0; k < 500; ++k) {
        term *= q / ((k + 1.0L) * (k + 1.0L - nu));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return sum;
}

// Reflection formula; accurate for z up to a few (cancellation ~ e^{2z} eps).
inline long double ld_bessel_k(long double nu, long double z) {
    const long double pi = 3.14159265358979323846264338327950288L;
    return 0.5L * pi * (ld_bessel_i_neg(nu, z) - ld_bessel_i(nu, z)) / std::sin(pi * nu);
}

inline long double ld_bessel_j(long double nu, long double x) {
    const long double q = -0.25L * x * x;
    long double term = std::exp(nu * std::log(0.5L * x) - ld_log_gamma(nu + 1.0L));
    long double sum = term;
    for (int k = 0; k < 500; ++k) {
        term *= q / ((k + 1.0L) * (nu + k + 1.0L));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return sum;
}

// k-th positive zero by stepping plus bisection on the series evaluation
// (adequate for the small arguments exercised in tests).
inline long double ld_bessel_j_zero(long double nu, int k) {
    long double a = std::max(0.4L, nu), fa = ld_bessel_j(nu, a);
    int found = 0;
    long double lo = 0.0L, hi = 0.0L;
    for (int i = 0; i < 10000; ++i) {
        long double b = a + 0.25L, fb = ld_bessel_j(nu, b);
        if ((fa > 0.0L) != (fb > 0.0L)) {
            if (++found == k) {
                lo = a;
                hi = b;
                break;
            }
        }
        a = b;
        fa = fb;
    }
    if (hi == 0.0L) throw std::runtime_error("oracle zero bracket failed");
    long double flo = ld_bessel_j(nu, lo);
    for (int i = 0; i < 120; ++i) {
        long double mid = 0.5L * (lo + hi), fm = ld_bessel_j(nu, mid);
        if ((flo > 0.0L) != (fm > 0.0L))
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5L * (lo + hi);
}

}  // namespace oracles
