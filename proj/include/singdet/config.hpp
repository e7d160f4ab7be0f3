#pragma once

#include <string>

namespace singdet {

// Numerical defaults shared across the pipeline.  `singdet --show-config`
// dumps these for reproducibility.
struct Settings {
    // Frobenius head: initial matching point and certified series tolerance.
    double x_match = 0.1;
    double series_tol = 1e-12;
    int max_volterra_iters = 12;

    // Adaptive Runge-Kutta propagation on [x_match, 1].
    double rk_rel_tol = 1e-10;
    double rk_abs_tol = 1e-14;

    // Wronskian evaluation.
    int wronskian_points = 5;
    double wronskian_constancy_tol = 1e-6;

    // Quadrature (resolvent traces, regularized integrals).
    double quad_rel_tol = 1e-11;

    // Contour determinant: finite cutoff Z with fitted power-law tail.
    double contour_cutoff = 1e4;

    // Finite-difference eigenvalue oracle.
    double oracle_eps = 1e-4;
    int oracle_n = 4000;

    // Eigenvalue scan floor (catches moderately negative spectra).
    double eigen_scan_min = -25.0;

    // Scale every tolerance by t/series_tol; used by the --tol flag.
    void scale_tolerances(double t);

    std::string dump() const;
};

}  // namespace singdet
