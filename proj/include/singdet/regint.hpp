#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "singdet/parallel.hpp"
#include "singdet/shooting.hpp"

namespace singdet {

// One declared term coefficient * x^exponent of an integrand's divergent
// part, for partie-finie regularization.
struct PowerTerm {
    double exponent;
    double coefficient;
};

// Divergent parts at both ends: at infinity exponents descend to -1, at zero
// they ascend to -1 (either list may be empty when the integral converges).
struct AsymptoticSpec {
    std::vector<PowerTerm> at_infinity;
    std::vector<PowerTerm> at_zero;
};

using Sampler = std::function<double(double)>;

struct RegIntOptions {
    double rel_tol = 1e-11;
    double abs_tol = 0.0;  // floor for noisy integrands
    // When `cutoff` is finite, the subtracted integrand is integrated only up
    // to it and the declared `tail_model` powers (exponents < -1) supply the
    // rest analytically; otherwise the tail is handled by a 1/x transform
    // with a decay check.
    double cutoff = std::numeric_limits<double>::infinity();
    std::vector<PowerTerm> tail_model;
    bool verify_c_independence = true;
    double c_check_tol = 1e-10;
};

// Regularized integral over [c, inf): integral of (f - declared terms) plus
// the closed-form partie-finie constants -coeff c^{a+1}/(a+1) (a != -1) and
// -coeff log c (a = -1).
double reg_integral_to_infinity(const Sampler& f, const std::vector<PowerTerm>& terms, double c,
                                const RegIntOptions& opts = {});

// Regularized integral over (0, c]: constants +coeff c^{b+1}/(b+1) (b < -1)
// and +coeff log c (b = -1); terms with exponent > -1 are integrated, not
// subtracted.
double reg_integral_from_zero(const Sampler& f, const std::vector<PowerTerm>& terms, double c,
                              const RegIntOptions& opts = {});

// Full partie-finie integral over (0, inf) split at c; independent of c by
// construction, which is verified internally at 2c.
double reg_integral(const Sampler& f, const AsymptoticSpec& spec, double c,
                    const RegIntOptions& opts = {});

// Tr (H + z)^{-1} = int_0^1 phi_z psi_z dx / W(psi_z, phi_z), the singular
// layer integrated against the series heads.
double resolvent_trace(const SingularProblem& p, const BoundaryPair& bc, double z,
                       const ShootOptions& opts = {});

std::vector<double> trace_batch(const SingularProblem& p, const BoundaryPair& bc,
                                const std::vector<double>& zs, Exec exec,
                                const ShootOptions& opts = {});

// Independent resolvent-trace oracle for V = 0 from the modified-Bessel
// kernel of the model operator, with the boundary factor beta(s) chosen so
// the kernel satisfies the theta1 condition at x = 1.  `z` is the spectral
// parameter (the kernel's argument is s = sqrt(z)).
double model_trace_oracle(double nu, double theta1, double z);

struct TraceFit {
    double a = 0.0;
    double b = 0.0;
    double residual = 0.0;  // max relative misfit over the samples
};

// Least-squares fit of Tr(H+z)^{-1} against a/sqrt(z) + b/z (plus a z^{-3/2}
// nuisance term); samples should span [1e2, 1e6] with at least 6 points.
TraceFit fit_trace_asymptotics(const SingularProblem& p, const BoundaryPair& bc,
                               const std::vector<double>& z_samples, Exec exec = Exec::OpenMP,
                               const ShootOptions& opts = {});

struct ContourOptions {
    double cutoff = 1e4;  // finite upper limit Z; fitted z^{-3/2}, z^{-2} tail
    std::vector<double> fit_samples;  // default: 12 points log-spaced 1e2..1e6
    // trace samples carry ~1e-9 relative noise; keep the quadrature above it
    double quad_rel_tol = 1e-7;
    double quad_abs_tol = 1e-9;
};

// Independent determinant: log det = -pf-integral of Tr(H+x)^{-1} over
// [0, inf), with the contour degenerated to the positive real axis (requires
// a strictly positive spectrum).
double zeta_det_contour(const SingularProblem& p, const BoundaryPair& bc,
                        Exec exec = Exec::OpenMP, const ShootOptions& opts = {},
                        const ContourOptions& copts = {});

}  // namespace singdet
