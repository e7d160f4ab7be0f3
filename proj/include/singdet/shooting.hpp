#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "singdet/frobenius.hpp"
#include "singdet/problem.hpp"

namespace singdet {

// Log-scaled value pair: the solution at a point is e^{logscale} * (f, fp).
struct Scaled {
    double f = 0.0;
    double fp = 0.0;
    double logscale = 0.0;
};

struct TraceNode {
    double x, f, fp, logscale;
};

struct ShootOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    double x_match = 0.1;
    double series_tol = 1e-12;
};

// Fundamental system near 0 shared by phi and the psi decomposition.  For
// theta0 > 0 at a nonzero shift, `kappa` carries the g1-admixture of this
// g2 relative to the unshifted convention (the boundary condition at the
// singular end is pinned by the z = 0 fundamental system; a shifted g2
// differs from it by kappa * g1, which would silently rotate the boundary
// angle if ignored).
struct HeadBasis {
    SingularHead g1;
    std::optional<SingularHead> g2;  // absent for nu = 0
    double x_h = 0.0;                // common hand-off point (panel endpoint)
    double kappa = 0.0;
};
HeadBasis build_basis(const SingularProblem& p, double z, const ShootOptions& opts);

// As build_basis, plus the kappa anchoring when bc.theta0 > 0 and z != 0.
HeadBasis build_basis_anchored(const SingularProblem& p, const BoundaryPair& bc, double z,
                               const ShootOptions& opts);

// A solution of (H + z) g = 0 on (0, 1], stored as a singular-series head
// glued to an adaptively propagated trace on [x_h, 1], with overflow-safe
// log scaling.
class NormalizedSolution {
public:
    double z() const;
    double x_match() const;                      // head/trace hand-off
    Scaled eval(double x) const;                 // any x in (0, 1]
    const std::vector<TraceNode>& trace() const;

    // head-basis coefficients: solution = e^{coeff_logscale}(c1 g1 + c2 g2)
    // on (0, x_h]; throws for a psi with no basis decomposition (nu = 0).
    void head_coefficients(double& c1, double& c2, double& coeff_logscale) const;
    bool has_head_coefficients() const;

    struct Impl;
    std::shared_ptr<const Impl> impl;
};

// Solution normalized at the singular end: phi ~ x^{mu0 + 1/2} as x -> 0 and
// B_{0,theta0} phi = 0; propagated across [x_h, 1].
NormalizedSolution normalized_phi(const SingularProblem& p, const BoundaryPair& bc, double z,
                                  const ShootOptions& opts = {});
NormalizedSolution normalized_phi(const SingularProblem& p, const BoundaryPair& bc, double z,
                                  const HeadBasis& basis, const ShootOptions& opts = {});

// Solution normalized at the regular end: psi ~ (1-x)^{mu1 + 1/2} as x -> 1,
// integrated backwards to x_low (never into the singular layer).
NormalizedSolution normalized_psi(const SingularProblem& p, const BoundaryPair& bc, double z,
                                  double x_low, const ShootOptions& opts = {});
NormalizedSolution normalized_psi(const SingularProblem& p, const BoundaryPair& bc, double z,
                                  const HeadBasis& basis, const ShootOptions& opts = {});

struct WronskianValue {
    double value = 0.0;     // mantissa; true Wronskian is value * e^{logscale}
    double logscale = 0.0;
    double constancy_dev = 0.0;
};

double log_abs(const WronskianValue& w);

// W(psi, phi) = psi phi' - psi' phi, evaluated at >= 5 interior points;
// the median is returned and the spread is enforced (Lagrange identity:
// W is constant in x for these operators).
WronskianValue wronskian(const NormalizedSolution& phi, const NormalizedSolution& psi);

struct SolutionPair {
    HeadBasis basis;
    NormalizedSolution phi, psi;
    WronskianValue w;
};
SolutionPair solve_pair(const SingularProblem& p, const BoundaryPair& bc, double z,
                        const ShootOptions& opts = {});

}  // namespace singdet
