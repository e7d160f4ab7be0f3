#pragma once

#include <memory>
#include <vector>

#include "singdet/problem.hpp"

namespace singdet {

namespace detail {
struct HeadData;
}

// One fundamental solution of (H)g = 0 near the singular endpoint, stored as
//     g(x) = prefactor * x^exponent * gt(x),        0 < x <= x_match,
// with gt(0) = 1.  The regular factor gt and its derivative are collocated on
// dyadic panels accumulating at 0; `tail_bound` is the certified sup-norm
// bound on the truncation of the fixed-point iteration that produced it.
class SingularHead {
public:
    double exponent() const;
    double prefactor() const;
    double x_match() const;
    double tail_bound() const;

    double gt(double x) const;
    double gt_prime(double x) const;

    double value(double x) const;  // prefactor * x^exponent * gt(x)
    double deriv(double x) const;

    std::shared_ptr<const detail::HeadData> data;  // internal
};

// First solution g1(x) = x^{nu+1/2}(1 + phi), phi built by the Volterra
// fixed-point iteration phi <- K_nu V (1 + phi); x_match is halved
// automatically until the factorial tail bound certifies `tol` within the
// iteration cap.  nu = 0 uses the logarithmic kernel.
SingularHead build_g1(const SingularProblem& p, double x_match, double tol);

// Second solution by reduction of order, pinned so that gt2 == 1 when V == 0;
// requires nu > 0.  Defined up to the solution's x_match = x0, the largest
// panel endpoint where |gt1| stays >= 1/2 below it.  The Wronskian
// g1 g2' - g1' g2 = 1 is verified on the grid.
SingularHead build_g2(const SingularProblem& p, const SingularHead& g1, double tol);

// int_0^upto a(x) b(x) dx for two heads on the same grid; upto must be a
// panel endpoint <= min(x_match).  The combined power exponent must
// exceed -1.
double head_pair_integral(const SingularHead& a, const SingularHead& b, double upto);

// g1 for a second potential on exactly the grid of `grid_donor` (no x_match
// adaptation); used to anchor the g2 convention across spectral shifts.
SingularHead build_g1_on(const SingularProblem& p, const SingularHead& grid_donor, double tol);

// rho := (gt1^{-2})' = -2 gt1' / gt1^3 enters the g1-admixture bookkeeping of
// the second solution.  Both endpoints must be panel endpoints of the head's
// grid; `a` may be below `b` or above it (signed integral).
double rho_weighted_integral(const SingularHead& g1, double a, double b);

// int_0^upto y^{-2 nu} (rho_z - rho_0) dy for two g1 heads sharing one grid;
// the difference is integrable down to 0 (each term alone need not be) and
// the below-grid stub is added from the measured linear slope.
double rho_difference_integral(const SingularHead& g1z, const SingularHead& g10, double upto);

}  // namespace singdet
