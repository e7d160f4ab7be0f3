#include "singdet/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "singdet/errors.hpp"

namespace singdet {

DiscretizedOperator discretize(const SingularProblem& p, const BoundaryPair& bc, double eps,
                               int n) {
    require_admissible(bc, p.nu);
    if (!(eps > 0.0 && eps <= 0.01)) throw UsageError("discretize requires eps in (0, 0.01]");
    if (n < 100) throw UsageError("discretize requires n >= 100");

    const double h = (1.0 - eps) / n;
    auto q = [&](double x) {
        return (p.nu * p.nu - 0.25) / (x * x) + potential_value(p, x) / x;
    };
    const double expo = mu0(bc.theta0, p.nu) + 0.5;
    const double gamma = std::pow(eps / (eps + h), expo);  // f(eps) = gamma f(eps')

    const bool robin = bc.theta1 > 0.0;
    const int m = robin ? n : n - 1;  // unknowns at x_1..x_{n-1} (+ x_n for Robin)
    DiscretizedOperator d{eps, n, std::vector<double>(m), std::vector<double>(m - 1)};

    for (int i = 1; i < n; ++i) {
        double xi = eps + i * h;
        d.diag[i - 1] = 2.0 / (h * h) + q(xi);
        if (i - 1 < m - 1) d.offdiag[i - 1] = -1.0 / (h * h);
    }
    // eliminate u_0 = gamma u_1 into the first row
    d.diag[0] = (2.0 - gamma) / (h * h) + q(eps + h);

    if (robin) {
        // half-cell mass at x_n = 1 symmetrized by u_n -> u_n / sqrt(2):
        // quadratic form (u_n - u_{n-1})^2/h + cot(theta1) u_n^2 + q_n u_n^2 h/2
        double cot = 1.0 / std::tan(bc.theta1);
        d.diag[m - 1] = 2.0 / (h * h) + q(1.0) + 2.0 * cot / h;
        d.offdiag[m - 2] = -std::sqrt(2.0) / (h * h);
    }
    return d;
}

namespace {

// number of eigenvalues of the tridiagonal matrix below sigma (LDL^T signs)
int sturm_count(const DiscretizedOperator& op, double sigma) {
    int count = 0;
    double d = 1.0;
    const std::size_t m = op.diag.size();
    for (std::size_t i = 0; i < m; ++i) {
        double b2 = (i == 0) ? 0.0 : op.offdiag[i - 1] * op.offdiag[i - 1];
        d = op.diag[i] - sigma - b2 / d;
        if (d == 0.0) d = 1e-300;
        if (d < 0.0) ++count;
    }
    return count;
}

}  // namespace

int count_below(const DiscretizedOperator& d, double threshold) {
    return sturm_count(d, threshold);
}

std::vector<double> lowest_eigs(const DiscretizedOperator& d, int count, Exec exec) {
    if (count < 1 || count > 10) throw UsageError("lowest_eigs requires 1 <= count <= 10");
    // Gershgorin bounds
    double lo = d.diag[0], hi = d.diag[0];
    const std::size_t m = d.diag.size();
    for (std::size_t i = 0; i < m; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(d.offdiag[i - 1]);
        if (i + 1 < m) r += std::abs(d.offdiag[i]);
        lo = std::min(lo, d.diag[i] - r);
        hi = std::max(hi, d.diag[i] + r);
    }
    std::vector<double> eigs(count);
    parallel_for(exec, static_cast<std::size_t>(count), [&](std::size_t k) {
        // k-th smallest: bisection on the count
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            double midpoint = 0.5 * (a + b);
            if (midpoint <= a || midpoint >= b) break;
            if (sturm_count(d, midpoint) >= static_cast<int>(k) + 1)
                b = midpoint;
            else
                a = midpoint;
            if (b - a <= 1e-12 * std::max(1.0, std::abs(b))) break;
        }
        eigs[k] = 0.5 * (a + b);
    });
    return eigs;
}

}  // namespace singdet
