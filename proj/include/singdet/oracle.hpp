#pragma once

#include <vector>

#include "singdet/parallel.hpp"
#include "singdet/problem.hpp"

namespace singdet {

// Low-order validation eigensolver: second-order central differences on
// [eps, 1], the singular end closed by a row enforcing the normalized
// leading exponent f(eps) = (eps/eps')^{mu0 + 1/2} f(eps'), the regular end
// Dirichlet or a symmetrized Robin row.
struct DiscretizedOperator {
    double eps;
    int n;
    std::vector<double> diag;     // main diagonal
    std::vector<double> offdiag;  // superdiagonal, size diag.size() - 1
};

DiscretizedOperator discretize(const SingularProblem& p, const BoundaryPair& bc, double eps,
                               int n);

// Smallest `count` eigenvalues by bisection on the Sturm sign-count;
// deterministic, parallel over the eigenvalue index.
std::vector<double> lowest_eigs(const DiscretizedOperator& d, int count,
                                Exec exec = Exec::OpenMP);

// Number of eigenvalues strictly below `threshold` (Sturm count).
int count_below(const DiscretizedOperator& d, double threshold);

}  // namespace singdet
