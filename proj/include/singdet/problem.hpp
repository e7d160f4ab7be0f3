#pragma once

#include <optional>
#include <string>
#include <vector>

#include "singdet/expr.hpp"

namespace singdet {

// The operator under study: -d^2/dx^2 + (nu^2 - 1/4)/x^2 + V(x)/x on (0, 1),
// with a spectral shift z folded into the potential as V + z*x.
struct SingularProblem {
    double nu = 0.5;
    Expr potential;      // V, the numerator of V(x)/x
    double zshift = 0.0; // effective potential is V(x) + zshift*x
};

// Validates nu and checks that the potential evaluates finitely on a
// diagnostic grid clustering at the singular endpoint.
SingularProblem make_problem(double nu, Expr potential, double zshift = 0.0);

inline double potential_value(const SingularProblem& p, double x) {
    return p.potential.eval(x) + p.zshift * x;
}

SingularProblem shifted(const SingularProblem& p, double dz);

// Separated boundary conditions: angle theta0 at the singular end (Dirichlet
// for theta0 = 0), theta1 at the regular end.  Angles in radians, [0, pi);
// values within 1e-12 of 0 snap to exactly 0.
struct BoundaryPair {
    double theta0 = 0.0;
    double theta1 = 0.0;
};

BoundaryPair make_boundary(double theta0, double theta1);

// theta0 > 0 is available only in the limit circle regime 0 < nu < 1.
bool admissible(const BoundaryPair& bc, double nu);
void require_admissible(const BoundaryPair& bc, double nu);

// Invariants of the boundary operators entering the determinant prefactor.
double mu0(double theta0, double nu);
double mu1(double theta1);

struct MuInvariants {
    double mu0;
    double mu1;
};
MuInvariants mu_invariants(const SingularProblem& p, const BoundaryPair& bc);

// Advisory potential-class check: estimates int_0^1 |V log x| dx on dyadic
// panels and flags failure of the panel contributions to decay.
struct ClassReport {
    double integral_estimate = 0.0;
    bool converged = true;
    std::string note;
    std::vector<double> panel_integrals;  // innermost last
};
ClassReport check_class(const SingularProblem& p);

// Problem files: {"nu": number, "potential": string, "theta0": number,
// "theta1": number} plus optional {"tol": number}.
struct ProblemFile {
    SingularProblem problem;
    BoundaryPair bc;
    std::optional<double> tol;
};
ProblemFile load_problem_file(const std::string& path);
ProblemFile parse_problem_json(const std::string& text);

}  // namespace singdet
