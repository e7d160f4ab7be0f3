#include "singdet/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace singdet {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

// 8-point Gauss-Legendre on [-1, 1], for the class-check panels.
constexpr double kGx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                           0.9602898564975363};
constexpr double kGw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                           0.1012285362903763};

template <class F>
double gauss8(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += kGw[i] * (f(c - r * kGx[i]) + f(c + r * kGx[i]));
    return r * s;
}
}  // namespace

SingularProblem make_problem(double nu, Expr potential, double zshift) {
    if (!std::isfinite(nu) || nu < 0.0)
        throw UsageError("problem requires finite nu >= 0, got " + std::to_string(nu));
    SingularProblem p{nu, std::move(potential), zshift};
    // diagnostic grid: dyadic points toward 0 plus a uniform sweep
    for (int k = 1; k <= 40; ++k) (void)potential_value(p, std::ldexp(1.0, -k));
    for (int i = 0; i <= 19; ++i) (void)potential_value(p, 0.05 + 0.05 * i);
    return p;
}

SingularProblem shifted(const SingularProblem& p, double dz) {
    SingularProblem q = p;
    q.zshift += dz;
    return q;
}

BoundaryPair make_boundary(double theta0, double theta1) {
    auto snap = [](double t, const char* name) {
        if (!std::isfinite(t)) throw UsageError(std::string(name) + " must be finite");
        if (std::abs(t) < 1e-12) t = 0.0;
        if (t < 0.0 || t >= kPi)
            throw UsageError(std::string(name) + " must lie in [0, pi), got " + std::to_string(t));
        return t;
    };
    return BoundaryPair{snap(theta0, "theta0"), snap(theta1, "theta1")};
}

bool admissible(const BoundaryPair& bc, double nu) {
    return bc.theta0 == 0.0 || (nu > 0.0 && nu < 1.0);
}

void require_admissible(const BoundaryPair& bc, double nu) {
    if (admissible(bc, nu)) return;
    if (nu >= 1.0)
        throw UsageError("inadmissible boundary pair: theta0 > 0 requires nu < 1 "
                         "(the singular endpoint is limit point for nu >= 1)");
    throw UsageError("inadmissible boundary pair: theta0 > 0 with nu = 0 is not supported");
}

double mu0(double theta0, double nu) {
    require_admissible(BoundaryPair{theta0, 0.0}, nu);
    return theta0 == 0.0 ? nu : -nu;
}

double mu1(double theta1) { return theta1 == 0.0 ? 0.5 : -0.5; }

MuInvariants mu_invariants(const SingularProblem& p, const BoundaryPair& bc) {
    return MuInvariants{mu0(bc.theta0, p.nu), mu1(bc.theta1)};
}

ClassReport check_class(const SingularProblem& p) {
    ClassReport rep;
    auto integrand = [&](double x) { return std::abs(p.potential.eval(x) * std::log(x)); };
    double total = 0.0;
    std::vector<double> panels;
    try {
        for (int k = 0; k <= 40; ++k) {
            const double b = std::ldexp(1.0, -k), a = 0.5 * b;
            double v = gauss8(integrand, a, b);
            panels.push_back(v);
            total += v;
        }
    } catch (const EvalError& e) {
        rep.converged = false;
        rep.note = std::string("potential evaluation failed: ") + e.what();
        rep.panel_integrals = panels;
        return rep;
    }
    rep.integral_estimate = total;
    rep.panel_integrals = panels;
    // Contributions over [2^-k-1, 2^-k] must decay for |V log| to be
    // integrable; compare the innermost panels against their predecessors.
    int grow = 0;
    for (std::size_t k = panels.size() - 10; k + 1 < panels.size(); ++k)
        if (panels[k + 1] >= 0.98 * panels[k] && panels[k + 1] > 1e-14) ++grow;
    if (grow >= 8) {
        rep.converged = false;
        rep.note = "panel integrals of |V log x| do not decay toward 0; "
                   "integral appears divergent";
    }
    return rep;
}

ProblemFile parse_problem_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("problem file is not valid JSON: ") + e.what());
    }
    if (!j.contains("nu") || !j.contains("potential") || !j.contains("theta0") ||
        !j.contains("theta1"))
        throw UsageError("problem file must contain nu, potential, theta0, theta1");
    ProblemFile pf;
    try {
        pf.problem = make_problem(j.at("nu").get<double>(),
                                  Expr::parse(j.at("potential").get<std::string>()));
        pf.bc = make_boundary(j.at("theta0").get<double>(), j.at("theta1").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("problem file field has wrong type: ") + e.what());
    }
    if (j.contains("tol")) pf.tol = j.at("tol").get<double>();
    return pf;
}

ProblemFile load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open problem file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_json(ss.str());
}

}  // namespace singdet
