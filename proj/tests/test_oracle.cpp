#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "singdet/determinant.hpp"
#include "singdet/oracle.hpp"
#include "singdet/specfun.hpp"

using namespace singdet;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

TEST_CASE("discretized model spectra") {
    auto DD = make_boundary(0.0, 0.0);
    auto p5 = make_problem(0.5, Expr::parse("0"));
    auto d = discretize(p5, DD, 1e-4, 4000);
    auto e = lowest_eigs(d, 2);
    CHECK(e[0] == doctest::Approx(kPi * kPi).epsilon(1e-3));
    CHECK(e[1] == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-3));

    auto p3 = make_problem(0.3, Expr::parse("0"));
    auto e3 = lowest_eigs(discretize(p3, DD, 1e-4, 4000), 1);
    double j = specfun::bessel_j_zero(specfun::Order(0.3), 1);
    CHECK(e3[0] == doctest::Approx(j * j).epsilon(5e-3));

    auto en = lowest_eigs(discretize(p5, make_boundary(0.0, kPi / 2.0), 1e-4, 4000), 1);
    CHECK(en[0] == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-3));
}

TEST_CASE("truncation row exponents") {
    // theta0 = pi/2 encodes the leading exponent mu0 + 1/2 = 0.2 into the
    // eliminated corner entry: diag[0] = (2 - gamma)/h^2 + q(eps + h)
    auto p = make_problem(0.3, Expr::parse("0"));
    auto bc = make_boundary(kPi / 2.0, 0.0);
    const double eps = 1e-4;
    const int n = 4000;
    auto dr = discretize(p, bc, eps, n);
    const double h = (1.0 - eps) / n;
    const double x1 = eps + h;
    double q1 = (0.09 - 0.25) / (x1 * x1);
    double gamma = 2.0 + h * h * q1 - dr.diag[0] * h * h;
    CHECK(gamma == doctest::Approx(std::pow(eps / (eps + h), 0.2)).epsilon(1e-12));

    // limit point case nu = 1.5: exponent 2.0, Dirichlet only
    auto p15 = make_problem(1.5, Expr::parse("0"));
    auto d15 = discretize(p15, make_boundary(0.0, 0.0), eps, n);
    double q15 = (1.5 * 1.5 - 0.25) / (x1 * x1);
    double g15 = 2.0 + h * h * q15 - d15.diag[0] * h * h;
    CHECK(g15 == doctest::Approx(std::pow(eps / (eps + h), 2.0)).epsilon(1e-12));
    auto e15 = lowest_eigs(d15, 1);
    double j = specfun::bessel_j_zero(specfun::Order(1.5), 1);
    CHECK(e15[0] == doctest::Approx(j * j).epsilon(5e-3));
}

TEST_CASE("second-order convergence") {
    auto DD = make_boundary(0.0, 0.0);
    auto p = make_problem(0.5, Expr::parse("0"));
    auto e1 = lowest_eigs(discretize(p, DD, 1e-4, 2000), 1);
    auto e2 = lowest_eigs(discretize(p, DD, 1e-4, 4000), 1);
    double err1 = std::abs(e1[0] - kPi * kPi), err2 = std::abs(e2[0] - kPi * kPi);
    CHECK(err1 / err2 >= 3.0);
}

TEST_CASE("sturm count matches the wronskian sign changes") {
    auto DD = make_boundary(0.0, 0.0);
    auto p = make_problem(0.3, Expr::parse("x"));
    EigenList list = eigenvalues(p, DD, 4, 300.0);
    REQUIRE(list.values.size() == 4);
    double threshold = 0.5 * (list.values[2].lambda + list.values[3].lambda);
    auto d = discretize(p, DD, 1e-4, 4000);
    CHECK(count_below(d, threshold) == 3);
}

TEST_CASE("parameter validation") {
    auto p = make_problem(0.5, Expr::parse("0"));
    auto DD = make_boundary(0.0, 0.0);
    CHECK_THROWS_AS(discretize(p, DD, 0.05, 4000), UsageError);
    CHECK_THROWS_AS(discretize(p, DD, 1e-4, 50), UsageError);
    auto d = discretize(p, DD, 1e-4, 400);
    CHECK_THROWS_AS(lowest_eigs(d, 11), UsageError);
}
