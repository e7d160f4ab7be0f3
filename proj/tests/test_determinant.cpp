#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "singdet/determinant.hpp"
#include "singdet/regint.hpp"
#include "singdet/specfun.hpp"

using namespace singdet;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

double model_det(double nu) {
    // sqrt(2 pi) / (2^nu Gamma(nu+1)), from the extended-precision oracle
    long double pi = 3.14159265358979323846264338327950288L;
    return static_cast<double>(std::sqrt(2.0L * pi) /
                               (std::pow(2.0L, (long double)nu) * oracles::ld_gamma(nu + 1.0L)));
}
}  // namespace

TEST_CASE("model determinants") {
    auto DD = make_boundary(0.0, 0.0);
    CHECK(zeta_det(make_problem(0.5, Expr::parse("0")), DD).value ==
          doctest::Approx(2.0).epsilon(1e-9));
    CHECK(zeta_det(make_problem(0.3, Expr::parse("0")), DD).value ==
          doctest::Approx(model_det(0.3)).epsilon(1e-9));
    // explicit zero mode: f = x satisfies f'(1) = f(1)
    CHECK(std::abs(zeta_det(make_problem(0.5, Expr::parse("0")),
                            make_boundary(0.0, 3.0 * kPi / 4.0))
                       .value) < 1e-10);
}

TEST_CASE("characteristic function examples") {
    auto DD = make_boundary(0.0, 0.0);
    auto p = make_problem(0.5, Expr::parse("0"));
    CHECK(char_function(p, DD, 1.0).value ==
          doctest::Approx(2.3504023872876028).epsilon(1e-10));
    CHECK(std::abs(char_function(p, DD, -kPi * kPi).value) < 1e-8);
    CHECK(char_function(p, DD, 0.0).value ==
          doctest::Approx(zeta_det(p, DD).value).epsilon(1e-12));
}

TEST_CASE("model symmetry det(H+z) = 2 sinh(sqrt z)/sqrt z") {
    auto DD = make_boundary(0.0, 0.0);
    auto p = make_problem(0.5, Expr::parse("0"));
    for (double z : {0.5, 1.0, 4.0, 25.0}) {
        double ref = 2.0 * std::sinh(std::sqrt(z)) / std::sqrt(z);
        CHECK(char_function(p, DD, z).value == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("gamma prefactor identity") {
    auto DD = make_boundary(0.0, 0.0);
    for (double nu : {0.1, 0.3, 0.5, 1.2, 2.5}) {
        DetResult r = zeta_det(make_problem(nu, Expr::parse("0")), DD);
        CHECK(std::abs(r.prefactor - model_det(nu)) <= 1e-12 * model_det(nu));
    }
}

TEST_CASE("eigenvalues of the models") {
    auto DD = make_boundary(0.0, 0.0);
    EigenList e = eigenvalues(make_problem(0.5, Expr::parse("0")), DD, 3, 200.0);
    REQUIRE(e.values.size() == 3);
    for (int k = 0; k < 3; ++k) {
        double ref = (k + 1.0) * (k + 1.0) * kPi * kPi;
        CHECK(e.values[k].lambda == doctest::Approx(ref).epsilon(1e-9));
        CHECK(e.values[k].residual < 1e-9);
        CHECK(e.values[k].bracket_lo <= e.values[k].lambda);
        CHECK(e.values[k].lambda <= e.values[k].bracket_hi);
    }

    EigenList e3 = eigenvalues(make_problem(0.3, Expr::parse("0")), DD, 3, 300.0);
    for (int k = 0; k < 3; ++k) {
        double j = specfun::bessel_j_zero(specfun::Order(0.3), k + 1);
        CHECK(e3.values[k].lambda == doctest::Approx(j * j).epsilon(1e-8));
    }

    EigenList en = eigenvalues(make_problem(0.5, Expr::parse("0")),
                               make_boundary(0.0, kPi / 2.0), 2, 50.0);
    CHECK(en.values[0].lambda == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-9));
    CHECK(en.values[1].lambda == doctest::Approx(9.0 * kPi * kPi / 4.0).epsilon(1e-9));
}

TEST_CASE("zero set matches the characteristic function") {
    auto DD = make_boundary(0.0, 0.0);
    auto p = make_problem(0.3, Expr::parse("sin(x)"));
    EigenList e = eigenvalues(p, DD, 2, 100.0);
    REQUIRE(e.values.size() == 2);
    for (const auto& ev : e.values) {
        DetResult at = char_function(p, DD, -ev.lambda);
        // |det| at the located zero is tiny against the local scale
        DetResult off = char_function(p, DD, -ev.lambda + 0.1);
        CHECK(std::abs(at.value) < 1e-7 * std::abs(off.value));
    }
}

TEST_CASE("partial eigenvalue lists are flagged") {
    auto DD = make_boundary(0.0, 0.0);
    EigenList e = eigenvalues(make_problem(0.5, Expr::parse("0")), DD, 6, 100.0);
    CHECK_FALSE(e.complete);
    CHECK(e.values.size() == 3);  // pi^2, 4 pi^2, 9 pi^2 < 100
}

TEST_CASE("factorization wronskian ratios") {
    for (auto [nu, z] : {std::pair{0.3, 1.0}, {0.3, 2.0}, {0.7, 1.0}}) {
        for (const char* wt : {"1", "exp(x)"}) {
            FactorReport r = factor_check(nu, Expr::parse(wt), z);
            CHECK(r.ratio_case1 ==
                  doctest::Approx(r.expected_case1).epsilon(1e-6));
            CHECK(r.ratio_case2 ==
                  doctest::Approx(r.expected_case2).epsilon(1e-6));
            CHECK(r.expected_case1 == z / (2.0 - 2.0 * nu));
            CHECK(r.expected_case2 == 1.0 / (2.0 - 2.0 * nu));
        }
    }
}

TEST_CASE("factor_check rejects bad inputs") {
    CHECK_THROWS_AS(factor_check(1.5, Expr::parse("1"), 1.0), UsageError);
    CHECK_THROWS_AS(factor_check(0.3, Expr::parse("x - 0.5"), 1.0), UsageError);
}

TEST_CASE("variation identities") {
    auto DD = make_boundary(0.0, 0.0);
    auto p3 = make_problem(0.3, Expr::parse("0"));

    VariationReport zero = variation_check(p3, DD, Expr::parse("0"), 1e-4);
    CHECK(std::abs(zero.d_log_det) < 1e-12);
    CHECK(std::abs(zero.d_log_w) < 1e-12);

    auto p5 = make_problem(0.5, Expr::parse("0"));
    VariationReport unit = variation_check(p5, DD, Expr::parse("1"), 1e-4);
    CHECK(unit.d_log_det == doctest::Approx(1.0 / 6.0).epsilon(1e-5));
    CHECK(unit.gap < 1e-6);
    // independent route: d/deta log det at w = 1 equals Tr H^{-1}
    CHECK(unit.d_log_det ==
          doctest::Approx(resolvent_trace(p5, DD, 0.0)).epsilon(1e-5));

    VariationReport s = variation_check(p3, DD, Expr::parse("sin(x)"), 1e-4);
    CHECK(s.gap < 1e-6);
}

TEST_CASE("variation stencil through a zero mode is rejected") {
    auto p = make_problem(0.5, Expr::parse("0"));
    CHECK_THROWS_AS(
        variation_check(p, make_boundary(0.0, 3.0 * kPi / 4.0), Expr::parse("1"), 1e-4),
        NumericalError);
}

TEST_CASE("determinant gates") {
    CHECK_THROWS_AS(zeta_det(make_problem(0.0, Expr::parse("0")), BoundaryPair{0.5, 0.0}),
                    UsageError);
    CHECK_THROWS_AS(zeta_det(make_problem(1.2, Expr::parse("0")), BoundaryPair{0.5, 0.0}),
                    UsageError);
    // nu = 0 with the Friedrichs condition at 0 is supported
    CHECK(zeta_det(make_problem(0.0, Expr::parse("0")), make_boundary(0.0, 0.0)).value ==
          doctest::Approx(2.5066282746310005).epsilon(1e-8));
}
