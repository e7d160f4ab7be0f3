#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "singdet/problem.hpp"

using namespace singdet;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

TEST_CASE("parser examples") {
    CHECK(Expr::parse("0").eval(0.7) == 0.0);
    CHECK(Expr::parse("x^2 - 1").eval(0.5) == doctest::Approx(-0.75).epsilon(1e-15));
    // sin(1) e^{-1}
    CHECK(Expr::parse("sin(x)*exp(-x)").eval(1.0) ==
          doctest::Approx(0.3095598756531122).epsilon(1e-14));
}

TEST_CASE("precedence and associativity") {
    CHECK(Expr::parse("2^3^2").eval(0.0) == 512.0);          // right-assoc
    CHECK(Expr::parse("-x^2").eval(2.0) == -4.0);            // unary minus below ^
    CHECK(Expr::parse("x^-0.5").eval(4.0) == 0.5);           // exponent may be signed
    CHECK(Expr::parse("1 - 2 - 3").eval(0.0) == -4.0);       // left-assoc
    CHECK(Expr::parse("2*x^2").eval(3.0) == 18.0);
    CHECK(Expr::parse("6/2/3").eval(0.0) == 1.0);
    CHECK(Expr::parse("1 + 2*3").eval(0.0) == 7.0);
}

TEST_CASE("parse errors carry byte offsets") {
    CHECK_THROWS_AS(Expr::parse("x +"), ParseError);
    try {
        Expr::parse("x + foo(x)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
    try {
        Expr::parse("sin x");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset >= 3);
    }
    CHECK_THROWS_AS(Expr::parse("(x"), ParseError);
    CHECK_THROWS_AS(Expr::parse("x x"), ParseError);
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(Expr::parse("log(x - 2)").eval(1.0), EvalError);
    CHECK_THROWS_AS(Expr::parse("1/x").eval(0.0), EvalError);
    CHECK_THROWS_AS(Expr::parse("sqrt(-1 - x)").eval(0.5), EvalError);
}

TEST_CASE("parse -> serialize -> parse is idempotent") {
    for (const char* src : {"0", "x^2 - 1", "sin(x)*exp(-x)", "-x^2 + 3/(x - 2)",
                            "sqrt(x)*log(x) - cos(x^2)", "2^3^x", "-(x + 1)*(x - 1)",
                            "x^-0.5 + 1e-3*x"}) {
        Expr a = Expr::parse(src);
        std::string s1 = a.to_string();
        Expr b = Expr::parse(s1);
        CHECK(a.equals(b));
        CHECK(b.to_string() == s1);
        for (double x : {0.3, 0.7, 0.9}) {
            bool a_ok = true, b_ok = true;
            double va = 0, vb = 0;
            try { va = a.eval(x); } catch (const EvalError&) { a_ok = false; }
            try { vb = b.eval(x); } catch (const EvalError&) { b_ok = false; }
            CHECK(a_ok == b_ok);
            if (a_ok) CHECK(va == vb);
        }
    }
}

TEST_CASE("symbolic derivative matches finite differences") {
    for (const char* src : {"sin(x)*exp(-x)", "x^2.5", "x^x", "sqrt(x)/(1 + x^2)",
                            "log(x)*cos(x)"}) {
        Expr f = Expr::parse(src);
        Expr df = f.derivative();
        for (double x : {0.3, 0.7, 1.3}) {
            double h = 1e-6;
            double fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            CHECK(df.eval(x) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("problem construction and diagnostics grid") {
    SingularProblem p = make_problem(0.3, Expr::parse("x^0.5"));
    CHECK(potential_value(p, 0.25) == doctest::Approx(0.5));
    SingularProblem ps = shifted(p, 2.0);
    CHECK(potential_value(ps, 0.25) == doctest::Approx(0.5 + 0.5));
    CHECK_THROWS_AS(make_problem(-0.5, Expr::parse("0")), UsageError);
    // log(x - 0.5) is undefined on the dyadic diagnostic points
    CHECK_THROWS_AS(make_problem(0.3, Expr::parse("log(x - 0.5)")), EvalError);
}

TEST_CASE("check_class examples") {
    CHECK(check_class(make_problem(0.3, Expr::parse("0"))).converged);
    CHECK(check_class(make_problem(0.3, Expr::parse("0"))).integral_estimate == 0.0);
    CHECK(check_class(make_problem(0.3, Expr::parse("x^0.5"))).converged);
    ClassReport bad = check_class(make_problem(0.3, Expr::parse("1/x")));
    CHECK_FALSE(bad.converged);
}

TEST_CASE("mu invariants") {
    CHECK(mu0(0.0, 0.3) == 0.3);
    CHECK(mu0(kPi / 2.0, 0.3) == -0.3);
    CHECK(mu0(0.0, 1.5) == 1.5);
    CHECK(mu1(0.0) == 0.5);
    CHECK(mu1(kPi / 2.0) == -0.5);
    CHECK(mu1(3.0 * kPi / 4.0) == -0.5);
}

TEST_CASE("admissibility rules") {
    CHECK(admissible(BoundaryPair{0.0, 1.0}, 2.5));
    CHECK_FALSE(admissible(BoundaryPair{0.5, 0.0}, 1.0));
    CHECK_FALSE(admissible(BoundaryPair{0.5, 0.0}, 1.5));
    CHECK_FALSE(admissible(BoundaryPair{0.5, 0.0}, 0.0));
    CHECK(admissible(BoundaryPair{0.5, 0.0}, 0.5));
    CHECK_THROWS_AS(mu0(0.5, 1.5), UsageError);
    CHECK_THROWS_AS(require_admissible(BoundaryPair{0.5, 0.0}, 0.0), UsageError);
}

TEST_CASE("boundary snapping and range") {
    CHECK(make_boundary(1e-13, 0.0).theta0 == 0.0);
    CHECK(make_boundary(0.0, -1e-14).theta1 == 0.0);
    CHECK_THROWS_AS(make_boundary(kPi, 0.0), UsageError);
    CHECK_THROWS_AS(make_boundary(0.0, -0.1), UsageError);
}

TEST_CASE("problem files") {
    ProblemFile pf = parse_problem_json(
        R"json({"nu": 0.3, "potential": "sin(x)", "theta0": 0, "theta1": 1.5707963, "tol": 1e-10})json");
    CHECK(pf.problem.nu == 0.3);
    CHECK(pf.bc.theta1 == doctest::Approx(1.5707963));
    CHECK(pf.tol.has_value());
    CHECK(*pf.tol == 1e-10);
    CHECK_THROWS_AS(parse_problem_json(R"json({"nu": 0.3})json"), UsageError);
    CHECK_THROWS_AS(parse_problem_json("not json"), UsageError);
    CHECK_THROWS_AS(load_problem_file("/nonexistent/prob.json"), UsageError);
}
