#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "singdet/cli.hpp"
#include "singdet/determinant.hpp"

using namespace singdet;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

// run the CLI with stdout redirected to a buffer
int run_captured(const std::vector<std::string>& args, std::string& out) {
    std::fflush(stdout);
    int saved = dup(1);
    const char* path = "/tmp/singdet_cli_capture.txt";
    FILE* f = std::fopen(path, "w");
    REQUIRE(f != nullptr);
    dup2(fileno(f), 1);
    int code = cli::run(args);
    std::fflush(stdout);
    dup2(saved, 1);
    close(saved);
    std::fclose(f);
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return code;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}
}  // namespace

TEST_CASE("det command prints the model determinant") {
    std::string out;
    int code = run_captured({"det", "--nu", "0.5", "--potential", "0", "--theta0", "0",
                             "--theta1", "0"},
                            out);
    CHECK(code == 0);
    double v = 0.0;
    REQUIRE(std::sscanf(out.c_str(), "det       = %lf", &v) == 1);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("eig command lists bessel-zero squares") {
    std::string out;
    int code = run_captured(
        {"eig", "--nu", "0.3", "--potential", "0", "--theta0", "0", "--theta1", "0",
         "--count", "3"},
        out);
    CHECK(code == 0);
    std::stringstream ss(out);
    std::string header;
    std::getline(ss, header);
    int k;
    double lambda, lo, hi, resid;
    int rows = 0;
    while (ss >> k >> lambda >> lo >> hi >> resid) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("check command reports class and admissibility") {
    std::string out;
    int code = run_captured({"check", "--nu", "0.3", "--potential", "x^0.5", "--theta0", "0",
                             "--theta1", "0"},
                            out);
    CHECK(code == 0);
    CHECK(out.find("admissible") != std::string::npos);
    CHECK(out.find("pass") != std::string::npos);
    code = run_captured({"check", "--nu", "0.3", "--potential", "1/x"}, out);
    CHECK(code == 0);  // class check is advisory
    CHECK(out.find("FAIL (advisory)") != std::string::npos);
}

TEST_CASE("scan sweep matches the closed form and round-trips through CSV") {
    const char* csv = "/tmp/singdet_scan_test.csv";
    std::string out;
    int code = run_captured({"scan", "--nu", "0.5", "--potential", "0", "--theta0", "0",
                             "--theta1-grid", "0.5:2.5:6", "--out", csv},
                            out);
    CHECK(code == 0);
    auto rows = read_csv(csv);
    REQUIRE(rows.size() == 7);  // header + 6
    CHECK(rows[0][0] == "theta1");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 6);
        CHECK(rows[i][5] == "ok");
        double theta1 = std::strtod(rows[i][0].c_str(), nullptr);
        double det_csv = std::strtod(rows[i][1].c_str(), nullptr);
        // closed form det = 2 (1 + cot theta1)
        CHECK(det_csv ==
              doctest::Approx(2.0 * (1.0 + 1.0 / std::tan(theta1))).epsilon(1e-8));
        // bit-for-bit round trip against a direct computation
        DetResult direct = zeta_det(make_problem(0.5, Expr::parse("0")),
                                    make_boundary(0.0, theta1));
        CHECK(det_csv == direct.value);
    }
}

TEST_CASE("scan marks failed rows and keeps going") {
    const char* csv = "/tmp/singdet_scan_err.csv";
    std::string out;
    int code = run_captured({"scan", "--nu", "0.5", "--potential", "0",
                             "--theta1-grid", "2.8:3.3:3", "--out", csv},
                            out);
    CHECK(code == 0);
    auto rows = read_csv(csv);
    REQUIRE(rows.size() == 4);
    CHECK(rows[1][5] == "ok");                       // theta1 = 2.8
    CHECK(rows[3][5].find("error") == 0);            // theta1 = 3.3 out of range
}

TEST_CASE("problem files load and inline flags override") {
    const char* path = "/tmp/singdet_prob.json";
    {
        std::ofstream f(path);
        f << R"({"nu": 0.3, "potential": "0", "theta0": 0, "theta1": 0})";
    }
    std::string out;
    int code = run_captured({"det", "--file", path}, out);
    CHECK(code == 0);
    CHECK(out.find("mu0 = 0.3") != std::string::npos);
    code = run_captured({"det", "--file", path, "--nu", "0.5"}, out);
    CHECK(code == 0);
    CHECK(out.find("mu0 = 0.5") != std::string::npos);
}

TEST_CASE("show-config dumps the defaults") {
    std::string out;
    int code = run_captured({"--show-config"}, out);
    CHECK(code == 0);
    CHECK(out.find("x_match") != std::string::npos);
    CHECK(out.find("0.1") != std::string::npos);
    CHECK(out.find("contour_cutoff") != std::string::npos);
    CHECK(out.find("oracle_n") != std::string::npos);
}

TEST_CASE("exit code contract") {
    std::string out;
    // usage errors -> 1
    CHECK(run_captured({"det", "--bogus-flag", "1"}, out) == 1);
    CHECK(run_captured({"det", "--nu", "1.5", "--theta0", "0.5"}, out) == 1);
    CHECK(run_captured({"det", "--potential", "sin("}, out) == 1);
    CHECK(run_captured({"det", "--potential", "2*y"}, out) == 1);
    CHECK(run_captured({"scan", "--nu", "0.5"}, out) == 1);  // no grid given
    CHECK(run_captured({"det", "--file", "/nonexistent.json"}, out) == 1);
    // numerical failures -> 2
    CHECK(run_captured({"contour", "--nu", "0.5", "--potential", "-12*x"}, out) == 2);
}
