// Benchmark of the OpenMP batch kernels against their serial reference:
// the eigenvalue-scan Wronskian batch, the resolvent-trace batch and the
// Sturm-bisection eigensolver.  The two paths must agree exactly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "singdet/determinant.hpp"
#include "singdet/oracle.hpp"
#include "singdet/regint.hpp"

using namespace singdet;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

template <class F>
double timed(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return ms_since(t0);
}

void report(const char* name, double serial_ms, double omp_ms, bool identical) {
    std::printf("%-24s %10.1f ms %10.1f ms   x%.2f   %s\n", name, serial_ms, omp_ms,
                serial_ms / omp_ms, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads: %d\n", hardware_threads());
    std::printf("%-24s %13s %13s %7s\n", "kernel", "serial", "openmp", "speedup");

    {
        auto p = make_problem(0.3, Expr::parse("sin(x)"));
        auto bc = make_boundary(0.0, 0.0);
        std::vector<double> zs;
        for (int i = 0; i < 48; ++i) zs.push_back(-2.0 * i);
        std::vector<WronskianValue> a, b;
        double ts = timed([&] { a = wronskian_batch(p, bc, zs, Exec::Serial); });
        double tp = timed([&] { b = wronskian_batch(p, bc, zs, Exec::OpenMP); });
        bool same = true;
        for (std::size_t i = 0; i < zs.size(); ++i)
            same = same && a[i].value == b[i].value && a[i].logscale == b[i].logscale;
        report("wronskian_batch", ts, tp, same);
    }

    {
        auto p = make_problem(0.3, Expr::parse("x"));
        auto bc = make_boundary(0.0, 0.0);
        std::vector<double> zs;
        for (int i = 0; i < 24; ++i) zs.push_back(1e2 * std::pow(10.0, i / 8.0));
        std::vector<double> a, b;
        double ts = timed([&] { a = trace_batch(p, bc, zs, Exec::Serial); });
        double tp = timed([&] { b = trace_batch(p, bc, zs, Exec::OpenMP); });
        report("trace_batch", ts, tp, a == b);
    }

    {
        auto p = make_problem(0.5, Expr::parse("sin(x)"));
        auto d = discretize(p, make_boundary(0.0, 0.0), 1e-4, 20000);
        std::vector<double> a, b;
        double ts = timed([&] { a = lowest_eigs(d, 10, Exec::Serial); });
        double tp = timed([&] { b = lowest_eigs(d, 10, Exec::OpenMP); });
        report("oracle lowest_eigs", ts, tp, a == b);
    }

    return 0;
}
