#pragma once

// Chebyshev-Lobatto collocation panel: K nodes per panel, cumulative
// integration matrix built once from the Chebyshev basis.  Shared by the
// Frobenius head construction and its quadratures.

#include <array>
#include <cmath>
#include <vector>

namespace singdet::detail {

struct ChebBasis {
    static constexpr int K = 16;
    std::array<double, K> t;       // Lobatto nodes on [-1, 1], ascending
    std::array<double, K> bary;    // barycentric weights
    // cum[i][j]: weight of f(t_j) in int_{-1}^{t_i} p(t) dt for the
    // interpolating polynomial p
    std::array<std::array<double, K>, K> cum;

    static const ChebBasis& get();

private:
    ChebBasis();
};

// Evaluate the interpolant through (nodes t, values v) at point s in [-1,1].
inline double bary_eval(const ChebBasis& B, const double* v, double s) {
    // exact node hit guard
    double num = 0.0, den = 0.0;
    for (int i = 0; i < ChebBasis::K; ++i) {
        double d = s - B.t[i];
        if (std::abs(d) < 1e-14) return v[i];
        double w = B.bary[i] / d;
        num += w * v[i];
        den += w;
    }
    return num / den;
}

}  // namespace singdet::detail
