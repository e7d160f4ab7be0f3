#include "cheb_panel.hpp"

namespace singdet::detail {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

// Solve M x = b by Gaussian elimination with partial pivoting (small K only).
void solve_dense(std::vector<double>& M, std::vector<double>& b, int n) {
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(M[r * n + c]) > std::abs(M[piv * n + c])) piv = r;
        for (int j = 0; j < n; ++j) std::swap(M[c * n + j], M[piv * n + j]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < n; ++r) {
            double f = M[r * n + c] / M[c * n + c];
            for (int j = c; j < n; ++j) M[r * n + j] -= f * M[c * n + j];
            b[r] -= f * b[c];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int j = r + 1; j < n; ++j) s -= M[r * n + j] * b[j];
        b[r] = s / M[r * n + r];
    }
}
}  // namespace

ChebBasis::ChebBasis() {
    const int N = K - 1;
    for (int i = 0; i < K; ++i) t[i] = -std::cos(kPi * i / N);
    for (int i = 0; i < K; ++i) {
        bary[i] = (i % 2 == 0) ? 1.0 : -1.0;
        if (i == 0 || i == N) bary[i] *= 0.5;
    }

    // Chebyshev values at the nodes
    auto T = [&](int j, double s) { return std::cos(j * std::acos(std::max(-1.0, std::min(1.0, s)))); };

    // Column j of `cum`: interpolate the cardinal function e_j, integrate.
    for (int j = 0; j < K; ++j) {
        // coefficients c of the cardinal polynomial via Vandermonde solve
        std::vector<double> M(K * K);
        std::vector<double> rhs(K, 0.0);
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < K; ++c) M[r * K + c] = T(c, t[r]);
        rhs[j] = 1.0;
        solve_dense(M, rhs, K);  // rhs now holds Chebyshev coefficients c_0..c_{K-1}

        // antiderivative coefficients b_k, k = 1..K (b_0 fixed by the lower limit)
        std::array<double, K + 1> b{};
        auto coef = [&](int k) { return (k >= 0 && k < K) ? rhs[k] : 0.0; };
        b[1] = coef(0) - 0.5 * coef(2);
        for (int k = 2; k <= K; ++k) b[k] = (coef(k - 1) - coef(k + 1)) / (2.0 * k);

        for (int i = 0; i < K; ++i) {
            double v = 0.0;
            for (int k = 1; k <= K; ++k) v += b[k] * (T(k, t[i]) - T(k, -1.0));
            cum[i][j] = v;
        }
    }
}

const ChebBasis& ChebBasis::get() {
    static const ChebBasis basis;
    return basis;
}

}  // namespace singdet::detail
