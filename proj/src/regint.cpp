#include "singdet/regint.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <string>

#include "singdet/determinant.hpp"
#include "singdet/errors.hpp"
#include "singdet/quadrature.hpp"
#include "singdet/specfun.hpp"

namespace singdet {

namespace {

std::string num_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double subtracted(const Sampler& f, const std::vector<PowerTerm>& terms, double x) {
    double v = f(x);
    for (const auto& t : terms) v -= t.coefficient * std::pow(x, t.exponent);
    return v;
}

void validate_infinity_terms(const std::vector<PowerTerm>& terms) {
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (!(terms[i].exponent < terms[i - 1].exponent))
            throw UsageError("infinity-side exponents must be strictly descending");
}

void validate_zero_terms(const std::vector<PowerTerm>& terms) {
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (!(terms[i].exponent > terms[i - 1].exponent))
            throw UsageError("zero-side exponents must be strictly ascending");
}

}  // namespace

double reg_integral_to_infinity(const Sampler& f, const std::vector<PowerTerm>& terms, double c,
                                const RegIntOptions& opts) {
    if (!(c > 0.0)) throw UsageError("reg_integral_to_infinity requires c > 0");
    validate_infinity_terms(terms);
    auto g = [&](double x) { return subtracted(f, terms, x); };

    double integral;
    if (std::isfinite(opts.cutoff)) {
        const double Z = opts.cutoff;
        if (!(Z > c)) throw UsageError("cutoff must exceed c");
        integral = quadrature::integrate(g, c, Z, opts.rel_tol, opts.abs_tol);
        for (const auto& t : opts.tail_model) {
            if (!(t.exponent < -1.0))
                throw UsageError("tail_model exponents must be < -1");
            integral -= t.coefficient * std::pow(Z, t.exponent + 1.0) / (t.exponent + 1.0);
        }
    } else {
        // measure the decay of the subtracted integrand before transforming
        double x1 = 64.0 * c;
        double g1 = std::abs(g(x1)), g2 = std::abs(g(4.0 * x1));
        if (g1 > 1e-14 * (std::abs(f(x1)) + 1.0)) {
            double slope = std::log(std::max(g2, 1e-300) / g1) / std::log(4.0);
            if (!(slope < -1.05))
                throw NumericalError(
                    "subtracted integrand does not decay integrably at infinity "
                    "(measured tail exponent " + num_str(slope) + ")");
        }
        integral = quadrature::integrate([&](double t) { return g(1.0 / t) / (t * t); }, 0.0,
                                         1.0 / c, opts.rel_tol, opts.abs_tol);
    }

    for (const auto& t : terms) {
        if (t.exponent == -1.0)
            integral -= t.coefficient * std::log(c);
        else
            integral -= t.coefficient * std::pow(c, t.exponent + 1.0) / (t.exponent + 1.0);
    }
    return integral;
}

double reg_integral_from_zero(const Sampler& f, const std::vector<PowerTerm>& terms, double c,
                              const RegIntOptions& opts) {
    if (!(c > 0.0)) throw UsageError("reg_integral_from_zero requires c > 0");
    validate_zero_terms(terms);
    std::vector<PowerTerm> divergent;
    for (const auto& t : terms)
        if (t.exponent <= -1.0) divergent.push_back(t);
    auto g = [&](double x) { return subtracted(f, divergent, x); };
    double integral = quadrature::integrate(g, 0.0, c, opts.rel_tol, opts.abs_tol);
    for (const auto& t : divergent) {
        if (t.exponent == -1.0)
            integral += t.coefficient * std::log(c);
        else
            integral += t.coefficient * std::pow(c, t.exponent + 1.0) / (t.exponent + 1.0);
    }
    return integral;
}

double reg_integral(const Sampler& f, const AsymptoticSpec& spec, double c,
                    const RegIntOptions& opts) {
    double value = reg_integral_from_zero(f, spec.at_zero, c, opts) +
                   reg_integral_to_infinity(f, spec.at_infinity, c, opts);
    if (opts.verify_c_independence) {
        RegIntOptions o2 = opts;
        o2.verify_c_independence = false;
        double value2 = reg_integral_from_zero(f, spec.at_zero, 2.0 * c, o2) +
                        reg_integral_to_infinity(f, spec.at_infinity, 2.0 * c, o2);
        double gap = std::abs(value - value2);
        if (gap > opts.c_check_tol * std::max(1.0, std::abs(value)))
            throw NumericalError("regularized integral is not c-independent: gap " +
                                 num_str(gap) + " between c and 2c");
    }
    return value;
}

namespace {

// exceptions may not escape an OpenMP region
template <class F>
void guarded_parallel_for(Exec exec, std::size_t n, F&& body) {
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::string error;
    parallel_for(exec, n, [&](std::size_t i) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
            body(i);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(mu);
            failed.store(true);
            error = e.what();
        }
    });
    if (failed.load()) throw NumericalError(error);
}

struct ScaledSum {  // accumulates values of the form m * e^s
    double m = 0.0, s = -1e300;
    void add(double mv, double sv) {
        if (mv == 0.0) return;
        if (sv > s) {
            m = m * std::exp(s - sv) + mv;
            s = sv;
        } else {
            m += mv * std::exp(sv - s);
        }
    }
};

double inner_head_piece(const SolutionPair& pair, double& scale) {
    // int_0^{x_h} phi psi via the singular basis decomposition
    const HeadBasis& basis = pair.basis;
    double c1p, c2p, sp, c1s, c2s, ss;
    pair.phi.head_coefficients(c1p, c2p, sp);
    pair.psi.head_coefficients(c1s, c2s, ss);
    const double xh = basis.x_h;
    double sum = 0.0;
    if (c1p != 0.0 && c1s != 0.0)
        sum += c1p * c1s * head_pair_integral(basis.g1, basis.g1, xh);
    if (basis.g2) {
        double cross = c1p * c2s + c2p * c1s;
        if (cross != 0.0) sum += cross * head_pair_integral(basis.g1, *basis.g2, xh);
        if (c2p != 0.0 && c2s != 0.0)
            sum += c2p * c2s * head_pair_integral(*basis.g2, *basis.g2, xh);
    }
    scale = sp + ss;
    return sum;
}

double trace_from_pair(const SingularProblem& p, const BoundaryPair& bc,
                       const SolutionPair& pair, double z, const ShootOptions& opts) {
    const double xh = std::max(pair.phi.x_match(), pair.psi.x_match());
    if (std::abs(pair.w.value) < 1e-12)
        throw NumericalError("resolvent pole: the Wronskian vanishes at z = " + num_str(z));

    // reference scale for the product integrand on [xh, 1]
    double sref = -1e300;
    for (int k = 0; k <= 6; ++k) {
        double x = xh + k * (1.0 - xh) / 6.0;
        Scaled a = pair.phi.eval(x), b = pair.psi.eval(x);
        sref = std::max(sref, a.logscale + b.logscale +
                                  std::log(std::abs(a.f * b.f) + 1e-300));
    }

    auto integrand = [&](double x) {
        Scaled a = pair.phi.eval(x), b = pair.psi.eval(x);
        double e = a.logscale + b.logscale - sref;
        return (e > -700.0) ? a.f * b.f * std::exp(e) : 0.0;
    };
    double outer = quadrature::integrate(integrand, xh, 1.0, opts.rel_tol * 10.0);

    ScaledSum total;
    total.add(outer, sref);

    if (p.nu > 0.0) {
        double si;
        double inner = inner_head_piece(pair, si);
        total.add(inner, si);
    } else {
        // nu = 0: no second head; continue psi below x_h with a deeper
        // backward integration and quadrature against the phi head
        const double delta = 1e-6;
        ShootOptions o2 = opts;
        o2.x_match = delta;
        NormalizedSolution psi2 = normalized_psi(p, bc, z, delta, o2);
        auto inner_f = [&](double x) {
            Scaled a = pair.phi.eval(x), b = psi2.eval(x);
            double e = a.logscale + b.logscale - sref;
            return (e > -700.0) ? a.f * b.f * std::exp(e) : 0.0;
        };
        double inner = quadrature::integrate(inner_f, delta, xh, opts.rel_tol * 10.0);
        total.add(inner, sref);
    }

    double log_tr = std::log(std::abs(total.m)) + total.s - log_abs(pair.w);
    double sign = ((total.m > 0.0) == (pair.w.value > 0.0)) ? 1.0 : -1.0;
    return sign * std::exp(log_tr);
}

}  // namespace

double resolvent_trace(const SingularProblem& p, const BoundaryPair& bc, double z,
                       const ShootOptions& opts) {
    SolutionPair pair = solve_pair(p, bc, z, opts);
    return trace_from_pair(p, bc, pair, z, opts);
}

std::vector<double> trace_batch(const SingularProblem& p, const BoundaryPair& bc,
                                const std::vector<double>& zs, Exec exec,
                                const ShootOptions& opts) {
    std::vector<double> out(zs.size());
    guarded_parallel_for(exec, zs.size(), [&](std::size_t i) {
        out[i] = resolvent_trace(p, bc, zs[i], opts);
    });
    return out;
}

double model_trace_oracle(double nu, double theta1, double z) {
    if (!(nu >= 0.0)) throw UsageError("model_trace_oracle requires nu >= 0");
    if (!(z > 0.0)) throw UsageError("model_trace_oracle requires z > 0");
    const double s = std::sqrt(z);
    using specfun::Order;
    const double st = std::sin(theta1), ct = std::cos(theta1);
    const double cth = ct + (0.5 + nu) * st;

    // beta(s) scaled by e^{2s}: K e^{s} and I e^{-s} are both O(1/sqrt(s))
    const double kh = std::exp(specfun::bessel_k_log(Order(nu), s) + s);
    const double kh1 = std::exp(specfun::bessel_k_log(Order(nu + 1.0), s) + s);
    const double ih = std::exp(specfun::bessel_i_log(Order(nu), s) - s);
    const double ih1 = std::exp(specfun::bessel_i_log(Order(nu + 1.0), s) - s);
    const double den = cth * ih + s * ih1 * st;
    if (std::abs(den) < 1e-14 * (std::abs(cth * ih) + std::abs(s * ih1 * st)) ||
        den == 0.0)
        throw NumericalError("model_trace_oracle: boundary factor denominator vanishes");
    const double beta_hat = (cth * kh - s * kh1 * st) / den;

    auto integrand = [&](double x) {
        const double t = x * s;
        double li = specfun::bessel_i_log(Order(nu), t);
        double lk = specfun::bessel_k_log(Order(nu), t);
        double term1 = x * std::exp(li + lk);
        double e2 = std::log(std::abs(beta_hat) + 1e-300) + 2.0 * li - 2.0 * s;
        double term2 = (e2 > -700.0) ? x * ((beta_hat > 0) ? 1.0 : -1.0) * std::exp(e2) : 0.0;
        return term1 - term2;
    };
    return quadrature::integrate(integrand, 0.0, 1.0, 1e-11);
}

namespace {

// least squares for Tr ~ sum_k coef_k z^{-(k+1)/2} with rows weighted by
// sqrt(z); modified Gram-Schmidt in long double
std::vector<double> fit_powers(const std::vector<double>& zs, const std::vector<double>& tr,
                               int nterms) {
    const std::size_t m = zs.size();
    std::vector<std::vector<long double>> A(nterms, std::vector<long double>(m));
    std::vector<long double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        long double w = std::sqrt((long double)zs[i]);
        for (int k = 0; k < nterms; ++k)
            A[k][i] = w * std::pow((long double)zs[i], -(k + 1) * 0.5L);
        y[i] = w * (long double)tr[i];
    }
    // orthogonalize
    std::vector<std::vector<long double>> Q = A;
    std::vector<std::vector<long double>> R(nterms, std::vector<long double>(nterms, 0.0L));
    for (int k = 0; k < nterms; ++k) {
        for (int j = 0; j < k; ++j) {
            long double d = 0;
            for (std::size_t i = 0; i < m; ++i) d += Q[j][i] * Q[k][i];
            R[j][k] = d;
            for (std::size_t i = 0; i < m; ++i) Q[k][i] -= d * Q[j][i];
        }
        long double nrm = 0;
        for (std::size_t i = 0; i < m; ++i) nrm += Q[k][i] * Q[k][i];
        nrm = std::sqrt(nrm);
        if (nrm < 1e-14)
            throw UsageError("trace fit is ill-conditioned; widen the sample spread");
        R[k][k] = nrm;
        for (std::size_t i = 0; i < m; ++i) Q[k][i] /= nrm;
    }
    std::vector<long double> qy(nterms);
    for (int k = 0; k < nterms; ++k) {
        long double d = 0;
        for (std::size_t i = 0; i < m; ++i) d += Q[k][i] * y[i];
        qy[k] = d;
    }
    std::vector<double> coef(nterms);
    for (int k = nterms - 1; k >= 0; --k) {
        long double d = qy[k];
        for (int j = k + 1; j < nterms; ++j) d -= R[k][j] * (long double)coef[j];
        coef[k] = static_cast<double>(d / R[k][k]);
    }
    return coef;
}

double fit_residual(const std::vector<double>& zs, const std::vector<double>& tr,
                    const std::vector<double>& coef) {
    double worst = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        double model = 0.0;
        for (std::size_t k = 0; k < coef.size(); ++k)
            model += coef[k] * std::pow(zs[i], -(static_cast<double>(k) + 1.0) * 0.5);
        worst = std::max(worst, std::abs(model - tr[i]) / std::abs(tr[i]));
    }
    return worst;
}

}  // namespace

TraceFit fit_trace_asymptotics(const SingularProblem& p, const BoundaryPair& bc,
                               const std::vector<double>& z_samples, Exec exec,
                               const ShootOptions& opts) {
    if (z_samples.size() < 6)
        throw UsageError("fit_trace_asymptotics requires at least 6 samples");
    for (double z : z_samples)
        if (z < 50.0 || z > 2e6)
            throw UsageError("fit_trace_asymptotics samples must lie in [1e2, 1e6]");
    std::vector<double> tr = trace_batch(p, bc, z_samples, exec, opts);
    std::vector<double> coef = fit_powers(z_samples, tr, 3);
    TraceFit fit;
    fit.a = coef[0];
    fit.b = coef[1];
    fit.residual = fit_residual(z_samples, tr, coef);
    return fit;
}

double zeta_det_contour(const SingularProblem& p, const BoundaryPair& bc, Exec exec,
                        const ShootOptions& opts, const ContourOptions& copts) {
    // the contour degenerates to [0, inf) only for strictly positive spectra
    EigenList low = eigenvalues(p, bc, 1, 2000.0, -50.0, exec, opts);
    if (!low.values.empty() && low.values.front().lambda <= 0.0)
        throw NumericalError(
            "zeta_det_contour requires a positive spectrum (lambda_1 = " +
            num_str(low.values.front().lambda) +
            "); compute char_function at a shifted z instead");

    std::vector<double> samples = copts.fit_samples;
    if (samples.empty())
        for (int i = 0; i < 12; ++i) samples.push_back(1e2 * std::pow(10.0, i * 4.0 / 11.0));
    std::vector<double> tr = trace_batch(p, bc, samples, exec, opts);
    std::vector<double> coef = fit_powers(samples, tr, 4);
    double resid = fit_residual(samples, tr, coef);
    if (resid > 1e-5)
        throw NumericalError("trace-asymptotics fit residual " + num_str(resid) +
                             " too large for the contour determinant");
    const double a = coef[0], b = coef[1], c3 = coef[2], d4 = coef[3];

    auto tr_at = [&](double x) { return resolvent_trace(p, bc, x, opts); };

    RegIntOptions ropts;
    ropts.rel_tol = copts.quad_rel_tol;
    ropts.abs_tol = copts.quad_abs_tol;
    ropts.cutoff = copts.cutoff;
    ropts.tail_model = {{-1.5, c3}, {-2.0, d4}};
    ropts.verify_c_independence = false;
    std::vector<PowerTerm> inf_terms = {{-0.5, a}, {-1.0, b}};

    double head = quadrature::integrate(tr_at, 0.0, 1.0, copts.quad_rel_tol, copts.quad_abs_tol);
    double tail = reg_integral_to_infinity(tr_at, inf_terms, 1.0, ropts);
    double value = head + tail;

    // c-independence of the split point (the partie-finie bookkeeping)
    double head2 =
        head + quadrature::integrate(tr_at, 1.0, 2.0, copts.quad_rel_tol, copts.quad_abs_tol);
    double tail2 = reg_integral_to_infinity(tr_at, inf_terms, 2.0, ropts);
    if (std::abs(head2 + tail2 - value) > 1e-6 * std::max(1.0, std::abs(value)))
        throw NumericalError("contour determinant split-point check failed: gap " +
                             num_str(std::abs(head2 + tail2 - value)));

    return std::exp(-value);
}

}  // namespace singdet
