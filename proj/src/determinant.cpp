#include "singdet/determinant.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <string>

#include "singdet/errors.hpp"
#include "singdet/specfun.hpp"

namespace singdet {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

std::string num_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double det_prefactor(double mu0, double mu1) {
    return kPi / (std::pow(2.0, mu0 + mu1) * specfun::gamma_fn(mu0 + 1.0) *
                  specfun::gamma_fn(mu1 + 1.0));
}

DetResult assemble(const SingularProblem& p, const BoundaryPair& bc, const WronskianValue& w) {
    DetResult r;
    r.mu0 = mu0(bc.theta0, p.nu);
    r.mu1 = mu1(bc.theta1);
    r.prefactor = det_prefactor(r.mu0, r.mu1);
    r.wronskian = w;
    if (w.value == 0.0) {
        r.value = 0.0;
        r.log_value = -std::numeric_limits<double>::infinity();
        return r;
    }
    r.log_value = std::log(r.prefactor) + log_abs(w);
    double sign = (w.value > 0.0) ? 1.0 : -1.0;
    r.value = (r.log_value < 709.0) ? sign * std::exp(r.log_value)
                                    : sign * std::numeric_limits<double>::infinity();
    return r;
}

// run `body(i)` over [0, n) under `exec`; exceptions may not cross an OpenMP
// region, so capture and rethrow after the loop
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

}  // namespace

DetResult zeta_det(const SingularProblem& p, const BoundaryPair& bc, const ShootOptions& opts) {
    require_admissible(bc, p.nu);
    if (bc.theta0 > 0.0 && !(p.nu > 0.0))
        throw UsageError("determinant with theta0 > 0 requires nu > 0");
    SolutionPair pair = solve_pair(p, bc, 0.0, opts);
    return assemble(p, bc, pair.w);
}

DetResult char_function(const SingularProblem& p, const BoundaryPair& bc, double z,
                        const ShootOptions& opts) {
    return zeta_det(shifted(p, z), bc, opts);
}

std::vector<WronskianValue> wronskian_batch(const SingularProblem& p, const BoundaryPair& bc,
                                            const std::vector<double>& zs, Exec exec,
                                            const ShootOptions& opts) {
    require_admissible(bc, p.nu);
    std::vector<WronskianValue> out(zs.size());
    guarded_parallel_for(exec, zs.size(), [&](std::size_t i) {
        out[i] = solve_pair(p, bc, zs[i], opts).w;
    });
    return out;
}

namespace {

struct Bracket {
    double lo, hi;
    double wlo, whi;  // mantissa signs suffice
};

EigenPoint refine_bracket(const SingularProblem& p, const BoundaryPair& bc, Bracket b,
                          const ShootOptions& opts) {
    auto weval = [&](double lambda) { return solve_pair(p, bc, -lambda, opts).w; };
    double flo = b.wlo, fhi = b.whi;
    for (int i = 0; i < 60; ++i) {
        if (b.hi - b.lo < 0.5e-9 * std::max(1.0, std::abs(b.lo))) break;
        double mid = 0.5 * (b.lo + b.hi);
        WronskianValue wm = weval(mid);
        if ((flo > 0.0) != (wm.value > 0.0)) {
            b.hi = mid;
            fhi = wm.value;
        } else {
            b.lo = mid;
            flo = wm.value;
        }
    }
    // secant polish on the mantissas (scales are equal this close together)
    double x0 = b.lo, x1 = b.hi, f0 = flo, f1 = fhi;
    for (int i = 0; i < 6; ++i) {
        if (f1 == f0) break;
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 >= b.lo && x2 <= b.hi)) break;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        WronskianValue w = weval(x1);
        f1 = w.value;
        if (std::abs(x1 - x0) < 1e-12 * std::max(1.0, std::abs(x1))) break;
    }
    WronskianValue wr = weval(x1);
    double resid = std::abs(wr.value) * std::exp(std::min(wr.logscale, 700.0));
    return EigenPoint{x1, b.lo, b.hi, resid};
}

}  // namespace

EigenList eigenvalues(const SingularProblem& p, const BoundaryPair& bc, int count,
                      double lambda_max, double lambda_min, Exec exec,
                      const ShootOptions& opts) {
    require_admissible(bc, p.nu);
    if (count < 1) throw UsageError("eigenvalues requires count >= 1");
    if (!(lambda_max > lambda_min)) throw UsageError("eigenvalues requires lambda_max > lambda_min");

    EigenList list;
    const int wave = std::max(4, 2 * hardware_threads());
    double step = kPi * kPi / 4.0;
    double lambda = lambda_min;
    WronskianValue wprev = solve_pair(p, bc, -lambda, opts).w;

    std::vector<Bracket> brackets;
    while (static_cast<int>(list.values.size()) + static_cast<int>(brackets.size()) < count &&
           lambda < lambda_max) {
        std::vector<double> grid(wave);
        for (int i = 0; i < wave; ++i) grid[i] = std::min(lambda + (i + 1) * step, lambda_max);
        std::vector<WronskianValue> w(wave);
        guarded_parallel_for(exec, grid.size(), [&](std::size_t i) {
            w[i] = solve_pair(p, bc, -grid[i], opts).w;
        });
        double prev_l = lambda;
        WronskianValue prev_w = wprev;
        for (int i = 0; i < wave; ++i) {
            if (grid[i] <= prev_l) continue;
            if ((prev_w.value > 0.0) != (w[i].value > 0.0))
                brackets.push_back(Bracket{prev_l, grid[i], prev_w.value, w[i].value});
            prev_l = grid[i];
            prev_w = w[i];
        }
        lambda = prev_l;
        wprev = prev_w;
        if (brackets.size() >= 2) {
            double spacing = brackets.back().lo - brackets[brackets.size() - 2].lo;
            step = std::clamp(0.3 * spacing, kPi * kPi / 4.0, 0.1 * (lambda_max - lambda_min));
        }
        if (grid.back() >= lambda_max) break;
    }

    if (static_cast<int>(brackets.size()) > count) brackets.resize(count);
    std::vector<EigenPoint> pts(brackets.size());
    guarded_parallel_for(exec, brackets.size(), [&](std::size_t i) {
        pts[i] = refine_bracket(p, bc, brackets[i], opts);
    });
    std::sort(pts.begin(), pts.end(),
              [](const EigenPoint& a, const EigenPoint& b) { return a.lambda < b.lambda; });
    list.values = std::move(pts);
    list.complete = static_cast<int>(list.values.size()) >= count;
    return list;
}

FactorReport factor_check(double nu, const Expr& omega_tilde, double z,
                          const ShootOptions& opts) {
    if (!(nu > 0.0 && nu < 1.0)) throw UsageError("factor_check requires 0 < nu < 1");
    // omega_tilde must not vanish on [0, 1]
    double sign0 = 0.0;
    for (int i = 0; i <= 64; ++i) {
        double x = std::max(1e-9, i / 64.0);
        double v = omega_tilde.eval(x);
        if (std::abs(v) < 1e-12)
            throw UsageError("factor_check: omega_tilde vanishes near x = " + num_str(x));
        if (sign0 == 0.0) sign0 = v > 0 ? 1.0 : -1.0;
        if ((v > 0) != (sign0 > 0))
            throw UsageError("factor_check: omega_tilde changes sign on [0, 1]");
    }

    // Potentials of the two factor orders, from omega = x^{mu+1/2} wt with
    // mu = -nu:
    //   V12 = 2(mu + 1/2) wt'/wt + x wt''/wt
    //   V21 = 2(mu + 1/2) wt'/wt + x (2 (wt'/wt)^2 - wt''/wt)
    Expr wt = omega_tilde;
    Expr d1 = wt.derivative();
    Expr d2 = d1.derivative();
    Expr l = Expr::div(d1, wt);
    Expr common = Expr::mul(Expr::number(1.0 - 2.0 * nu), l);
    Expr v12 = Expr::add(common, Expr::mul(Expr::variable(), Expr::div(d2, wt)));
    Expr v21 = Expr::add(
        common, Expr::mul(Expr::variable(), Expr::sub(Expr::mul(Expr::number(2.0), Expr::mul(l, l)),
                                                      Expr::div(d2, wt))));
    SingularProblem h12 = make_problem(nu, v12);
    SingularProblem h21 = make_problem(1.0 - nu, v21);

    // Angles cut out by omega: theta0 from the singular-basis coefficients,
    // theta1 from the boundary values at 1.
    HeadBasis basis = build_basis(h12, 0.0, opts);
    double xh = basis.x_h;
    double wtv = wt.eval(xh), wtd = d1.eval(xh);
    double om = std::pow(xh, -nu + 0.5) * wtv;
    double omp = std::pow(xh, -nu + 0.5) * (wtd + (-nu + 0.5) * wtv / xh);
    double c1 = om * basis.g2->deriv(xh) - omp * basis.g2->value(xh);
    double c2 = -(om * basis.g1.deriv(xh) - omp * basis.g1.value(xh));
    double theta0 = std::atan2(-c2, c1);
    if (theta0 <= 0.0) theta0 += kPi;
    double om1 = wt.eval(1.0);
    double om1p = d1.eval(1.0) + (-nu + 0.5) * om1;
    double theta1 = std::atan2(-om1, om1p);
    if (theta1 <= 0.0) theta1 += kPi;

    auto ratio = [&](const WronskianValue& a, const WronskianValue& b) {
        double s = ((a.value > 0) == (b.value > 0)) ? 1.0 : -1.0;
        return s * std::exp(log_abs(a) - log_abs(b));
    };

    FactorReport rep{};
    rep.theta0 = theta0;
    rep.theta1 = theta1;
    // Case I: boundary angle theta1 kept on both factor orders.
    WronskianValue w12 = solve_pair(h12, make_boundary(theta0, theta1), z, opts).w;
    WronskianValue w21 = solve_pair(h21, make_boundary(0.0, 0.0), z, opts).w;
    rep.ratio_case1 = ratio(w12, w21);
    rep.expected_case1 = z / (2.0 - 2.0 * nu);
    // Case II: Dirichlet at 1 for H12, complementary angle for H21.
    WronskianValue w12b = solve_pair(h12, make_boundary(theta0, 0.0), z, opts).w;
    WronskianValue w21b = solve_pair(h21, make_boundary(0.0, kPi - theta1), z, opts).w;
    rep.ratio_case2 = ratio(w12b, w21b);
    rep.expected_case2 = 1.0 / (2.0 - 2.0 * nu);
    return rep;
}

VariationReport variation_check(const SingularProblem& p, const BoundaryPair& bc, const Expr& w,
                                double h, const ShootOptions& opts) {
    if (!(h > 0.0)) throw UsageError("variation_check requires h > 0");
    auto perturbed = [&](double eta) {
        Expr v = Expr::add(p.potential,
                           Expr::mul(Expr::number(eta), Expr::mul(Expr::variable(), w)));
        return make_problem(p.nu, v, p.zshift);
    };
    DetResult plus = zeta_det(perturbed(h), bc, opts);
    DetResult minus = zeta_det(perturbed(-h), bc, opts);
    if (plus.value == 0.0 || minus.value == 0.0 || (plus.value > 0) != (minus.value > 0))
        throw NumericalError("variation_check: determinant vanishes inside the stencil");
    VariationReport rep{};
    rep.d_log_det = (plus.log_value - minus.log_value) / (2.0 * h);
    rep.d_log_w = (log_abs(plus.wronskian) - log_abs(minus.wronskian)) / (2.0 * h);
    rep.gap = std::abs(rep.d_log_det - rep.d_log_w);
    return rep;
}

}  // namespace singdet
