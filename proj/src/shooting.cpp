#include "singdet/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "singdet/errors.hpp"

namespace singdet {

namespace {

std::string num_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::vector<double> wronskian_points(double lo) {
    std::vector<double> pts;
    for (int k = 1; k <= 5; ++k) pts.push_back(lo + k * (1.0 - lo) / 6.0);
    return pts;
}

double q_coeff(const SingularProblem& p, double x) {
    return (p.nu * p.nu - 0.25) / (x * x) + potential_value(p, x) / x;
}

// Dormand-Prince 5(4) on the first-order system (f, f') for f'' = q f,
// with renormalization into `logscale` when the magnitudes pass 1e100.
std::vector<TraceNode> integrate(const SingularProblem& p, double x0, double x1, double f0,
                                 double fp0, double s0, const ShootOptions& opts,
                                 const std::vector<double>& stops) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200, e6 = 11.0 / 84 - 187.0 / 2100,
                            e7 = -1.0 / 40;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

    const double dir = (x1 > x0) ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);
    double x = x0, f = f0, fp = fp0, s = s0;
    double h = dir * span / 64.0;

    // wronskian evaluation points must be hit exactly (no dense-output error)
    std::vector<double> stop_list = stops;
    std::sort(stop_list.begin(), stop_list.end(),
              [&](double a, double b) { return dir * a < dir * b; });
    std::size_t next_stop = 0;
    auto clip_to_stop = [&](double hh) {
        while (next_stop < stop_list.size() && dir * (stop_list[next_stop] - x) <= 1e-14 * span)
            ++next_stop;
        if (next_stop < stop_list.size() && dir * (x + hh - stop_list[next_stop]) > 0.0)
            hh = stop_list[next_stop] - x;
        return hh;
    };

    std::vector<TraceNode> nodes;
    nodes.reserve(256);
    nodes.push_back({x, f, fp, s});

    auto rhs = [&](double xx, double ff, double ffp, double& df, double& dfp) {
        df = ffp;
        dfp = q_coeff(p, xx) * ff;
    };

    double k1f, k1p;
    rhs(x, f, fp, k1f, k1p);
    long long steps = 0;
    while (dir * (x1 - x) > 1e-15 * span) {
        if (++steps > 4000000)
            throw NumericalError("adaptive integrator exceeded the step budget");
        if (dir * (x + h - x1) > 0) h = x1 - x;
        double h_unclipped = h;
        double h_try = clip_to_stop(h);
        bool clipped = h_try != h;
        h = h_try;

        double k2f, k2p, k3f, k3p, k4f, k4p, k5f, k5p, k6f, k6p, k7f, k7p;
        rhs(x + c2 * h, f + h * a21 * k1f, fp + h * a21 * k1p, k2f, k2p);
        rhs(x + c3 * h, f + h * (a31 * k1f + a32 * k2f), fp + h * (a31 * k1p + a32 * k2p), k3f,
            k3p);
        rhs(x + c4 * h, f + h * (a41 * k1f + a42 * k2f + a43 * k3f),
            fp + h * (a41 * k1p + a42 * k2p + a43 * k3p), k4f, k4p);
        rhs(x + c5 * h, f + h * (a51 * k1f + a52 * k2f + a53 * k3f + a54 * k4f),
            fp + h * (a51 * k1p + a52 * k2p + a53 * k3p + a54 * k4p), k5f, k5p);
        rhs(x + h, f + h * (a61 * k1f + a62 * k2f + a63 * k3f + a64 * k4f + a65 * k5f),
            fp + h * (a61 * k1p + a62 * k2p + a63 * k3p + a64 * k4p + a65 * k5p), k6f, k6p);
        double fn = f + h * (b1 * k1f + b3 * k3f + b4 * k4f + b5 * k5f + b6 * k6f);
        double fpn = fp + h * (b1 * k1p + b3 * k3p + b4 * k4p + b5 * k5p + b6 * k6p);
        rhs(x + h, fn, fpn, k7f, k7p);

        double errf = h * (e1 * k1f + e3 * k3f + e4 * k4f + e5 * k5f + e6 * k6f + e7 * k7f);
        double errp = h * (e1 * k1p + e3 * k3p + e4 * k4p + e5 * k5p + e6 * k6p + e7 * k7p);
        double scf = opts.abs_tol + opts.rel_tol * std::max(std::abs(f), std::abs(fn));
        double scp = opts.abs_tol + opts.rel_tol * std::max(std::abs(fp), std::abs(fpn));
        double err = std::sqrt(0.5 * ((errf / scf) * (errf / scf) + (errp / scp) * (errp / scp)));

        if (err <= 1.0 || std::abs(h) <= 1e-14 * span) {
            x += h;
            f = fn;
            fp = fpn;
            k1f = k7f;
            k1p = k7p;
            double mag = std::abs(f) + std::abs(fp);
            if (mag > 1e100) {
                f /= mag;
                fp /= mag;
                k1f /= mag;
                k1p /= mag;
                s += std::log(mag);
            }
            nodes.push_back({x, f, fp, s});
        }
        double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        fac = std::clamp(fac, 0.2, 5.0);
        if (clipped && err <= 1.0)
            h = dir * std::min(std::abs(h_unclipped * fac), span);
        else
            h *= fac;
        if (std::abs(h) < 1e-15 * span)
            throw NumericalError("adaptive integrator step underflow near x = " + num_str(x));
    }
    if (dir < 0) std::reverse(nodes.begin(), nodes.end());
    return nodes;
}

}  // namespace

struct NormalizedSolution::Impl {
    SingularProblem problem;  // with the full shift folded in
    double z_total = 0.0;
    double x_h = 0.0;
    std::shared_ptr<const HeadBasis> basis;
    bool have_coeffs = false;
    double c1 = 0.0, c2 = 0.0, coeff_scale = 0.0;
    std::vector<TraceNode> nodes;
};

double NormalizedSolution::z() const { return impl->z_total; }
double NormalizedSolution::x_match() const { return impl->x_h; }
const std::vector<TraceNode>& NormalizedSolution::trace() const { return impl->nodes; }
bool NormalizedSolution::has_head_coefficients() const { return impl->have_coeffs; }

void NormalizedSolution::head_coefficients(double& c1, double& c2, double& cs) const {
    if (!impl->have_coeffs)
        throw NumericalError("solution has no singular-basis decomposition (nu = 0 path)");
    c1 = impl->c1;
    c2 = impl->c2;
    cs = impl->coeff_scale;
}

Scaled NormalizedSolution::eval(double x) const {
    const Impl& im = *impl;
    if (x < im.x_h * (1.0 - 1e-12)) {
        if (!im.have_coeffs)
            throw NumericalError("cannot evaluate below x_match without a head decomposition");
        const SingularHead& g1 = im.basis->g1;
        double v = im.c1 * g1.value(x), dv = im.c1 * g1.deriv(x);
        if (im.c2 != 0.0) {
            const SingularHead& g2 = *im.basis->g2;
            v += im.c2 * g2.value(x);
            dv += im.c2 * g2.deriv(x);
        }
        return {v, dv, im.coeff_scale};
    }
    const auto& nodes = im.nodes;
    auto it = std::lower_bound(nodes.begin(), nodes.end(), x,
                               [](const TraceNode& n, double v) { return n.x < v; });
    if (it == nodes.begin()) return {it->f, it->fp, it->logscale};
    if (it == nodes.end()) {
        const TraceNode& n = nodes.back();
        return {n.f, n.fp, n.logscale};
    }
    const TraceNode& right = *it;
    const TraceNode& left = *(it - 1);
    if (right.x == x) return {right.f, right.fp, right.logscale};

    // cubic Hermite on a common scale; f'' = q f supplies the fp derivative
    double s = std::max(left.logscale, right.logscale);
    double el = std::exp(left.logscale - s), er = std::exp(right.logscale - s);
    double h = right.x - left.x, t = (x - left.x) / h;
    double f0 = left.f * el, p0 = left.fp * el, f1 = right.f * er, p1 = right.fp * er;
    double q0 = q_coeff(im.problem, left.x) * f0, q1 = q_coeff(im.problem, right.x) * f1;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2,
           h11 = t3 - t2;
    double f = h00 * f0 + h10 * h * p0 + h01 * f1 + h11 * h * p1;
    double fp = h00 * p0 + h10 * h * q0 + h01 * p1 + h11 * h * q1;
    return {f, fp, s};
}

HeadBasis build_basis(const SingularProblem& p, double z, const ShootOptions& opts) {
    SingularProblem q = shifted(p, z);
    HeadBasis basis{build_g1(q, opts.x_match, opts.series_tol), std::nullopt, 0.0, 0.0};
    basis.x_h = basis.g1.x_match();
    if (q.nu > 0.0) {
        basis.g2 = build_g2(q, basis.g1, opts.series_tol);
        basis.x_h = std::min(basis.x_h, basis.g2->x_match());
    }
    return basis;
}

HeadBasis build_basis_anchored(const SingularProblem& p, const BoundaryPair& bc, double z,
                               const ShootOptions& opts) {
    HeadBasis basis = build_basis(p, z, opts);
    // The boundary condition at the singular end is pinned by the
    // fundamental system of the shift-free problem (zshift = 0), whatever
    // route the total shift arrived by.
    const double total_shift = p.zshift + z;
    if (bc.theta0 > 0.0 && total_shift != 0.0 && p.nu > 0.0) {
        SingularProblem base0 = p;
        base0.zshift = 0.0;
        HeadBasis ref = build_basis(base0, 0.0, opts);
        SingularHead g10 = build_g1_on(base0, basis.g1, opts.series_tol);
        double x0z = basis.g2->x_match();
        double delta = rho_difference_integral(basis.g1, g10, x0z);
        double a0 = rho_weighted_integral(ref.g1, x0z, ref.g2->x_match());
        basis.kappa = -(delta - a0) / (2.0 * p.nu);
    }
    return basis;
}

NormalizedSolution normalized_phi(const SingularProblem& p, const BoundaryPair& bc, double z,
                                  const HeadBasis& basis, const ShootOptions& opts) {
    require_admissible(bc, p.nu);
    auto im = std::make_shared<NormalizedSolution::Impl>();
    im->problem = shifted(p, z);
    im->z_total = im->problem.zshift;
    im->x_h = basis.x_h;
    im->basis = std::make_shared<HeadBasis>(basis);
    im->have_coeffs = true;
    im->coeff_scale = 0.0;
    if (bc.theta0 == 0.0) {
        im->c1 = 1.0;
        im->c2 = 0.0;
    } else {
        // phi = 2 nu (cot(theta0) + kappa) g1 - 2 nu g2: kills B_{0,theta0}
        // in the unshifted convention and keeps leading coefficient one on
        // x^{-nu+1/2}.
        im->c1 = 2.0 * p.nu * (1.0 / std::tan(bc.theta0) + basis.kappa);
        im->c2 = -2.0 * p.nu;
    }
    const SingularHead& g1 = basis.g1;
    double f0 = im->c1 * g1.value(im->x_h), fp0 = im->c1 * g1.deriv(im->x_h);
    if (im->c2 != 0.0) {
        f0 += im->c2 * basis.g2->value(im->x_h);
        fp0 += im->c2 * basis.g2->deriv(im->x_h);
    }
    im->nodes = integrate(im->problem, im->x_h, 1.0, f0, fp0, 0.0, opts,
                          wronskian_points(im->x_h));
    NormalizedSolution tmp;
    tmp.impl = im;
    return tmp;
}

NormalizedSolution normalized_phi(const SingularProblem& p, const BoundaryPair& bc, double z,
                                  const ShootOptions& opts) {
    return normalized_phi(p, bc, z, build_basis_anchored(p, bc, z, opts), opts);
}

NormalizedSolution normalized_psi(const SingularProblem& p, const BoundaryPair& bc, double z,
                                  const HeadBasis& basis, const ShootOptions& opts) {
    require_admissible(bc, p.nu);
    auto im = std::make_shared<NormalizedSolution::Impl>();
    im->problem = shifted(p, z);
    im->z_total = im->problem.zshift;
    im->x_h = basis.x_h;
    im->basis = std::make_shared<HeadBasis>(basis);
    double f0, fp0;
    if (bc.theta1 == 0.0) {
        f0 = 0.0;
        fp0 = -1.0;  // psi ~ (1 - x)
    } else {
        f0 = 1.0;
        fp0 = -1.0 / std::tan(bc.theta1);
    }
    im->nodes = integrate(im->problem, 1.0, basis.x_h, f0, fp0, 0.0, opts,
                          wronskian_points(basis.x_h));

    // decompose against the singular basis at the hand-off point
    if (basis.g2) {
        const TraceNode& n = im->nodes.front();
        const SingularHead& g1 = basis.g1;
        const SingularHead& g2 = *basis.g2;
        double x = n.x;
        im->c1 = n.f * g2.deriv(x) - n.fp * g2.value(x);    //  W(psi, g2)
        im->c2 = -(n.f * g1.deriv(x) - n.fp * g1.value(x)); // -W(psi, g1)
        im->coeff_scale = n.logscale;
        im->have_coeffs = true;
    }
    NormalizedSolution tmp;
    tmp.impl = im;
    return tmp;
}

NormalizedSolution normalized_psi(const SingularProblem& p, const BoundaryPair& bc, double z,
                                  double x_low, const ShootOptions& opts) {
    ShootOptions o = opts;
    o.x_match = x_low;
    return normalized_psi(p, bc, z, build_basis(p, z, o), o);
}

double log_abs(const WronskianValue& w) { return std::log(std::abs(w.value)) + w.logscale; }

WronskianValue wronskian(const NormalizedSolution& phi, const NormalizedSolution& psi) {
    if (phi.impl->z_total != psi.impl->z_total)
        throw UsageError("wronskian requires solutions built for the same spectral shift");
    const double lo = std::max(phi.x_match(), psi.x_match());
    auto pts = wronskian_points(lo);
    const int n = 5;
    double m[n], s[n];
    double smax = -1e300;
    for (int k = 1; k <= n; ++k) {
        double x = pts[k - 1];
        Scaled a = phi.eval(x), b = psi.eval(x);
        m[k - 1] = b.f * a.fp - b.fp * a.f;  // W(psi, phi)
        s[k - 1] = a.logscale + b.logscale;
        smax = std::max(smax, s[k - 1]);
    }
    for (int k = 0; k < n; ++k) m[k] *= std::exp(s[k] - smax);
    double sorted[n];
    std::copy(m, m + n, sorted);
    std::sort(sorted, sorted + n);
    double med = sorted[n / 2];
    double dev = 0.0;
    for (int k = 0; k < n; ++k) dev = std::max(dev, std::abs(m[k] - med));
    double denom = std::max((smax < 700.0) ? std::exp(-smax) : 0.0, std::abs(med));
    double constancy = (denom > 0.0) ? dev / denom : 0.0;

    WronskianValue w{med, smax, constancy};
    if (constancy > 1e-6)
        throw NumericalError("Wronskian constancy violated: relative spread " +
                             num_str(constancy) + " exceeds 1e-6 (integrator inaccuracy)");
    return w;
}

SolutionPair solve_pair(const SingularProblem& p, const BoundaryPair& bc, double z,
                        const ShootOptions& opts) {
    HeadBasis basis = build_basis_anchored(p, bc, z, opts);
    NormalizedSolution phi = normalized_phi(p, bc, z, basis, opts);
    NormalizedSolution psi = normalized_psi(p, bc, z, basis, opts);
    WronskianValue w = wronskian(phi, psi);
    return SolutionPair{std::move(basis), std::move(phi), std::move(psi), w};
}

}  // namespace singdet
