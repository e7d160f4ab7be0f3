#include "singdet/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "cheb_panel.hpp"
#include "singdet/errors.hpp"

namespace singdet {

namespace detail {

constexpr int K = ChebBasis::K;
using Panel = std::array<double, K>;

struct GridData {
    double x_match = 0.0;
    int npanels = 0;
    std::vector<Panel> x;  // node coordinates, panel p ascending

    double lo(int p) const { return std::ldexp(x_match, -(npanels - p)); }
    double hi(int p) const { return std::ldexp(x_match, -(npanels - p - 1)); }

    // panel containing x (clamped to the grid range)
    int find(double x_) const {
        if (x_ >= hi(npanels - 1)) return npanels - 1;
        if (x_ <= lo(0)) return 0;
        int k = static_cast<int>(std::floor(std::log2(x_match / x_)));
        int p = npanels - 1 - k;
        if (p < 0) p = 0;
        if (p > npanels - 1) p = npanels - 1;
        while (p > 0 && x_ < lo(p)) --p;
        while (p < npanels - 1 && x_ > hi(p)) ++p;
        return p;
    }
};

struct HeadData {
    std::shared_ptr<const GridData> grid;
    double exponent = 0.0;
    double prefactor = 1.0;
    double x_match = 0.0;  // <= grid->x_match (g2 stops at x0)
    double tail = 0.0;
    int usable_panels = 0;
    std::vector<Panel> gt, dgt;
};

namespace {

std::shared_ptr<GridData> make_grid(double x_match, int extra_depth = 0) {
    auto g = std::make_shared<GridData>();
    g->x_match = x_match;
    g->npanels =
        std::max(6, static_cast<int>(std::ceil(std::log2(x_match / 1e-8)))) + extra_depth;
    const auto& B = ChebBasis::get();
    g->x.resize(g->npanels);
    for (int p = 0; p < g->npanels; ++p) {
        double a = g->lo(p), b = g->hi(p), c = 0.5 * (a + b), r = 0.5 * (b - a);
        for (int i = 0; i < K; ++i) g->x[p][i] = c + r * B.t[i];
        g->x[p][0] = a;
        g->x[p][K - 1] = b;
    }
    return g;
}

// Cumulative integral of `vals` within one panel from its left edge.
void panel_cumulative(const ChebBasis& B, double half_width, const Panel& vals, Panel& out) {
    for (int i = 0; i < K; ++i) {
        double s = 0.0;
        for (int j = 0; j < K; ++j) s += B.cum[i][j] * vals[j];
        out[i] = half_width * s;
    }
}

double eval_on(const HeadData& h, const std::vector<Panel>& field, double x) {
    const GridData& g = *h.grid;
    int pmax = h.usable_panels - 1;
    int p = std::min(g.find(x), pmax);
    double a = g.lo(p), b = g.hi(p);
    if (x <= g.lo(0)) return field[0][0];  // below the grid: gt ~ gt(x_lo)
    double s = (2.0 * x - a - b) / (b - a);
    return bary_eval(ChebBasis::get(), field[p].data(), std::clamp(s, -1.0, 1.0));
}

std::string num_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

double factorial_tail(double r, int n) {
    // sum_{m > n} r^m / m!
    double term = 1.0;
    for (int m = 1; m <= n; ++m) term *= r / m;
    double tail = 0.0;
    for (int m = n + 1; m <= n + 200; ++m) {
        term *= r / m;
        tail += term;
        if (term < 1e-18 * (tail + 1e-300)) break;
    }
    return tail;
}

struct VCache {
    std::vector<Panel> v;      // effective potential at nodes
    double grid_int_absV = 0;  // int |V| over the grid
    double stub_absV = 0;      // bound on int_0^{x_lo} |V|
    double grid_int_absVlog = 0, stub_absVlog = 0;
    // below-grid model V(y) ~ v_lo (y/x_lo)^{p}; p = 0 when no stable fit
    double v_lo = 0.0, p_lo = 0.0;
};

VCache cache_potential(const SingularProblem& prob, const GridData& g, const ChebBasis& B) {
    VCache c;
    c.v.resize(g.npanels);
    double first_panel_absV = 0, second_panel_absV = 0;
    double first_panel_absVlog = 0, second_panel_absVlog = 0;
    for (int p = 0; p < g.npanels; ++p) {
        Panel absv, absvlog, cum;
        for (int i = 0; i < K; ++i) {
            double x = g.x[p][i];
            double val = potential_value(prob, x);
            c.v[p][i] = val;
            absv[i] = std::abs(val);
            absvlog[i] = std::abs(val * std::log(x));
        }
        double hw = 0.5 * (g.hi(p) - g.lo(p));
        panel_cumulative(B, hw, absv, cum);
        double ia = cum[K - 1];
        panel_cumulative(B, hw, absvlog, cum);
        double il = cum[K - 1];
        c.grid_int_absV += ia;
        c.grid_int_absVlog += il;
        if (p == 0) first_panel_absV = ia, first_panel_absVlog = il;
        if (p == 1) second_panel_absV = ia, second_panel_absVlog = il;
    }
    // Stub [0, x_lo]: extrapolate the dyadic decay of the panel integrals.
    auto stub = [](double s0, double s1) {
        if (s0 <= 0.0) return 0.0;
        double ratio = s0 / std::max(s1, 1e-300);
        if (ratio >= 0.95)
            throw NumericalError(
                "potential quadrature near 0 failed: panel integrals of |V| do not decay "
                "(ratio " + std::to_string(ratio) + "); V may not be integrable");
        return s0 * ratio / (1.0 - ratio);
    };
    c.stub_absV = stub(first_panel_absV, second_panel_absV);
    c.stub_absVlog = stub(first_panel_absVlog, second_panel_absVlog);
    // local power-law fit at the two innermost nodes, so the cumulative
    // carries can start from the analytic below-grid piece instead of 0
    double v0 = c.v[0][0], v1 = c.v[0][1];
    c.v_lo = v0;
    if (v0 != 0.0 && v1 != 0.0 && (v0 > 0.0) == (v1 > 0.0)) {
        double p = std::log(v1 / v0) / std::log(g.x[0][1] / g.x[0][0]);
        if (p > -0.95 && p < 8.0) c.p_lo = p;
    }
    return c;
}

}  // namespace
}  // namespace detail

using detail::ChebBasis;
using detail::HeadData;
using detail::K;
using detail::Panel;

double SingularHead::exponent() const { return data->exponent; }
double SingularHead::prefactor() const { return data->prefactor; }
double SingularHead::x_match() const { return data->x_match; }
double SingularHead::tail_bound() const { return data->tail; }

double SingularHead::gt(double x) const { return detail::eval_on(*data, data->gt, x); }
double SingularHead::gt_prime(double x) const { return detail::eval_on(*data, data->dgt, x); }

double SingularHead::value(double x) const {
    return data->prefactor * std::pow(x, data->exponent) * gt(x);
}

double SingularHead::deriv(double x) const {
    double u = gt(x), du = gt_prime(x);
    return data->prefactor * std::pow(x, data->exponent) * (data->exponent * u / x + du);
}

namespace {
SingularHead build_g1_impl(const SingularProblem& p, double x_match, double tol,
                           std::shared_ptr<const detail::GridData> fixed_grid);
}

SingularHead build_g1(const SingularProblem& p, double x_match, double tol) {
    return build_g1_impl(p, x_match, tol, nullptr);
}

SingularHead build_g1_on(const SingularProblem& p, const SingularHead& grid_donor, double tol) {
    return build_g1_impl(p, grid_donor.x_match(), tol, grid_donor.data->grid);
}

namespace {
SingularHead build_g1_impl(const SingularProblem& p, double x_match, double tol,
                           std::shared_ptr<const detail::GridData> fixed_grid) {
    if (!(x_match > 0.0 && x_match < 1.0)) throw UsageError("build_g1 requires 0 < x_match < 1");
    if (!(tol > 0.0)) throw UsageError("build_g1 requires tol > 0");
    const auto& B = ChebBasis::get();
    const double nu = p.nu;
    const double two_nu = 2.0 * nu;

    double xm = x_match;
    int extra_depth = 0;
    std::shared_ptr<const detail::GridData> grid;
    detail::VCache vc;
    double rate = 0.0;  // contraction parameter entering the factorial bound
    for (;;) {
        grid = fixed_grid ? fixed_grid : detail::make_grid(xm, extra_depth);
        vc = detail::cache_potential(p, *grid, B);
        rate = (nu > 0.0) ? (vc.grid_int_absV + vc.stub_absV) / nu
                          : 2.0 * (vc.grid_int_absVlog + vc.stub_absVlog);
        double stub_rate = (nu > 0.0) ? vc.stub_absV / nu : 2.0 * vc.stub_absVlog;
        if (fixed_grid) {
            if (detail::factorial_tail(rate, 12) + stub_rate * std::exp(rate) > tol)
                throw NumericalError("build_g1_on: the donated grid cannot certify the tolerance");
            break;
        }
        // the below-grid stub enters the certificate directly; deepen the
        // grid until it is negligible against tol
        if (stub_rate * std::exp(rate) > 0.25 * tol && extra_depth < 130) {
            extra_depth += 10;
            continue;
        }
        if (detail::factorial_tail(rate, 12) < 0.5 * tol) break;
        xm *= 0.5;
        if (xm < 1e-7)
            throw NumericalError("Volterra iteration cannot certify tolerance " +
                                 detail::num_str(tol) + "; achieved bound " +
                                 detail::num_str(detail::factorial_tail(rate, 12)) + " at x_match " +
                                 detail::num_str(xm * 2.0));
    }

    const int J = grid->npanels;
    std::vector<Panel> phi(J), A(J), Bt(J), Cc(J);
    for (auto& pl : phi) pl.fill(0.0);

    const double pow_ab = std::pow(0.5, two_nu);  // (a/b)^{2 nu} for dyadic panels
    std::vector<Panel> wpow(J);                   // (x/b)^{2 nu} per node
    if (nu > 0.0)
        for (int q = 0; q < J; ++q)
            for (int i = 0; i < K; ++i) wpow[q][i] = std::pow(grid->x[q][i] / grid->hi(q), two_nu);

    // int_0^{x_lo} y^{s} V(y) dy under the below-grid power model
    const double x_lo = grid->lo(0);
    auto stub_moment = [&](double s_exp) {
        return vc.v_lo * x_lo / (vc.p_lo + s_exp + 1.0);
    };
    int iters = 0;
    auto sweep = [&](const std::vector<Panel>& phi_in, std::vector<Panel>& phi_out) {
        double carryA = stub_moment(0.0);
        double carryB = (nu > 0.0) ? stub_moment(two_nu) : 0.0;  // already x^{-2nu}-scaled
        double carryC =
            (nu > 0.0) ? 0.0
                       : vc.v_lo * x_lo * (std::log(x_lo) - 1.0 / (vc.p_lo + 1.0)) /
                             (vc.p_lo + 1.0);
        Panel r, w, cum;
        for (int q = 0; q < J; ++q) {
            const double hw = 0.5 * (grid->hi(q) - grid->lo(q));
            for (int i = 0; i < K; ++i) r[i] = vc.v[q][i] * (1.0 + phi_in[q][i]);
            detail::panel_cumulative(B, hw, r, cum);
            for (int i = 0; i < K; ++i) A[q][i] = carryA + cum[i];
            carryA = A[q][K - 1];
            if (nu > 0.0) {
                for (int i = 0; i < K; ++i) w[i] = wpow[q][i] * r[i];
                detail::panel_cumulative(B, hw, w, cum);
                for (int i = 0; i < K; ++i)
                    Bt[q][i] = (pow_ab * carryB + cum[i]) / wpow[q][i];
                carryB = pow_ab * carryB + cum[K - 1];
                for (int i = 0; i < K; ++i) phi_out[q][i] = (A[q][i] - Bt[q][i]) / two_nu;
            } else {
                for (int i = 0; i < K; ++i) w[i] = std::log(grid->x[q][i]) * r[i];
                detail::panel_cumulative(B, hw, w, cum);
                for (int i = 0; i < K; ++i) Cc[q][i] = carryC + cum[i];
                carryC = Cc[q][K - 1];
                for (int i = 0; i < K; ++i)
                    phi_out[q][i] = std::log(grid->x[q][i]) * A[q][i] - Cc[q][i];
            }
        }
    };

    std::vector<Panel> next(J);
    double tail = 0.0;
    for (iters = 1; iters <= 12; ++iters) {
        sweep(phi, next);
        std::swap(phi, next);
        tail = detail::factorial_tail(rate, iters);
        if (tail < 0.5 * tol) break;
    }
    // one consistency pass; also provides the derivative data
    sweep(phi, next);
    double residual = 0.0, phimax = 0.0;
    for (int q = 0; q < J; ++q)
        for (int i = 0; i < K; ++i) {
            residual = std::max(residual, std::abs(next[q][i] - phi[q][i]));
            phimax = std::max(phimax, std::abs(next[q][i]));
        }
    std::swap(phi, next);

    double stub_rate = (nu > 0.0) ? vc.stub_absV / nu : 2.0 * vc.stub_absVlog;
    double tail_bound = tail + residual + stub_rate * std::exp(rate) * (1.0 + phimax) +
                        5e-15 * (1.0 + phimax);
    if (tail_bound > tol)
        throw NumericalError("Volterra iteration reached the cap with certified bound " +
                             detail::num_str(tail_bound) + " > tol " + detail::num_str(tol));

    auto hd = std::make_shared<HeadData>();
    hd->grid = grid;
    hd->exponent = nu + 0.5;
    hd->prefactor = 1.0;
    hd->x_match = grid->x_match;
    hd->tail = tail_bound;
    hd->usable_panels = J;
    hd->gt.resize(J);
    hd->dgt.resize(J);
    for (int q = 0; q < J; ++q)
        for (int i = 0; i < K; ++i) {
            hd->gt[q][i] = 1.0 + phi[q][i];
            hd->dgt[q][i] =
                (nu > 0.0 ? Bt[q][i] : A[q][i]) / grid->x[q][i];  // phi'(x)
        }
    SingularHead head;
    head.data = hd;
    return head;
}
}  // namespace

SingularHead build_g2(const SingularProblem& p, const SingularHead& g1, double tol) {
    if (!(p.nu > 0.0))
        throw UsageError("build_g2 requires nu > 0 (the log branch has no second solution here)");
    const auto& B = ChebBasis::get();
    const HeadData& h1 = *g1.data;
    const detail::GridData& grid = *h1.grid;
    const double nu = p.nu, two_nu = 2.0 * nu;

    // x0: largest panel endpoint below which |gt1| stays >= 1/2.
    int usable = 0;
    double running_min = 1e300;
    for (int q = 0; q < grid.npanels; ++q) {
        for (int i = 0; i < K; ++i) running_min = std::min(running_min, std::abs(h1.gt[q][i]));
        if (running_min >= 0.5)
            usable = q + 1;
        else
            break;
    }
    if (usable == 0)
        throw NumericalError("g1 regular factor leaves [1/2, inf) immediately; "
                             "choose a smaller x_match for build_g1");

    // T(x) = x^{2 nu} int_x^{x0} y^{-2 nu} rho(y) dy,  rho = (gt1^{-2})'.
    std::vector<Panel> rho(usable), T(usable);
    for (int q = 0; q < usable; ++q)
        for (int i = 0; i < K; ++i) {
            double u = h1.gt[q][i], du = h1.dgt[q][i];
            rho[q][i] = -2.0 * du / (u * u * u);
        }
    double carryE = 0.0;  // b^{2nu} int_b^{x0} y^{-2nu} rho dy at panel right edge
    const double pow_ab = std::pow(0.5, two_nu);
    for (int q = usable - 1; q >= 0; --q) {
        const double b = grid.hi(q), hw = 0.5 * (b - grid.lo(q));
        Panel w, cum;
        for (int i = 0; i < K; ++i)
            w[i] = std::pow(b / grid.x[q][i], two_nu) * rho[q][i];
        detail::panel_cumulative(B, hw, w, cum);
        const double full = cum[K - 1];
        for (int i = 0; i < K; ++i) {
            double cum_right = full - cum[i];  // int_{x_i}^{b} w dy
            T[q][i] = std::pow(grid.x[q][i] / b, two_nu) * (cum_right + carryE);
        }
        carryE = pow_ab * (full + carryE);
    }

    auto hd = std::make_shared<HeadData>();
    hd->grid = h1.grid;
    hd->exponent = -nu + 0.5;
    hd->prefactor = -1.0 / two_nu;
    hd->x_match = grid.hi(usable - 1);
    hd->tail = 3.0 * h1.tail + tol;
    hd->usable_panels = usable;
    hd->gt.resize(usable);
    hd->dgt.resize(usable);
    for (int q = 0; q < usable; ++q)
        for (int i = 0; i < K; ++i) {
            double u = h1.gt[q][i], du = h1.dgt[q][i], x = grid.x[q][i];
            double fhat = 1.0 / (u * u) + T[q][i];
            hd->gt[q][i] = u * fhat;                            // gt2
            hd->dgt[q][i] = du * fhat + u * (two_nu / x) * T[q][i];
        }
    SingularHead head;
    head.data = hd;

    // Off-node Wronskian spot check: catches quadrature or interpolation
    // breakdown (at the nodes the identity holds by construction).
    double worst = 0.0;
    for (int q = 0; q < usable; ++q) {
        double a = grid.lo(q), b = grid.hi(q);
        double x = a + 0.37 * (b - a);
        double u = g1.gt(x), du = g1.gt_prime(x);
        double v = head.gt(x), dv = head.gt_prime(x);
        double w = u * v - (x / two_nu) * (u * dv - du * v);
        worst = std::max(worst, std::abs(w - 1.0));
    }
    if (worst > std::max(1e3 * tol, 1e-9))
        throw NumericalError("second solution failed the Wronskian identity check: |W-1| = " +
                             detail::num_str(worst));
    return head;
}

double head_pair_integral(const SingularHead& a, const SingularHead& b, double upto) {
    const HeadData& ha = *a.data;
    const HeadData& hb = *b.data;
    if (ha.grid != hb.grid) throw UsageError("head_pair_integral requires heads on one grid");
    const detail::GridData& grid = *ha.grid;
    const double s = ha.exponent + hb.exponent;
    if (s <= -0.999) throw UsageError("head_pair_integral: product is not integrable at 0");
    const auto& B = ChebBasis::get();

    int pend = std::min(ha.usable_panels, hb.usable_panels);
    double total = 0.0;
    bool covered = false;
    for (int q = 0; q < pend; ++q) {
        if (grid.hi(q) > upto * (1.0 + 1e-12)) {
            if (std::abs(grid.lo(q) - upto) > 1e-9 * upto)
                throw UsageError("head_pair_integral: upto must be a panel endpoint");
            covered = true;
            break;
        }
        Panel w, cum;
        const double hw = 0.5 * (grid.hi(q) - grid.lo(q));
        for (int i = 0; i < K; ++i)
            w[i] = std::pow(grid.x[q][i], s) * ha.gt[q][i] * hb.gt[q][i];
        detail::panel_cumulative(B, hw, w, cum);
        total += cum[K - 1];
        if (std::abs(grid.hi(q) - upto) <= 1e-12 * upto) {
            covered = true;
            break;
        }
    }
    if (!covered && upto > grid.hi(pend - 1) * (1.0 + 1e-12))
        throw UsageError("head_pair_integral: upto exceeds the usable head range");
    // stub below the grid
    double x0 = grid.lo(0);
    total += ha.gt[0][0] * hb.gt[0][0] * std::pow(x0, s + 1.0) / (s + 1.0);
    return ha.prefactor * hb.prefactor * total;
}

namespace {

int endpoint_panel(const detail::GridData& g, double x, const char* who) {
    for (int q = 0; q <= g.npanels; ++q) {
        double e = (q == 0) ? g.lo(0) : g.hi(q - 1);
        if (std::abs(e - x) <= 1e-9 * x) return q;  // x == left edge of panel q
    }
    throw UsageError(std::string(who) + ": endpoint is not a panel endpoint of the head grid");
}

double rho_at(const HeadData& h, int q, int i) {
    double u = h.gt[q][i], du = h.dgt[q][i];
    return -2.0 * du / (u * u * u);
}

}  // namespace

double rho_weighted_integral(const SingularHead& g1, double a, double b) {
    if (a == b) return 0.0;
    if (a > b) return -rho_weighted_integral(g1, b, a);
    const HeadData& h = *g1.data;
    const detail::GridData& grid = *h.grid;
    const double nu = h.exponent - 0.5, two_nu = 2.0 * nu;
    const auto& B = ChebBasis::get();
    int qa = endpoint_panel(grid, a, "rho_weighted_integral");
    int qb = endpoint_panel(grid, b, "rho_weighted_integral");
    if (qb > h.usable_panels)
        throw UsageError("rho_weighted_integral: range exceeds the head's usable panels");
    double total = 0.0;
    for (int q = qa; q < qb; ++q) {
        Panel w, cum;
        const double pb = grid.hi(q), hw = 0.5 * (pb - grid.lo(q));
        for (int i = 0; i < K; ++i)
            w[i] = std::pow(pb / grid.x[q][i], two_nu) * rho_at(h, q, i);
        detail::panel_cumulative(B, hw, w, cum);
        total += cum[K - 1] * std::pow(pb, -two_nu);
    }
    return total;
}

double rho_difference_integral(const SingularHead& g1z, const SingularHead& g10, double upto) {
    const HeadData& hz = *g1z.data;
    const HeadData& h0 = *g10.data;
    if (hz.grid != h0.grid)
        throw UsageError("rho_difference_integral requires heads on one grid");
    const detail::GridData& grid = *hz.grid;
    const double nu = hz.exponent - 0.5, two_nu = 2.0 * nu;
    const auto& B = ChebBasis::get();
    int qe = endpoint_panel(grid, upto, "rho_difference_integral");
    double total = 0.0;
    for (int q = 0; q < qe; ++q) {
        Panel w, cum;
        const double pb = grid.hi(q), hw = 0.5 * (pb - grid.lo(q));
        for (int i = 0; i < K; ++i)
            w[i] = std::pow(pb / grid.x[q][i], two_nu) * (rho_at(hz, q, i) - rho_at(h0, q, i));
        detail::panel_cumulative(B, hw, w, cum);
        total += cum[K - 1] * std::pow(pb, -two_nu);
    }
    // below-grid stub from the measured linear slope of the difference
    double x_first = grid.x[0][0];
    double slope = (rho_at(hz, 0, 0) - rho_at(h0, 0, 0)) / x_first;
    total += slope * std::pow(grid.lo(0), 2.0 - two_nu) / (2.0 - two_nu);
    return total;
}

}  // namespace singdet
