#include "singdet/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "singdet/config.hpp"
#include "singdet/determinant.hpp"
#include "singdet/oracle.hpp"
#include "singdet/regint.hpp"

namespace singdet::cli {

namespace {

std::string fmt(double v) {
    // shortest representation that reparses to the same double
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

struct Flags {
    std::optional<double> nu, theta0, theta1, z, tol, lambda_max;
    std::optional<std::string> potential;
    std::string file, out;
    int count = 5;
    bool serial = false;
    std::string theta1_grid, z_grid;
    bool fit = false;
};

struct RunConfig {
    SingularProblem problem;
    BoundaryPair bc;
    Settings settings;
    ShootOptions shoot;
    Exec exec = Exec::OpenMP;
    std::string out_path;
};

RunConfig build_config(const Flags& f) {
    double nu = 0.5, theta0 = 0.0, theta1 = 0.0;
    std::string potential = "0";
    std::optional<double> tol = f.tol;
    if (!f.file.empty()) {
        ProblemFile pf = load_problem_file(f.file);
        nu = pf.problem.nu;
        potential = pf.problem.potential.to_string();
        theta0 = pf.bc.theta0;
        theta1 = pf.bc.theta1;
        if (!tol && pf.tol) tol = pf.tol;
    }
    // inline flags override file values
    if (f.nu) nu = *f.nu;
    if (f.potential) potential = *f.potential;
    if (f.theta0) theta0 = *f.theta0;
    if (f.theta1) theta1 = *f.theta1;

    RunConfig cfg;
    cfg.problem = make_problem(nu, Expr::parse(potential));
    cfg.bc = make_boundary(theta0, theta1);
    if (tol) cfg.settings.scale_tolerances(*tol);
    cfg.shoot.x_match = cfg.settings.x_match;
    cfg.shoot.series_tol = cfg.settings.series_tol;
    cfg.shoot.rel_tol = cfg.settings.rk_rel_tol;
    cfg.shoot.abs_tol = cfg.settings.rk_abs_tol;
    cfg.exec = f.serial ? Exec::Serial : Exec::OpenMP;
    cfg.out_path = f.out;
    return cfg;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open output file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

std::vector<double> parse_grid(const std::string& spec) {
    // "lo:hi:n"
    double lo, hi;
    int n;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 1)
        throw UsageError("grid must be of the form lo:hi:count, got '" + spec + "'");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1.0);
    return g;
}

int cmd_det(const RunConfig& cfg, const Flags& f) {
    DetResult r = f.z ? char_function(cfg.problem, cfg.bc, *f.z, cfg.shoot)
                      : zeta_det(cfg.problem, cfg.bc, cfg.shoot);
    std::printf("det       = %.12g\n", r.value);
    std::printf("log|det|  = %.12g\n", r.log_value);
    std::printf("mu0 = %g  mu1 = %g  prefactor = %.12g\n", r.mu0, r.mu1, r.prefactor);
    std::printf("wronskian = %.12g (logscale %.6g, constancy %.3g)\n", r.wronskian.value,
                r.wronskian.logscale, r.wronskian.constancy_dev);
    if (!cfg.out_path.empty())
        write_csv(cfg.out_path, {"det", "log_det", "mu0", "mu1", "wronskian", "w_logscale"},
                  {{fmt(r.value), fmt(r.log_value), fmt(r.mu0), fmt(r.mu1),
                    fmt(r.wronskian.value), fmt(r.wronskian.logscale)}});
    return 0;
}

int cmd_eig(const RunConfig& cfg, const Flags& f) {
    double lmax = f.lambda_max ? *f.lambda_max : 4000.0;
    EigenList list = eigenvalues(cfg.problem, cfg.bc, f.count, lmax,
                                 cfg.settings.eigen_scan_min, cfg.exec, cfg.shoot);
    std::printf("# k lambda bracket_lo bracket_hi residual\n");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < list.values.size(); ++k) {
        const auto& e = list.values[k];
        std::printf("%zu %.12g %.12g %.12g %.3g\n", k + 1, e.lambda, e.bracket_lo, e.bracket_hi,
                    e.residual);
        rows.push_back({fmt(static_cast<double>(k + 1)), fmt(e.lambda), fmt(e.bracket_lo),
                        fmt(e.bracket_hi), fmt(e.residual)});
    }
    if (!list.complete)
        std::printf("# partial: only %zu of %d zeros found below lambda_max = %g\n",
                    list.values.size(), f.count, lmax);
    if (!cfg.out_path.empty())
        write_csv(cfg.out_path, {"k", "lambda", "bracket_lo", "bracket_hi", "residual"}, rows);
    return 0;
}

int cmd_trace(const RunConfig& cfg, const Flags& f) {
    double z = f.z ? *f.z : 1.0;
    double tr = resolvent_trace(cfg.problem, cfg.bc, z, cfg.shoot);
    std::printf("trace(z=%g) = %.12g\n", z, tr);
    if (cfg.problem.potential.is_literal_zero() && cfg.bc.theta0 == 0.0 && z > 0.0) {
        double oracle = model_trace_oracle(cfg.problem.nu, cfg.bc.theta1, z);
        std::printf("model oracle = %.12g (gap %.3g)\n", oracle, std::abs(tr - oracle));
    }
    if (f.fit) {
        std::vector<double> zs;
        for (int i = 0; i < 9; ++i) zs.push_back(1e2 * std::pow(10.0, i * 0.5));
        TraceFit fit = fit_trace_asymptotics(cfg.problem, cfg.bc, zs, cfg.exec, cfg.shoot);
        std::printf("fit: a = %.8g  b = %.8g  residual = %.3g\n", fit.a, fit.b, fit.residual);
        std::printf("expected: a = 0.5  b = %.8g\n",
                    -0.5 * (mu0(cfg.bc.theta0, cfg.problem.nu) + mu1(cfg.bc.theta1)));
    }
    if (!cfg.out_path.empty())
        write_csv(cfg.out_path, {"z", "trace"}, {{fmt(z), fmt(tr)}});
    return 0;
}

int cmd_contour(const RunConfig& cfg, const Flags&) {
    ContourOptions copts;
    copts.cutoff = cfg.settings.contour_cutoff;
    double via_contour = zeta_det_contour(cfg.problem, cfg.bc, cfg.exec, cfg.shoot, copts);
    DetResult via_wronskian = zeta_det(cfg.problem, cfg.bc, cfg.shoot);
    double gap = std::abs(via_contour - via_wronskian.value) /
                 std::max(1e-300, std::abs(via_wronskian.value));
    std::printf("det (contour integral) = %.12g\n", via_contour);
    std::printf("det (wronskian)        = %.12g\n", via_wronskian.value);
    std::printf("relative gap           = %.3g\n", gap);
    if (!cfg.out_path.empty())
        write_csv(cfg.out_path, {"det_contour", "det_wronskian", "rel_gap"},
                  {{fmt(via_contour), fmt(via_wronskian.value), fmt(gap)}});
    return 0;
}

int cmd_scan(const RunConfig& cfg, const Flags& f) {
    if (f.theta1_grid.empty() == f.z_grid.empty())
        throw UsageError("scan requires exactly one of --theta1-grid or --z-grid");
    bool sweep_theta = !f.theta1_grid.empty();
    std::vector<double> grid = parse_grid(sweep_theta ? f.theta1_grid : f.z_grid);

    std::vector<std::vector<std::string>> rows(grid.size());
    parallel_for(cfg.exec, grid.size(), [&](std::size_t i) {
        std::vector<std::string> row;
        row.push_back(fmt(grid[i]));
        try {
            DetResult r = sweep_theta
                              ? zeta_det(cfg.problem, make_boundary(cfg.bc.theta0, grid[i]),
                                         cfg.shoot)
                              : char_function(cfg.problem, cfg.bc, grid[i], cfg.shoot);
            row.push_back(fmt(r.value));
            row.push_back(fmt(r.wronskian.value * std::exp(std::min(r.wronskian.logscale, 700.0))));
            row.push_back(fmt(r.mu0));
            row.push_back(fmt(r.mu1));
            row.push_back("ok");
        } catch (const std::exception& e) {
            row.resize(1);
            row.insert(row.end(), {"", "", "", "", std::string("error: ") + e.what()});
        }
        rows[i] = row;
    });

    std::vector<std::string> header = {sweep_theta ? "theta1" : "z", "det", "wronskian", "mu0",
                                       "mu1", "status"};
    for (std::size_t i = 0; i < header.size(); ++i)
        std::printf("%s%s", header[i].c_str(), i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            std::printf("%s%s", row[i].c_str(), i + 1 < row.size() ? "," : "\n");
    if (!cfg.out_path.empty()) write_csv(cfg.out_path, header, rows);
    return 0;
}

int cmd_check(const RunConfig& cfg, const Flags&) {
    std::printf("nu = %g, potential = %s\n", cfg.problem.nu,
                cfg.problem.potential.to_string().c_str());
    std::printf("admissible(theta0=%g, theta1=%g): %s\n", cfg.bc.theta0, cfg.bc.theta1,
                admissible(cfg.bc, cfg.problem.nu) ? "yes" : "no");
    if (admissible(cfg.bc, cfg.problem.nu)) {
        MuInvariants mu = mu_invariants(cfg.problem, cfg.bc);
        std::printf("mu0 = %g, mu1 = %g\n", mu.mu0, mu.mu1);
    }
    ClassReport rep = check_class(cfg.problem);
    std::printf("int_0^1 |V log x| dx ~= %.6g\n", rep.integral_estimate);
    std::printf("potential class check: %s%s%s\n", rep.converged ? "pass" : "FAIL (advisory)",
                rep.note.empty() ? "" : " - ", rep.note.c_str());
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"singdet: zeta-regularized determinants of regular singular "
                 "Sturm-Liouville operators on [0,1]"};
    app.require_subcommand(0, 1);
    Flags f;
    bool show_config = false;
    app.add_flag("--show-config", show_config, "print the numerical defaults and exit");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--nu", f.nu, "singularity order nu >= 0");
        sub->add_option("--potential", f.potential, "potential V(x) (numerator of V/x)");
        sub->add_option("--theta0", f.theta0, "boundary angle at the singular end, [0, pi)");
        sub->add_option("--theta1", f.theta1, "boundary angle at the regular end, [0, pi)");
        sub->add_option("--file", f.file, "problem JSON file (inline flags override)");
        sub->add_option("--out", f.out, "write results as CSV");
        sub->add_option("--tol", f.tol, "series tolerance override");
        sub->add_flag("--serial", f.serial, "disable OpenMP batch kernels");
    };

    CLI::App* det = app.add_subcommand("det", "zeta-regularized determinant");
    add_common(det);
    det->add_option("--z", f.z, "evaluate det(H + z) instead of det(H)");

    CLI::App* eig = app.add_subcommand("eig", "eigenvalues as Wronskian zeros");
    add_common(eig);
    eig->add_option("--count", f.count, "number of eigenvalues");
    eig->add_option("--lambda-max", f.lambda_max, "scan ceiling");

    CLI::App* trace = app.add_subcommand("trace", "resolvent trace Tr (H+z)^{-1}");
    add_common(trace);
    trace->add_option("--z", f.z, "spectral shift (default 1)");
    trace->add_flag("--fit", f.fit, "fit the large-z asymptotics a/sqrt(z) + b/z");

    CLI::App* contour = app.add_subcommand("contour",
                                           "determinant via the contour-integral oracle");
    add_common(contour);

    CLI::App* scan = app.add_subcommand("scan", "sweep theta1 or z; emits CSV");
    add_common(scan);
    scan->add_option("--theta1-grid", f.theta1_grid, "lo:hi:count sweep of theta1");
    scan->add_option("--z-grid", f.z_grid, "lo:hi:count sweep of z");

    CLI::App* check = app.add_subcommand("check", "parse, admissibility and class report");
    add_common(check);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (show_config && app.get_subcommands().empty()) {
            std::printf("%s", Settings{}.dump().c_str());
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::fprintf(stderr, "%s", app.help().c_str());
            return 1;
        }
        CLI::App* sub = app.get_subcommands().front();
        RunConfig cfg = build_config(f);
        if (show_config) std::printf("%s", cfg.settings.dump().c_str());
        if (sub == det) return cmd_det(cfg, f);
        if (sub == eig) return cmd_eig(cfg, f);
        if (sub == trace) return cmd_trace(cfg, f);
        if (sub == contour) return cmd_contour(cfg, f);
        if (sub == scan) return cmd_scan(cfg, f);
        if (sub == check) return cmd_check(cfg, f);
        return 1;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace singdet::cli
