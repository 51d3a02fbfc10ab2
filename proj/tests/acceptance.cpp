// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Tolerances are pinned here, not configurable.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spherepde/dfs.hpp"
#include "spherepde/fourier.hpp"
#include "spherepde/linsolve.hpp"
#include "spherepde/phi_functions.hpp"
#include "spherepde/problems.hpp"
#include "spherepde/timesteppers.hpp"

using namespace spherepde;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s  --  %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double xm = 0, ym = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= x.size();
    ym /= y.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - xm) * (y[i] - ym);
        den += (x[i] - xm) * (x[i] - xm);
    }
    return num / den;
}

char buf[512];

// 1. Worked-example exactness of T_sin2 at m = 6.
void criterion_1() {
    const BandedCornerMatrix t = build_tsin2(6);
    CMatrix want(6, 6);
    want << 0.5, 0, -0.25, 0, -0.25, 0,  //
        0, 0.5, 0, -0.25, 0, 0,          //
        -0.125, 0, 0.5, 0, -0.25, 0,     //
        0, -0.25, 0, 0.5, 0, -0.25,      //
        -0.125, 0, -0.25, 0, 0.5, 0,     //
        0, 0, 0, -0.25, 0, 0.5;
    bool pass = (t.dense() - want).cwiseAbs().maxCoeff() == 0.0;

    CVector c(6), d(6), wrong(6), out(6);
    c << 0, 0, 0.5, 0, 0.5, 0;
    d << -0.25, 0, 0.125, 0, 0.125, 0;
    wrong << -0.125, 0, 0.125, 0, 0.125, 0;
    t.apply(c.data(), out.data());
    pass = pass && (out - d).cwiseAbs().maxCoeff() == 0.0;
    naive_msin2(6).apply(c.data(), out.data());
    pass = pass && (out - wrong).cwiseAbs().maxCoeff() == 0.0;
    report(1, "worked-example exactness (m=6)", pass, pass ? "entrywise exact" : "mismatch");
}

// 2. Poisson spectral accuracy on the Cheong family at m = n = 128.
void criterion_2() {
    const GridSpec spec{128, 128};
    double worst_e = 0.0, worst_p = 0.0;
    for (int l = 1; l <= 32; ++l) {
        SphereFunction f = SphereFunction::from_evaluator([l](double la, double th) {
            const double sl = std::pow(std::sin(th), l);
            return Complex(l * (l + 1.0) * sl * std::cos(l * la) +
                               (l + 1.0) * (l + 2.0) * std::cos(th) * sl * std::cos(l * la),
                           0.0);
        });
        SphereFunction uex = SphereFunction::from_evaluator([l](double la, double th) {
            const double sl = std::pow(std::sin(th), l);
            return Complex(-sl * std::cos(l * la) - std::cos(th) * sl * std::cos(l * la), 0.0);
        });
        const CoeffGrid u = solve_poisson(f.to_coeffs(spec));
        worst_e = std::max(worst_e, relative_error(u, uex.to_coeffs(spec)));
        worst_p = std::max(worst_p, pole_residual(u));
    }
    const bool pass = worst_e <= 1e-8 && worst_p <= 1e-8;
    std::snprintf(buf, sizeof(buf), "max E = %.3e, max P = %.3e (l = 1..32)", worst_e, worst_p);
    report(2, "Poisson spectral accuracy (Cheong family, 128x128)", pass, buf);
}

// 3. Poisson on a spherical-harmonic right-hand side.
void criterion_3() {
    const GridSpec spec{64, 64};
    const CoeffGrid f = spherical_harmonic(7, 3, spec);
    const CoeffGrid u = solve_poisson(f);
    const CoeffGrid want{-f.data / 56.0};
    const double err = relative_error(u, want);
    std::snprintf(buf, sizeof(buf), "E = %.3e", err);
    report(3, "Poisson eigenfunction (Y_7^3, 64x64)", err <= 1e-10, buf);
}

// 4. Heat h^4 convergence with IMEX-BDF4 and ETDRK4-CF startup.
void criterion_4() {
    const GridSpec spec{64, 64};
    const ProblemSpec problem = builtin_problem("heat", 8);
    const CoeffGrid exact = problem.exact_at(1.0).to_coeffs(spec);
    std::vector<double> log_h, log_e;
    double worst_pole = 0.0;
    for (double h : {1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0}) {
        SchemeConfig config;
        config.scheme = Scheme::ImexBdf4;
        config.h = h;
        config.t_end = 1.0;
        const IntegrationResult run = integrate(problem, config, spec);
        log_h.push_back(std::log(h));
        log_e.push_back(std::log(relative_error(run.final_coeffs, exact)));
        worst_pole = std::max(worst_pole, pole_residual(run.final_coeffs));
    }
    const double slope = ls_slope(log_h, log_e);
    const bool pass = std::abs(slope - 4.0) <= 0.2 && worst_pole <= 1e-8;
    std::snprintf(buf, sizeof(buf), "slope = %.3f, max P = %.3e", slope, worst_pole);
    report(4, "heat h^4 convergence (IMEX-BDF4 + CF startup)", pass, buf);
}

// 5/6. Eigenvalue growth and cond(V) growth of the Laplacian blocks.
void criteria_5_6() {
    std::vector<double> log_m, log_eig, log_cond;
    bool real_ok = true;
    for (int size : {16, 32, 64}) {
        const BlockPencil pencil = assemble_laplacian({size, size}, Complex(1.0, 0.0));
        const SpectralDiagnostics diag = spectral_diagnostics(pencil);
        log_m.push_back(std::log(size));
        log_eig.push_back(std::log(diag.max_abs_eig));
        log_cond.push_back(std::log(diag.cond_V));
        real_ok = real_ok && diag.all_real && diag.all_nonpositive;
    }
    const double eig_slope = ls_slope(log_m, log_eig);
    const double cond_slope = ls_slope(log_m, log_cond);
    {
        const bool pass = std::abs(eig_slope - 4.0) <= 0.3 && real_ok;
        std::snprintf(buf, sizeof(buf), "|lambda_max| slope = %.3f, real+nonpositive = %s",
                      eig_slope, real_ok ? "yes" : "no");
        report(5, "eigenvalue bound O(n^2 m^2), real nonpositive spectrum", pass, buf);
    }
    {
        const bool pass = std::abs(cond_slope - 1.0) <= 0.3;
        std::snprintf(buf, sizeof(buf), "cond(V) slope = %.3f", cond_slope);
        report(6, "cond(V) growth of order m", pass, buf);
    }
}

// 7. CF approximant accuracy and decay rate.
void criterion_7() {
    auto max_err = [](const CfApproximant& cf) {
        double worst = std::abs(cf.evaluate_exp(0.0) - 1.0);
        for (int i = 0; i < 1000; ++i) {
            const double x = -std::pow(10.0, -6.0 + 12.0 * i / 999.0);
            worst = std::max(worst, std::abs(cf.evaluate_exp(x) - std::exp(x)));
        }
        return worst;
    };
    const double err12 = max_err(cf_build(12));
    const double err10 = max_err(cf_build(10));
    const double expected = std::pow(9.28903, 2.0);
    const double ratio = err10 / err12;
    const bool pass = err12 <= 1e-9 && ratio >= expected / 10.0 && ratio <= expected * 10.0;
    std::snprintf(buf, sizeof(buf), "err(p=12) = %.3e, err(p=10)/err(p=12) = %.1f (expect ~%.0f)",
                  err12, ratio, expected);
    report(7, "CF approximant accuracy and 9.289^-p decay", pass, buf);
}

// 8. CF actions against EIG actions.
void criterion_8() {
    const GridSpec spec{16, 16};
    const BlockPencil pencil = assemble_laplacian(spec, Complex(1.0, 0.0));
    const CfApproximant cf = cf_build(12);
    const double h = 0.02;
    const EigPhiData eig = eig_precompute(pencil, h);
    const CoeffGrid b{oracles::random_cmatrix(spec.m, spec.n, 2024u)};
    const PhiMatrixKind kinds[4] = {PhiMatrixKind::Phi0H, PhiMatrixKind::Phi1H,
                                    PhiMatrixKind::Phi2H, PhiMatrixKind::Phi3H};
    double worst = 0.0;
    for (int l = 0; l <= 3; ++l) {
        const CoeffGrid via_cf = phi_action_cf(cf, l, h, pencil, b);
        const CoeffGrid via_eig = eig_apply(eig, kinds[l], b);
        worst = std::max(worst, (via_cf.data - via_eig.data).cwiseAbs().maxCoeff() /
                                    b.data.cwiseAbs().maxCoeff());
    }
    std::snprintf(buf, sizeof(buf), "max relative deviation = %.3e (l = 0..3)", worst);
    report(8, "phi-action cross-validation (CF vs EIG)", worst <= 1e-7, buf);
}

// 9. Dense nm x nm oracle equivalence and exact parity preservation.
void criterion_9() {
    const GridSpec spec{8, 8};
    const BlockPencil pencil = assemble_laplacian(spec, Complex(1.0, 0.0));
    const auto dense = oracles::dense_laplacian(pencil);
    const CoeffGrid c{oracles::random_cmatrix(spec.m, spec.n, 99u)};

    const CoeffGrid applied = apply_laplacian(pencil, c);
    const CVector apply_want = dense.b_full.partialPivLu().solve(dense.a_full * oracles::vec(c));
    const double apply_err = (oracles::vec(applied) - apply_want).cwiseAbs().maxCoeff();

    const Complex z(25.0, 0.0), w(-1.2, 0.0);
    const BlockLU lu = factor_shifted(pencil, z, w);
    const CoeffGrid solved = solve_shifted(lu, pencil, c);
    const CVector solve_want = (z * dense.b_full + w * dense.a_full)
                                   .partialPivLu()
                                   .solve(dense.b_full * oracles::vec(c));
    const double solve_err = (oracles::vec(solved) - solve_want).cwiseAbs().maxCoeff();

    // Parity: even-k columns with even-j rows only stay exactly so.
    CoeffGrid parity_b{CMatrix::Zero(spec.m, spec.n)};
    for (int q = 0; q < spec.n; ++q) {
        const int kpar = std::abs(wavenumber(q, spec.n)) % 2;
        for (int p = 0; p < spec.m; ++p) {
            if (std::abs(wavenumber(p, spec.m)) % 2 == kpar) parity_b.data(p, q) = Complex(1.0, 0.5);
        }
    }
    const CoeffGrid parity_x = solve_shifted(lu, pencil, parity_b);
    bool parity_exact = true;
    for (int q = 0; q < spec.n; ++q) {
        const int kpar = std::abs(wavenumber(q, spec.n)) % 2;
        for (int p = 0; p < spec.m; ++p) {
            if (std::abs(wavenumber(p, spec.m)) % 2 != kpar &&
                parity_x.data(p, q) != Complex(0.0, 0.0)) {
                parity_exact = false;
            }
        }
    }
    const bool pass = apply_err < 1e-12 && solve_err < 1e-12 && parity_exact;
    std::snprintf(buf, sizeof(buf), "apply err = %.2e, solve err = %.2e, parity %s", apply_err,
                  solve_err, parity_exact ? "exact" : "broken");
    report(9, "dense-oracle equivalence at 8x8 and parity structure", pass, buf);
}

// 10. Fourth-order sweep for all schemes; dispersive analogue for the two
// schemes that admit it.  The explicitly-treated reaction term keeps the
// exponential integrators from integrating the problem exactly.
void criterion_10() {
    const std::vector<double> hs{1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0};
    const GridSpec spec{32, 32};
    bool pass = true;
    std::string detail;
    auto sweep = [&](const ProblemSpec& problem, Scheme s) {
        const CoeffGrid exact = problem.exact_at(1.0).to_coeffs(spec);
        std::vector<double> lh, le;
        for (double h : hs) {
            SchemeConfig config;
            config.scheme = s;
            config.h = h;
            config.t_end = 1.0;
            // At p=12 the CF phi-approximation floor (~5e-12 per step) sits at
            // the h=1/200 scheme-error scale; p=14 keeps the floor two
            // decades below so the slope measures the scheme itself.
            config.cf_poles = 14;
            lh.push_back(std::log(h));
            le.push_back(std::log(relative_error(integrate(problem, config, spec).final_coeffs,
                                                 exact)));
        }
        const double slope = ls_slope(lh, le);
        if (std::abs(slope - 4.0) > 0.2) pass = false;
        char piece[96];
        std::snprintf(piece, sizeof(piece), "%s%s %.2f", scheme_name(s),
                      problem.dispersive() ? "(disp)" : "", slope);
        if (!detail.empty()) detail += ", ";
        detail += piece;
    };
    const ProblemSpec diffusive = builtin_problem("heat-reaction", 8);
    for (Scheme s : {Scheme::Etdrk4Cf, Scheme::Etdrk4Eig, Scheme::ImexBdf4, Scheme::Lirk4}) {
        sweep(diffusive, s);
    }
    const ProblemSpec dispersive = builtin_problem("heat-reaction-dispersive", 8);
    for (Scheme s : {Scheme::Etdrk4Eig, Scheme::Lirk4}) sweep(dispersive, s);
    report(10, "order 4.0 +- 0.2 for all four schemes", pass, detail);
}

// 11. Qualitative rankings at desk scale.
void criterion_11() {
    {
        const GridSpec spec{64, 64};
        const ProblemSpec ac = builtin_problem("allen-cahn");
        const std::vector<Scheme> all{Scheme::Etdrk4Cf, Scheme::Etdrk4Eig, Scheme::ImexBdf4,
                                      Scheme::Lirk4};
        const ConvergenceTable table = convergence_study(ac, all, {0.01}, spec, 0.0, 0.5);
        double imex_err = 0, imex_wall = 0;
        double other_max_err = 0, other_min_wall = 1e300;
        for (const auto& row : table.rows) {
            if (row.scheme == Scheme::ImexBdf4) {
                imex_err = row.rel_error;
                imex_wall = row.wall_seconds;
            } else {
                other_max_err = std::max(other_max_err, row.rel_error);
                other_min_wall = std::min(other_min_wall, row.wall_seconds);
            }
        }
        const bool pass = imex_err > other_max_err && imex_wall < other_min_wall;
        std::snprintf(buf, sizeof(buf),
                      "Allen-Cahn: E(imex) = %.2e vs max other %.2e; wall(imex) = %.3fs vs min "
                      "other %.3fs",
                      imex_err, other_max_err, imex_wall, other_min_wall);
        report(11, "ranking: IMEX-BDF4 least accurate, cheapest per step", pass, buf);
    }
    {
        const GridSpec spec{64, 64};
        const ProblemSpec nls = builtin_problem("nls");
        const double h = 1.0 / 400.0;
        double wall_lirk = 1e300, wall_eig = 1e300;
        // Wall-clock comparison: best of two runs per scheme to shed
        // scheduler noise.
        for (int rep = 0; rep < 2; ++rep) {
            for (Scheme s : {Scheme::Lirk4, Scheme::Etdrk4Eig}) {
                SchemeConfig config;
                config.scheme = s;
                config.h = h;
                config.t_end = 0.25;
                const IntegrationResult run = integrate(nls, config, spec);
                double& slot = (s == Scheme::Lirk4) ? wall_lirk : wall_eig;
                slot = std::min(slot, run.stats.stepping_seconds);
            }
        }
        const bool pass = wall_lirk < wall_eig;
        std::snprintf(buf, sizeof(buf), "NLS stepping: LIRK4 %.3fs vs ETDRK4-EIG %.3fs "
                      "(precompute excluded)",
                      wall_lirk, wall_eig);
        report(11, "ranking: LIRK4 beats ETDRK4-EIG wall time on NLS", pass, buf);
    }
}

// 12. Invariant suite.
void criterion_12() {
    bool pass = true;
    std::string detail;
    auto note = [&](const char* name, bool ok, double value) {
        char piece[96];
        std::snprintf(piece, sizeof(piece), "%s %s (%.2e)", name, ok ? "ok" : "BAD", value);
        if (!detail.empty()) detail += ", ";
        detail += piece;
        pass = pass && ok;
    };

    // FFT round trips.
    {
        double worst = 0.0;
        for (int size : {4, 8, 16, 32}) {
            const CMatrix v = oracles::random_cmatrix(size, size, 7u + size);
            const ValueGrid back = coeffs_to_vals(vals_to_coeffs(ValueGrid{v}));
            worst = std::max(worst,
                             (back.data - v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff());
        }
        note("fft-roundtrip", worst <= 1e-13, worst);
    }
    // Scalar phi recurrence and f-identity.
    {
        double worst_rec = 0.0, worst_f = 0.0;
        for (Complex z : {Complex(-0.5, 0.0), Complex(-20.0, 0.0), Complex(-1.0, 2.0),
                          Complex(0.3, -1.0)}) {
            for (int l = 0; l < 3; ++l) {
                double fl = 1.0;
                for (int i = 2; i <= l; ++i) fl *= i;
                worst_rec = std::max(worst_rec, std::abs(phi_scalar(l + 1, z) -
                                                         (phi_scalar(l, z) - 1.0 / fl) / z));
            }
            const Complex f1 = phi_scalar(1, z) - 3.0 * phi_scalar(2, z) + 4.0 * phi_scalar(3, z);
            const Complex f2 = 2.0 * phi_scalar(2, z) - 4.0 * phi_scalar(3, z);
            const Complex f3 = -phi_scalar(2, z) + 4.0 * phi_scalar(3, z);
            worst_f = std::max(worst_f, std::abs(f1 + 2.0 * f2 + f3 - phi_scalar(1, z)));
        }
        note("phi-recurrence", worst_rec <= 1e-9, worst_rec);
        note("f1+2f2+f3=phi1", worst_f <= 1e-10, worst_f);
    }
    // Blockwise f-identity.
    {
        const GridSpec spec{16, 16};
        const BlockPencil pencil = assemble_laplacian(spec, Complex(1.0, 0.0));
        const EigPhiData eig = eig_precompute(pencil, 1e-3);
        double worst = 0.0;
        for (int i = 0; i < spec.n; i += 3) {
            for (int parity = 0; parity < 2; ++parity) {
                const ChainPhiData& chain = eig.chain(i, parity);
                const CMatrix fsum = chain.f_h[0] + 2.0 * chain.f_h[1] + chain.f_h[2];
                worst = std::max(worst, (fsum - chain.phi_h[1]).cwiseAbs().maxCoeff());
            }
        }
        note("blockwise-f-identity", worst <= 1e-10, worst);
    }
    // Residuals through integrations of smooth data + NLS norm drift.  The
    // Allen-Cahn run needs 256 points per direction before the aliasing tail
    // of the cubic term sits at roundoff; below that the pole sums inherit
    // the truncation junk.
    {
        const GridSpec spec{256, 256};
        SchemeConfig config;
        config.scheme = Scheme::Lirk4;
        config.h = 0.01;
        config.t_end = 0.1;
        const IntegrationResult ac = integrate(builtin_problem("allen-cahn"), config, spec);
        const double pol = pole_residual(ac.final_coeffs);
        const double sym = symmetry_residual(ac.final_coeffs);
        note("pole-residual", pol <= 1e-8, pol);
        note("symmetry-residual", sym <= 1e-8, sym);
    }
    {
        const GridSpec spec{64, 64};
        const ProblemSpec nls = builtin_problem("nls");
        SchemeConfig config;
        config.scheme = Scheme::Lirk4;
        config.h = 1e-3;
        config.t_end = 0.25;
        const IntegrationResult run = integrate(nls, config, spec);
        const double n0 = sphere_l2_norm(nls.initial.to_coeffs(spec));
        const double drift = std::abs(sphere_l2_norm(run.final_coeffs) - n0) / n0;
        note("nls-norm-drift", drift <= 1e-6, drift);
        const double pol = pole_residual(run.final_coeffs);
        const double sym = symmetry_residual(run.final_coeffs);
        note("nls-pole-residual", pol <= 1e-8, pol);
        note("nls-symmetry-residual", sym <= 1e-8, sym);
    }
    report(12, "invariant suite", pass, detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criteria_5_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criterion(s) FAILED\n", g_failures);
    return 1;
}
