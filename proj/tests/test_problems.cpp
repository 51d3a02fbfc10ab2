#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spherepde/fourier.hpp"
#include "spherepde/problems.hpp"

using namespace spherepde;
using oracles::kPi;

TEST_CASE("spherical harmonic values and normalization") {
    SUBCASE("Y_0^0 is the constant 1/sqrt(4 pi)") {
        const GridSpec spec{16, 16};
        const CoeffGrid y = spherical_harmonic(0, 0, spec);
        CoeffGrid want{CMatrix::Zero(spec.m, spec.n)};
        want.data(spec.m / 2, spec.n / 2) = 1.0 / std::sqrt(4.0 * kPi);
        CHECK((y.data - want.data).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("unit sphere-L2 norm") {
        const GridSpec spec{32, 32};
        CHECK(sphere_l2_norm(spherical_harmonic(3, 3, spec)) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(sphere_l2_norm(spherical_harmonic(12, -7, spec)) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("matches the assoc_legendre oracle for small l") {
        for (int l : {1, 3, 7, 10}) {
            for (int order = -l; order <= l; order += std::max(1, l / 2)) {
                for (double th : {0.3, 1.2, 2.8}) {
                    for (double la : {-2.0, 0.7}) {
                        const Complex mine = spherical_harmonic_value(l, order, la, th);
                        const Complex want = oracles::sph_harm(l, order, la, th);
                        CHECK(std::abs(mine - want) <= 1e-12 * std::max(1.0, std::abs(want)));
                    }
                }
            }
        }
    }
    SUBCASE("large l stays finite through the normalized recurrence") {
        const double value = std::abs(spherical_harmonic_value(64, 64, 0.3, kPi / 2));
        CHECK(std::isfinite(value));
        CHECK(value > 0.0);
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(spherical_harmonic(3, 4, GridSpec{32, 32}), std::invalid_argument);
        CHECK_THROWS_AS(spherical_harmonic(15, 0, GridSpec{32, 32}), std::invalid_argument);
    }
}

TEST_CASE("harmonics remain eigenfunctions through the problems interface") {
    const GridSpec spec{32, 32};
    const BlockPencil pencil = assemble_laplacian(spec, Complex(1.0, 0.0));
    const CoeffGrid y = spherical_harmonic(4, 2, spec);
    const CoeffGrid out = apply_laplacian(pencil, y);
    CHECK((out.data + 20.0 * y.data).cwiseAbs().maxCoeff() <=
          1e-9 * 20.0 * y.data.cwiseAbs().maxCoeff());
}

TEST_CASE("Poisson solves") {
    SUBCASE("zero right-hand side gives the zero solution") {
        const GridSpec spec{16, 16};
        const CoeffGrid u = solve_poisson(CoeffGrid{CMatrix::Zero(spec.m, spec.n)});
        CHECK(u.data.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("spherical harmonic right-hand side") {
        const GridSpec spec{64, 64};
        const CoeffGrid f = spherical_harmonic(7, 3, spec);
        const CoeffGrid u = solve_poisson(f);
        const CoeffGrid want{-f.data / 56.0};
        CHECK(relative_error(u, want) <= 1e-10);
    }
    SUBCASE("Cheong family at reduced size") {
        const GridSpec spec{64, 64};
        for (int l = 1; l <= 8; ++l) {
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
            CHECK(relative_error(u, uex.to_coeffs(spec)) <= 1e-8);
            CHECK(pole_residual(u) <= 1e-8);
        }
    }
    SUBCASE("residual and mean of the computed solution") {
        const GridSpec spec{32, 32};
        // Zero-mean combination of harmonics.
        CoeffGrid f{spherical_harmonic(5, 1, spec).data + 0.5 * spherical_harmonic(3, -2, spec).data};
        const CoeffGrid u = solve_poisson(f);
        const BlockPencil pencil = assemble_laplacian(spec, Complex(1.0, 0.0));
        const CoeffGrid residual{apply_laplacian(pencil, u).data - f.data};
        CHECK(sphere_l2_norm(residual) <= 1e-9 * sphere_l2_norm(f));
        // Discrete zero-mean functional.
        Complex mean(0.0, 0.0);
        for (int p = 0; p < spec.m; ++p) {
            mean += u.data(p, spec.n / 2) * sin_theta_moment(wavenumber(p, spec.m));
        }
        CHECK(std::abs(mean) * 2.0 * kPi <= 1e-10);
    }
}

TEST_CASE("builtin problem catalogue") {
    SUBCASE("allen-cahn") {
        const ProblemSpec p = builtin_problem("allen-cahn");
        CHECK(p.alpha == Complex(1e-2, 0.0));
        CHECK(!p.dispersive());
        const Complex u(0.7, 0.0);
        CHECK(std::abs(p.g(u) - (u - u * u * u)) < 1e-15);
    }
    SUBCASE("nls") {
        const ProblemSpec p = builtin_problem("nls");
        CHECK(p.alpha == Complex(0.0, 1.0));
        CHECK(p.dispersive());
        const Complex u(0.3, -0.4);
        CHECK(std::abs(p.g(u) - Complex(0.0, 1.0) * u * std::norm(u)) < 1e-15);
    }
    SUBCASE("ginzburg-landau") {
        const ProblemSpec p = builtin_problem("ginzburg-landau");
        CHECK(p.alpha == Complex(1e-4, 0.0));
        CHECK(!p.dispersive());
    }
    SUBCASE("heat with parameter l") {
        const ProblemSpec p = builtin_problem("heat", 4);
        CHECK(p.alpha == Complex(1.0 / 20.0, 0.0));
        CHECK(!p.g);
        const GridSpec spec{32, 32};
        const CoeffGrid u0 = p.initial.to_coeffs(spec);
        CHECK((u0.data - spherical_harmonic(4, 4, spec).data).cwiseAbs().maxCoeff() < 1e-13);
        const CoeffGrid exact = p.exact_at(1.0).to_coeffs(spec);
        CHECK((exact.data - std::exp(-1.0) * u0.data).cwiseAbs().maxCoeff() < 1e-13);
    }
    SUBCASE("unknown name") {
        CHECK_THROWS_AS(builtin_problem("kdv"), std::invalid_argument);
    }
}

TEST_CASE("relative error basics") {
    const GridSpec spec{16, 16};
    const CoeffGrid y = spherical_harmonic(2, 1, spec);
    CHECK(relative_error(y, y) == 0.0);
    const CoeffGrid y2{2.0 * y.data};
    CHECK(relative_error(y2, y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(relative_error(y, CoeffGrid{CMatrix::Zero(spec.m, spec.n)}),
                    std::invalid_argument);
}

TEST_CASE("heat decay is monotone for every scheme") {
    const GridSpec spec{16, 16};
    const ProblemSpec problem = builtin_problem("heat", 3);
    for (Scheme s : {Scheme::Etdrk4Cf, Scheme::Etdrk4Eig, Scheme::ImexBdf4, Scheme::Lirk4}) {
        SchemeConfig config;
        config.scheme = s;
        config.h = 0.05;
        config.t_end = 0.5;
        config.snapshot_times = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
        const IntegrationResult run = integrate(problem, config, spec);
        double prev = sphere_l2_norm(problem.initial.to_coeffs(spec));
        for (const auto& snap : run.snapshots) {
            const double norm = sphere_l2_norm(snap.coeffs);
            CHECK(norm < prev);
            prev = norm;
        }
    }
}

TEST_CASE("pointwise nonlinearities stay local through the transforms") {
    const GridSpec spec{32, 32};
    const ProblemSpec nls = builtin_problem("nls");
    const NonlinearOp N(nls.g, spec);
    const Complex v(0.4, -0.3);
    CoeffGrid c{CMatrix::Zero(spec.m, spec.n)};
    c.data(spec.m / 2, spec.n / 2) = v;  // constant grid of value v
    const CoeffGrid out = N(c);
    CoeffGrid want{CMatrix::Zero(spec.m, spec.n)};
    want.data(spec.m / 2, spec.n / 2) = nls.g(v);
    CHECK((out.data - want.data).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("convergence study produces fourth-order slopes and a sane table") {
    const GridSpec spec{16, 16};
    const ProblemSpec problem = builtin_problem("heat-reaction", 4);
    const std::vector<Scheme> schemes{Scheme::ImexBdf4, Scheme::Lirk4};
    const std::vector<double> hs{0.05, 0.025, 0.0125};
    const ConvergenceTable table = convergence_study(problem, schemes, hs, spec, 0.0, 1.0);
    CHECK(table.rows.size() == 6);
    // Rows sorted by scheme then ascending h.
    CHECK(table.rows[0].scheme == Scheme::ImexBdf4);
    CHECK(table.rows[0].h < table.rows[1].h);
    for (Scheme s : schemes) {
        CHECK(table.slope(s) == doctest::Approx(4.0).epsilon(0.075));
    }
    // Dispersive problems reject incompatible scheme lists outright.
    CHECK_THROWS_AS(
        convergence_study(builtin_problem("nls"), {Scheme::ImexBdf4}, hs, spec, 0.0, 1.0),
        std::invalid_argument);
}

TEST_CASE("NLS norm drift stays small over a short horizon") {
    const GridSpec spec{32, 32};
    const ProblemSpec problem = builtin_problem("nls");
    SchemeConfig config;
    config.scheme = Scheme::Lirk4;
    config.h = 1e-3;
    config.t_end = 0.05;
    const IntegrationResult run = integrate(problem, config, spec);
    const double n0 = sphere_l2_norm(problem.initial.to_coeffs(spec));
    const double n1 = sphere_l2_norm(run.final_coeffs);
    CHECK(std::abs(n1 - n0) <= 1e-6 * n0);
}
