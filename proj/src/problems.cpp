#include "spherepde/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "spherepde/fourier.hpp"
#include "spherepde/linsolve.hpp"

namespace spherepde {

namespace {

const double kPi = std::numbers::pi;

// Normalized associated Legendre Q_l^m(theta) with
// int_0^pi Q^2 sin(theta) dtheta = 1/(2 pi).
double normalized_legendre(int l, int m, double theta) {
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    double pmm = 1.0 / std::sqrt(4.0 * kPi);
    for (int k = 1; k <= m; ++k) {
        pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
    }
    if (l == m) return pmm;
    double pmmp1 = std::sqrt(2.0 * m + 3.0) * x * pmm;
    if (l == m + 1) return pmmp1;
    double prev_a = std::sqrt((4.0 * (m + 1.0) * (m + 1.0) - 1.0) /
                              ((m + 1.0) * (m + 1.0) - static_cast<double>(m) * m));
    for (int ll = m + 2; ll <= l; ++ll) {
        const double a = std::sqrt((4.0 * ll * ll - 1.0) /
                                   (static_cast<double>(ll) * ll - static_cast<double>(m) * m));
        const double pll = a * (x * pmmp1 - pmm / prev_a);
        pmm = pmmp1;
        pmmp1 = pll;
        prev_a = a;
    }
    return pmmp1;
}

}  // namespace

Complex spherical_harmonic_value(int l, int order, double lambda, double theta) {
    const int am = std::abs(order);
    if (am > l) throw std::invalid_argument("spherical_harmonic: |order| must be <= l");
    const double q = normalized_legendre(l, am, theta);
    return q * std::exp(Complex(0.0, order * lambda));
}

CoeffGrid spherical_harmonic(int l, int order, const GridSpec& spec) {
    spec.require_valid();
    if (std::abs(order) > l) throw std::invalid_argument("spherical_harmonic: |order| must be <= l");
    if (l > spec.m / 2 - 2) {
        throw std::invalid_argument("spherical_harmonic: l = " + std::to_string(l) +
                                    " unresolvable on m = " + std::to_string(spec.m));
    }
    SphereFunction f = SphereFunction::from_evaluator(
        [l, order](double la, double th) { return spherical_harmonic_value(l, order, la, th); });
    return vals_to_coeffs(double_up(f, spec));
}

CoeffGrid solve_poisson(const CoeffGrid& f) {
    const GridSpec spec = f.spec();
    BlockPencil pencil = assemble_laplacian(spec, Complex(1.0, 0.0));
    const int m = spec.m, n = spec.n;
    const int k0 = n / 2;
    BlockLU lu = factor_shifted(pencil, Complex(0.0, 0.0), Complex(1.0, 0.0), k0);

    CoeffGrid x{CMatrix(m, n)};
    CVector rhs(m);
    for (int i = 0; i < n; ++i) {
        if (i == k0) continue;
        pencil.B.apply(f.data.col(i).data(), rhs.data());
        lu.blocks[i]->solve_inplace(rhs.data());
        x.data.col(i) = rhs;
    }
    // k = 0 block: replace the j = 0 row with the zero-mean functional (zero
    // right-hand side) and solve densely.
    CMatrix a0 = pencil.block_A(k0).dense();
    pencil.B.apply(f.data.col(k0).data(), rhs.data());
    for (int c = 0; c < m; ++c) a0(m / 2, c) = sin_theta_moment(wavenumber(c, m));
    rhs[m / 2] = Complex(0.0, 0.0);
    x.data.col(k0) = a0.partialPivLu().solve(rhs);
    return x;
}

double relative_error(const CoeffGrid& u, const CoeffGrid& u_ref) {
    if (u.m() != u_ref.m() || u.n() != u_ref.n()) {
        throw std::invalid_argument("relative_error: grids differ");
    }
    const double denom = sphere_l2_norm(u_ref);
    if (denom == 0.0) throw std::invalid_argument("relative_error: zero reference norm");
    const CoeffGrid diff{u.data - u_ref.data};
    return sphere_l2_norm(diff) / denom;
}

namespace {

SphereFunction harmonic_function(int l, int order, Complex scale = Complex(1.0, 0.0)) {
    return SphereFunction::from_evaluator([l, order, scale](double la, double th) {
        return scale * spherical_harmonic_value(l, order, la, th);
    });
}

ProblemSpec make_heat(int l, bool reaction, bool dispersive) {
    if (l < 1) throw std::invalid_argument("heat problem needs l >= 1");
    ProblemSpec p;
    const double ll1 = static_cast<double>(l) * (l + 1);
    if (!reaction) {
        p.name = "heat";
        p.alpha = Complex(1.0 / ll1, 0.0);
        p.g = nullptr;
        p.exact_at = [l](double t) { return harmonic_function(l, l, std::exp(Complex(-t, 0.0))); };
    } else {
        // Reaction term treated explicitly keeps every scheme genuinely
        // fourth order while staying exactly solvable: alpha*Delta
        // contributes -2 (or -2i) on Y_l^l and the reaction -2.  The even
        // implicit/explicit split also stays clear of the IMEX-BDF4
        // superconvergence point beta/(lambda+beta) = 1/5 where its h^5
        // error constant vanishes.
        p.name = dispersive ? "heat-reaction-dispersive" : "heat-reaction";
        p.alpha = dispersive ? Complex(0.0, 2.0 / ll1) : Complex(2.0 / ll1, 0.0);
        p.g = [](Complex u) { return -2.0 * u; };
        const Complex rate = dispersive ? Complex(-2.0, -2.0) : Complex(-4.0, 0.0);
        p.exact_at = [l, rate](double t) { return harmonic_function(l, l, std::exp(rate * t)); };
    }
    p.initial = harmonic_function(l, l);
    return p;
}

}  // namespace

ProblemSpec builtin_problem(const std::string& name, int l) {
    if (name == "allen-cahn") {
        ProblemSpec p;
        p.name = name;
        p.alpha = Complex(1e-2, 0.0);
        p.g = [](Complex u) { return u - u * u * u; };
        p.initial = SphereFunction::from_evaluator([](double la, double th) {
            const double x = std::cos(la) * std::sin(th);
            const double y = std::sin(la) * std::sin(th);
            const double z = std::cos(th);
            return Complex(std::cos(std::cosh(5.0 * x * z) - 10.0 * y), 0.0);
        });
        return p;
    }
    if (name == "nls") {
        ProblemSpec p;
        p.name = name;
        p.alpha = Complex(0.0, 1.0);
        p.g = [](Complex u) { return Complex(0.0, 1.0) * u * std::norm(u); };
        // Breather (A = B = 1) superposed with Y_3^3.
        p.initial = SphereFunction::from_evaluator([](double la, double th) {
            const double breather = 2.0 / (2.0 - std::sqrt(2.0) * std::cos(th)) - 1.0;
            return breather + spherical_harmonic_value(3, 3, la, th);
        });
        return p;
    }
    if (name == "ginzburg-landau") {
        ProblemSpec p;
        p.name = name;
        p.alpha = Complex(1e-4, 0.0);
        p.g = [](Complex u) { return u - Complex(1.0, 1.5) * u * std::norm(u); };
        p.initial = SphereFunction::from_evaluator([](double la, double th) {
            const double x = std::cos(la) * std::sin(th);
            const double y = std::sin(la) * std::sin(th);
            const double z = std::cos(th);
            const double c = std::cos(kPi / 8), s = std::sin(kPi / 8);
            const double xr = c * x - s * z;
            const double zr = s * x + c * z;
            return Complex((std::cos(40 * xr) + std::cos(40 * y) + std::cos(40 * zr)) / 3.0, 0.0);
        });
        return p;
    }
    if (name == "heat") return make_heat(l, false, false);
    if (name == "heat-reaction") return make_heat(l, true, false);
    if (name == "heat-reaction-dispersive") return make_heat(l, true, true);
    throw std::invalid_argument("unknown builtin problem: " + name);
}

double ConvergenceTable::slope(Scheme s) const {
    std::vector<double> xs, ys;
    for (const auto& row : rows) {
        if (row.scheme == s) {
            xs.push_back(std::log(row.h));
            ys.push_back(std::log(row.rel_error));
        }
    }
    if (xs.size() < 2) throw std::invalid_argument("slope: need at least two h values");
    double xm = 0, ym = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        xm += xs[i];
        ym += ys[i];
    }
    xm /= xs.size();
    ym /= ys.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - xm) * (ys[i] - ym);
        den += (xs[i] - xm) * (xs[i] - xm);
    }
    return num / den;
}

ConvergenceTable convergence_study(const ProblemSpec& problem, const std::vector<Scheme>& schemes,
                                   const std::vector<double>& h_list, const GridSpec& spec,
                                   double t0, double t_end) {
    if (h_list.empty() || schemes.empty()) {
        throw std::invalid_argument("convergence_study: empty scheme or step list");
    }
    for (Scheme s : schemes) {
        if (problem.dispersive() && !scheme_supports_dispersive(s)) {
            throw std::invalid_argument(std::string(scheme_name(s)) +
                                        " cannot run the dispersive problem " + problem.name);
        }
    }
    const double h_min = *std::min_element(h_list.begin(), h_list.end());

    SchemeConfig ref_config;
    ref_config.scheme = Scheme::Etdrk4Eig;
    ref_config.h = h_min / 2.0;
    ref_config.t0 = t0;
    ref_config.t_end = t_end;
    const CoeffGrid reference = integrate(problem, ref_config, spec).final_coeffs;

    ConvergenceTable table;
    for (Scheme s : schemes) {
        std::vector<double> hs = h_list;
        std::sort(hs.begin(), hs.end());
        for (double h : hs) {
            SchemeConfig config;
            config.scheme = s;
            config.h = h;
            config.t0 = t0;
            config.t_end = t_end;
            IntegrationResult run = integrate(problem, config, spec);
            ConvergenceRow row;
            row.scheme = s;
            row.h = h;
            row.rel_error = relative_error(run.final_coeffs, reference);
            row.wall_seconds = run.stats.stepping_seconds;
            row.precompute_seconds = run.stats.precompute_seconds;
            table.rows.push_back(row);
        }
    }
    return table;
}

}  // namespace spherepde
