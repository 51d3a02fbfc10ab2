#include "spherepde/dfs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spherepde {

CoeffGrid SphereFunction::to_coeffs(const GridSpec& spec) const {
    spec.require_valid();
    if (coeffs.has_value()) {
        if (coeffs->m() == spec.m && coeffs->n() == spec.n) return *coeffs;
        if (coeffs->m() <= spec.m && coeffs->n() <= spec.n) {
            return pad_coeffs(*coeffs, spec.m, spec.n);
        }
        throw std::invalid_argument("SphereFunction: cannot truncate coefficient-backed function");
    }
    if (!evaluator) throw std::invalid_argument("SphereFunction: no representation set");
    return vals_to_coeffs(double_up(*this, spec));
}

ValueGrid double_up(const SphereFunction& f, const GridSpec& spec) {
    spec.require_valid();
    if (!f.evaluator) {
        // Coefficient-backed: the doubled samples are just the inverse transform.
        return coeffs_to_vals(f.to_coeffs(spec));
    }
    const double pi = std::numbers::pi;
    auto [theta, lambda] = make_grid(spec);
    CMatrix v(spec.m, spec.n);
    for (int q = 0; q < spec.n; ++q) {
        for (int p = 0; p < spec.m; ++p) {
            const double th = theta[p];
            const double la = lambda[q];
            if (th >= 0.0) {
                v(p, q) = f.evaluator(la, th);
            } else {
                const double la_flip = (la < 0.0) ? la + pi : la - pi;
                v(p, q) = f.evaluator(la_flip, -th);
            }
        }
    }
    return ValueGrid{std::move(v)};
}

CMatrix restrict_to_sphere(const ValueGrid& v) {
    const int m = v.m(), n = v.n();
    GridSpec{m, n}.require_valid();
    CMatrix out(m / 2 + 1, n);
    for (int r = 0; r < m / 2; ++r) out.row(r) = v.data.row(m / 2 + r);
    out.row(m / 2) = v.data.row(0);
    return out;
}

double pole_residual(const CoeffGrid& c) {
    const int m = c.m(), n = c.n();
    double worst = 0.0;
    for (int q = 0; q < n; ++q) {
        if (wavenumber(q, n) == 0) continue;
        Complex plain(0.0, 0.0), alternating(0.0, 0.0);
        for (int p = 0; p < m; ++p) {
            plain += c.data(p, q);
            alternating += (p & 1) ? -c.data(p, q) : c.data(p, q);
        }
        worst = std::max(worst, std::abs(plain));
        worst = std::max(worst, std::abs(alternating));
    }
    return worst;
}

double symmetry_residual(const CoeffGrid& c) {
    const int m = c.m(), n = c.n();
    const ValueGrid v = coeffs_to_vals(c);
    double worst = 0.0;
    for (int q = 0; q < n; ++q) {
        const int qs = (q + n / 2) % n;
        for (int p = 0; p < m; ++p) {
            const int ps = (m - p) % m;
            worst = std::max(worst, std::abs(v.data(p, q) - v.data(ps, qs)));
        }
    }
    return worst;
}

Complex sin_theta_moment(int j) {
    const double pi = std::numbers::pi;
    if (j == 1) return Complex(0.0, pi / 2.0);
    if (j == -1) return Complex(0.0, -pi / 2.0);
    if (j % 2 != 0) return Complex(0.0, 0.0);
    return Complex(2.0 / (1.0 - static_cast<double>(j) * j), 0.0);
}

double sphere_l2_norm(const CoeffGrid& c) {
    const int m = c.m(), n = c.n();
    const CoeffGrid fine = pad_coeffs(c, 2 * m, 2 * n);
    ValueGrid vals = coeffs_to_vals(fine);
    vals.data = vals.data.cwiseProduct(vals.data.conjugate());
    const CoeffGrid sq = vals_to_coeffs(vals);
    // integral = 2pi * sum_j w_jk0 * int_0^pi sin(theta) e^{ij theta}
    const int m2 = 2 * m, n2 = 2 * n;
    const int k0 = n2 / 2;
    Complex integral(0.0, 0.0);
    for (int p = 0; p < m2; ++p) {
        integral += sq.data(p, k0) * sin_theta_moment(wavenumber(p, m2));
    }
    integral *= 2.0 * std::numbers::pi;
    return std::sqrt(std::max(0.0, integral.real()));
}

}  // namespace spherepde
