#pragma once

#include <functional>
#include <optional>

#include "spherepde/fourier.hpp"
#include "spherepde/types.hpp"

namespace spherepde {

/// Pointwise evaluator of a sphere function in longitude-latitude form,
/// (lambda, theta) in [-pi,pi] x [0,pi].
using SphereEvaluator = std::function<Complex(double lambda, double theta)>;

/// A function on the sphere, backed either by an evaluator or by the Fourier
/// coefficients of its doubled extension.
struct SphereFunction {
    SphereEvaluator evaluator;          // authoritative when coeffs is empty
    std::optional<CoeffGrid> coeffs;    // authoritative when present

    static SphereFunction from_evaluator(SphereEvaluator f) { return {std::move(f), {}}; }
    static SphereFunction from_coeffs(CoeffGrid c) { return {nullptr, std::move(c)}; }

    /// Doubled coefficients at the requested resolution.
    CoeffGrid to_coeffs(const GridSpec& spec) const;
};

/// Sample the doubled extension: theta >= 0 rows sample u directly, theta < 0
/// rows sample u(lambda +- pi, -theta).
ValueGrid double_up(const SphereFunction& f, const GridSpec& spec);

/// Rows with theta in [0, pi], north to south: rows m/2..m-1 then row 0
/// (theta = -pi plays the role of +pi).  (m/2+1) x n.
CMatrix restrict_to_sphere(const ValueGrid& v);

/// max over k != 0 of |sum_j u_jk| and |sum_j (-1)^j u_jk| (plain sums in the
/// m-coefficient storage; the halved boundary terms fold together).
double pole_residual(const CoeffGrid& c);

/// Max-norm discrepancy between the value grid of c and its image under the
/// doubled-up reflection map; zero iff the grid is an exact doubling.
/// Diagnostic only, never enforced.
double symmetry_residual(const CoeffGrid& c);

/// Continuous sphere L2 norm, (int_0^pi int_-pi^pi |u|^2 sin(theta))^(1/2),
/// computed in coefficient space.  |u|^2 is formed in value space at 2m x 2n
/// to keep the quadratic term alias-free; the latitudinal weights
/// int_0^pi sin(theta) e^{ij theta} dtheta = (1+e^{ij pi})/(1-j^2) are used
/// with the analytic value +-i pi/2 at j = +-1 where the formula is 0/0.
double sphere_l2_norm(const CoeffGrid& c);

/// Latitudinal quadrature weight above, exposed for the Poisson zero-mean row.
Complex sin_theta_moment(int j);

}  // namespace spherepde
