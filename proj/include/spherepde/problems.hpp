#pragma once

#include <string>
#include <vector>

#include "spherepde/problem_spec.hpp"
#include "spherepde/timesteppers.hpp"

namespace spherepde {

/// Unit-L2-normalized complex spherical harmonic (no Condon-Shortley phase),
/// evaluated by the normalized associated-Legendre recurrence so large l
/// neither overflows nor underflows.
Complex spherical_harmonic_value(int l, int order, double lambda, double theta);

/// Doubled coefficients of Y_l^order; requires |order| <= l and l <= m/2 - 2.
CoeffGrid spherical_harmonic(int l, int order, const GridSpec& spec);

/// Solve Delta u = f with the discrete zero-mean condition replacing the
/// j = 0 row of the k = 0 block.  That one block is solved densely (the
/// constraint row breaks its banded pattern); the others use the O(m)
/// structured factorization.
CoeffGrid solve_poisson(const CoeffGrid& f);

/// Built-in problems: "allen-cahn", "nls", "ginzburg-landau", "heat",
/// "heat-reaction", "heat-reaction-dispersive".  The heat family is
/// parameterized by l (eigenfunction initial condition Y_l^l).
ProblemSpec builtin_problem(const std::string& name, int l = 4);

/// Relative sphere-L2 error ||u - u_ref|| / ||u_ref||.
double relative_error(const CoeffGrid& u, const CoeffGrid& u_ref);

struct ConvergenceRow {
    Scheme scheme;
    double h = 0.0;
    double rel_error = 0.0;
    double wall_seconds = 0.0;        // stepping only
    double precompute_seconds = 0.0;  // reported separately
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;  // sorted by scheme then h ascending
    double slope(Scheme s) const;      // least-squares d(log E)/d(log h)
};

/// Run every (scheme, h) cell up to t_end and measure the relative L2 error
/// against a reference computed with ETDRK4-EIG at half the smallest step.
ConvergenceTable convergence_study(const ProblemSpec& problem, const std::vector<Scheme>& schemes,
                                   const std::vector<double>& h_list, const GridSpec& spec,
                                   double t0, double t_end);

}  // namespace spherepde
