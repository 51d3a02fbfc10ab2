#pragma once

#include <functional>
#include <utility>

#include "spherepde/types.hpp"

namespace spherepde {

/// theta (length m) and lambda (length n) grids of Eq. grids starting at -pi;
/// +pi itself is excluded.
std::pair<RVector, RVector> make_grid(const GridSpec& spec);

/// Forward 2D transform with 1/(nm) normalization and wavenumber-ordered output.
CoeffGrid vals_to_coeffs(const ValueGrid& v);

/// Inverse of vals_to_coeffs.
ValueGrid coeffs_to_vals(const CoeffGrid& c);

/// coeffs -> values -> f applied pointwise in place -> coeffs, without
/// materializing the intermediate value grid.
CoeffGrid pointwise_in_value_space(const CoeffGrid& c,
                                   const std::function<Complex(Complex)>& f);

/// Diagonal Fourier differentiation matrix acting on the m-coefficient vector.
/// order 1: i*(0, -m/2+1, ..., m/2-1); the zero first entry cancels the
/// spurious -m/2 derivative mode for real data.
/// order 2: -j^2 for j = -m/2..m/2-1.
struct DiagDiffMatrix {
    int order = 1;
    CVector diagonal;
};

DiagDiffMatrix diff_matrix(int m, int order);

/// P maps the m-coefficient vector to the symmetric (m+1)-vector by halving
/// the -m/2 mode and replicating it at +m/2.  Q_diff folds back after
/// differentiation; Q_mult truncates the (m+5)-long product of the
/// sin^2/cossin multiplication back to m modes, with the two wrap entries
/// in its first row.  Dense storage: these only appear in matrix assembly
/// and in oracle checks, never in per-step paths.
struct ProjectionMaps {
    Eigen::MatrixXd P;       // (m+1) x m
    Eigen::MatrixXd Q_diff;  // m x (m+1)
    Eigen::MatrixXd Q_mult;  // m x (m+5)
};

ProjectionMaps projection_maps(int m);

/// Prolong coefficients to a finer grid (m2 >= m, n2 >= n, both even),
/// splitting the folded -m/2 (resp. -n/2) boundary mode half-and-half onto
/// +-m/2 so the result represents the same symmetric trigonometric
/// interpolant.
CoeffGrid pad_coeffs(const CoeffGrid& c, int m2, int n2);

/// Running count of 1D-pair (i.e. full 2D) FFT executions, for per-step
/// operation accounting.
long long fft_count();
void reset_fft_count();

}  // namespace spherepde
