#pragma once

#include <vector>

#include "spherepde/types.hpp"

namespace spherepde {

/// m x m matrix with entries on the main and +-2 diagonals plus explicit
/// corner entries.  Everything the coefficient-space discretization touches
/// (T_sin2, T_cossin and the assembled Laplacian blocks) lives in this
/// pattern: the only out-of-band positions are (0, m-2) and (m-2, 0).
struct BandedCornerMatrix {
    int m = 0;
    CVector diag;    // (i, i), size m
    CVector upper2;  // (i, i+2), size m-2
    CVector lower2;  // (i+2, i), size m-2

    struct Corner {
        int row = 0;
        int col = 0;
        Complex value{0.0, 0.0};
    };
    std::vector<Corner> corners;

    static BandedCornerMatrix zero(int m);

    CMatrix dense() const;

    /// y = M x, O(m).
    void apply(const Complex* x, Complex* y) const;

    /// M applied to every column of x at once (vectorized across columns).
    CMatrix apply_matrix(const CMatrix& x) const;

    Complex corner_at(int row, int col) const;  // 0 if absent
    void add_corner(int row, int col, Complex value);

    /// M * diag(d) — column scaling, preserves the pattern.
    BandedCornerMatrix scaled_columns(const CVector& d) const;

    BandedCornerMatrix scaled(Complex s) const;
    BandedCornerMatrix plus(const BandedCornerMatrix& other) const;
    BandedCornerMatrix plus_diagonal(Complex s) const;
};

/// Nonsingular coefficient-space matrix for multiplication by sin^2(theta),
/// assembled with its exact rational entries (the Q*Msin2(:,3:m+3)*P product
/// is kept as a test oracle).
BandedCornerMatrix build_tsin2(int m);

/// Multiplication by cos(theta)sin(theta); purely imaginary entries.
BandedCornerMatrix build_tcossin(int m);

/// The plain m x m Toeplitz multiplication matrix without wrap corrections;
/// it mis-multiplies trigonometric polynomials of degree m/2-2 and is kept
/// for regression contrast.
BandedCornerMatrix naive_msin2(int m);

}  // namespace spherepde
