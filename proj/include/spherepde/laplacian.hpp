#pragma once

#include <memory>

#include "spherepde/mult_matrices.hpp"
#include "spherepde/types.hpp"

namespace spherepde {

struct BlockFactor;  // linsolve.hpp

/// Premultiplied block pencil of the coefficient-space operator alpha*Delta.
/// Block i (longitudinal wavenumber k = i - n/2) is the pair
///   A_i = alpha * (T_sin2 D2 + T_cossin D1 + Dn2(i) I),   B_i = T_sin2,
/// so the operator block is B^{-1} A_i and a shifted system
/// (z I + w alpha Delta) x = b becomes (z B + w A_i) x_i = B b_i.
/// T_sin2^{-1} is never formed.
struct BlockPencil {
    GridSpec spec;
    Complex alpha{1.0, 0.0};
    BandedCornerMatrix A_base;  // alpha * (T_sin2 D2 + T_cossin D1)
    RVector d2n;                // Dn2 diagonal (-k^2), size n, unscaled
    BandedCornerMatrix B;       // T_sin2
    std::shared_ptr<const BlockFactor> b_factor;  // LU of T_sin2, for applies

    BandedCornerMatrix block_A(int i) const;
    bool diffusive() const { return alpha.imag() == 0.0; }
};

/// Assemble the pencil for alpha*Delta at the given resolution (m, n even, >= 8).
BlockPencil assemble_laplacian(const GridSpec& spec, Complex alpha);

/// w_i = A_i c_i followed by the T_sin2 solve; O(m) per block.
CoeffGrid apply_laplacian(const BlockPencil& pencil, const CoeffGrid& c);

/// Per-block premultiplied pieces, for assembling stage right-hand sides.
CoeffGrid apply_A(const BlockPencil& pencil, const CoeffGrid& c);  // A_i c_i
CoeffGrid apply_B(const BlockPencil& pencil, const CoeffGrid& c);  // T_sin2 c_i
CoeffGrid solve_B(const BlockPencil& pencil, const CoeffGrid& c);  // T_sin2^{-1} c_i

/// B y_i + s A_i z_i in a single traversal (z may be null); the stage
/// right-hand-side kernel of the implicit-explicit steppers.
CoeffGrid premultiplied_rhs(const BlockPencil& pencil, const CoeffGrid& y, const CMatrix* z,
                            Complex s);

/// Dense l x l operator of one parity chain of block i (the even and odd
/// latitudinal modes of B^{-1} A_i decouple; eigenwork is done per chain so
/// the cross-parity eigenvalue collisions cannot degrade the basis).
CMatrix dense_chain_operator(const BlockPencil& pencil, int block, int parity);

/// Dense per-block generalized eigendecomposition report.  cond_V is the
/// condition number of the full (block-diagonal) eigenvector basis.
struct SpectralDiagnostics {
    double max_abs_eig = 0.0;
    double max_imag = 0.0;      // largest |Im(lambda)|
    double max_real_pos = 0.0;  // largest positive Re(lambda), 0 if none
    bool all_real = false;      // to 1e-8 relative
    bool all_nonpositive = false;
    double cond_V = 0.0;
};

/// Guarded to m <= 128 (dense per-block eigensolves are desk-scale only).
SpectralDiagnostics spectral_diagnostics(const BlockPencil& pencil);

/// Analytic eigenvalues of Msin2(3:m+3, 3:m+3): the union of
/// (cos(pi j/(m/2+1))+1)/2, j=1..m/2 and (cos(pi j/(m/2+2))+1)/2, j=1..m/2+1.
/// Their reciprocal bounds ||T_sin2^{-1}|| = O(m^2).
RVector msin2_cluster_eigs(int m);

}  // namespace spherepde
