#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "spherepde/laplacian.hpp"
#include "spherepde/mult_matrices.hpp"
#include "spherepde/types.hpp"

namespace spherepde {

/// LU without pivoting of an l x l tridiagonal-with-two-corners matrix
/// (corners at (0,l-1) and (l-1,0)).  L is unit lower bidiagonal plus a
/// filled last row, U upper bidiagonal plus a filled last column: at most
/// three nonzeros per column of L and per row of U, so triangular solves
/// cost O(l).
struct CornerTridiagLU {
    int size = 0;
    CVector du;      // U(a,a)
    CVector du_inv;  // reciprocal pivots, applied multiplicatively in solves
    CVector eu;      // U(a,a+1), size l-1
    CVector ucol;    // U(a,l-1), a = 0..l-3
    CVector lsub;    // L(a+1,a), a = 0..l-3
    CVector lrow;    // L(l-1,a), a = 0..l-2

    void solve_inplace(Complex* x, int stride) const;
    double max_abs_lower() const;
    CMatrix dense_L() const;
    CMatrix dense_U() const;
};

/// The even/odd latitudinal modes of a banded+corner block decouple (every
/// other term of the factors is zero), so a block factorization is a pair of
/// chain LUs over the strided index sets.
struct BlockFactor {
    int m = 0;
    CornerTridiagLU even;  // indices 0,2,..,m-2; carries the corner entries
    CornerTridiagLU odd;   // indices 1,3,..,m-1; plain tridiagonal

    void solve_inplace(Complex* x) const;
    /// The same factor applied to every column of x (T_sin2 is shared by all
    /// blocks); arithmetic identical to per-column solve_inplace.
    void solve_matrix(CMatrix& x) const;
    double max_abs_lower() const;
    CMatrix dense_L() const;
    CMatrix dense_U() const;
};

/// Factor a banded+corner matrix.  Throws on pivot breakdown or when any
/// multiplier exceeds 1e6 in magnitude; block_index only labels the message.
BlockFactor factor_banded(const BandedCornerMatrix& s, int block_index = -1);

/// Factor data of one parity chain laid out across blocks: column a holds
/// the chain-position-a entries of every block, so the triangular sweeps
/// vectorize over the n independent systems (the whole-grid batched solve;
/// elementwise it performs exactly the blockwise arithmetic).
struct BatchedChainLU {
    int l = 0;
    CMatrix du_inv;  // n x l, reciprocal pivots
    CMatrix eu;      // n x (l-1)
    CMatrix ucol;  // n x (l-2)
    CMatrix lsub;  // n x (l-2)
    CMatrix lrow;  // n x (l-1)

    /// Solve in place on the n x l transposed right-hand side (row = block).
    void solve_transposed(CMatrix& xt) const;
};

/// Cached factorization of z*B_i + w*A_i for every block of a pencil.
struct BlockLU {
    Complex z{0.0, 0.0};
    Complex w{0.0, 0.0};
    GridSpec spec;
    std::vector<std::optional<BlockFactor>> blocks;  // n entries
    BatchedChainLU even_batch, odd_batch;            // empty when a block is skipped
    bool has_skip = false;
    double max_abs_lower = 0.0;
    /// Blocks whose z B + w A_i is not row diagonally dominant.  Dominance is
    /// only a sufficient condition for the pivot-free factorization, so these
    /// are recorded, not rejected.
    std::vector<int> non_dominant_blocks;
};

/// skip_block leaves one block unfactored (the Poisson k=0 block gets a
/// constraint row and a dense solve instead).
BlockLU factor_shifted(const BlockPencil& pencil, Complex z, Complex w,
                       std::optional<int> skip_block = std::nullopt);

/// Solve (z I + w alpha Delta) x = b blockwise as (z B + w A_i) x_i = B b_i.
CoeffGrid solve_shifted(const BlockLU& lu, const BlockPencil& pencil, const CoeffGrid& b);

/// Solve (z B + w A_i) x_i = rhs_i where rhs is already premultiplied (stage
/// right-hand sides carry their own B- and A-applications).
CoeffGrid solve_premultiplied(const BlockLU& lu, const CoeffGrid& rhs);

/// Factor store keyed by exact (z, w) bits; steppers fill it before stepping.
class FactorCache {
  public:
    explicit FactorCache(const BlockPencil& pencil) : pencil_(&pencil) {}

    const BlockLU& get(Complex z, Complex w);
    const BlockPencil& pencil() const { return *pencil_; }

  private:
    struct Key {
        double zr, zi, wr, wi;
        bool operator<(const Key& o) const;
    };
    const BlockPencil* pencil_;
    std::map<Key, std::unique_ptr<BlockLU>> cache_;
};

/// Running count of whole-grid shifted solves (one per solve_shifted call).
long long block_solve_count();
void reset_block_solve_count();

}  // namespace spherepde
