#include "spherepde/linsolve.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spherepde {

namespace {

std::atomic<long long> g_solve_count{0};

constexpr double kMultiplierLimit = 1e6;

[[noreturn]] void breakdown(int block_index, int position) {
    throw std::runtime_error("LU factorization breakdown (zero pivot) in block " +
                             std::to_string(block_index) + " at chain position " +
                             std::to_string(position));
}

// Chain view of a banded+corner block: entries (base + 2a) for a = 0..l-1.
struct ChainView {
    CVector d, e, f;
    Complex cu{0.0, 0.0}, cl{0.0, 0.0};
};

ChainView extract_chain(const BandedCornerMatrix& s, int base) {
    const int m = s.m;
    const int l = m / 2;
    ChainView c;
    c.d.resize(l);
    c.e.resize(l - 1);
    c.f.resize(l - 1);
    for (int a = 0; a < l; ++a) c.d[a] = s.diag[base + 2 * a];
    for (int a = 0; a + 1 < l; ++a) {
        c.e[a] = s.upper2[base + 2 * a];
        c.f[a] = s.lower2[base + 2 * a];
    }
    if (base == 0) {
        c.cu = s.corner_at(0, m - 2);
        c.cl = s.corner_at(m - 2, 0);
    }
    // Odd-chain corners would sit at (1, m-1)/(m-1, 1); nothing assembles them.
    return c;
}

CornerTridiagLU factor_chain(const ChainView& s, int block_index) {
    const int l = static_cast<int>(s.d.size());
    if (l < 3) throw std::invalid_argument("chain LU needs l >= 3 (m >= 6)");
    CornerTridiagLU lu;
    lu.size = l;
    lu.du = s.d;
    lu.eu = s.e;
    lu.ucol = CVector::Zero(l - 2);
    lu.lsub = CVector::Zero(l - 2);
    lu.ucol[0] = s.cu;
    // Border row working copy: w[a] = current entry (l-1, a).
    CVector w = CVector::Zero(l);
    w[0] = s.cl;
    w[l - 2] += s.f[l - 2];
    w[l - 1] = s.d[l - 1];
    for (int a = 0; a <= l - 3; ++a) {
        const Complex piv = lu.du[a];
        if (!(std::abs(piv) > 0.0) || !std::isfinite(std::abs(piv))) breakdown(block_index, a);
        const Complex ua = lu.ucol[a];
        // Normal row a+1.
        const Complex l1 = s.f[a] / piv;
        lu.lsub[a] = l1;
        lu.du[a + 1] -= l1 * lu.eu[a];
        if (a + 1 <= l - 3) {
            lu.ucol[a + 1] -= l1 * ua;
        } else {
            lu.eu[l - 2] -= l1 * ua;  // (l-2, l-1) lands on the band slot
        }
        // Border row l-1.
        if (w[a] != Complex(0.0, 0.0)) {
            const Complex lr = w[a] / piv;
            w[a] = lr;
            w[a + 1] -= lr * lu.eu[a];
            w[l - 1] -= lr * ua;
        }
    }
    {
        const Complex piv = lu.du[l - 2];
        if (!(std::abs(piv) > 0.0) || !std::isfinite(std::abs(piv))) breakdown(block_index, l - 2);
        const Complex lr = w[l - 2] / piv;
        w[l - 2] = lr;
        w[l - 1] -= lr * lu.eu[l - 2];
        lu.du[l - 1] = w[l - 1];
        if (!(std::abs(lu.du[l - 1]) > 0.0)) breakdown(block_index, l - 1);
    }
    lu.lrow = w.head(l - 1);
    lu.du_inv.resize(l);
    for (int a = 0; a < l; ++a) lu.du_inv[a] = Complex(1.0, 0.0) / lu.du[a];
    return lu;
}

}  // namespace

void CornerTridiagLU::solve_inplace(Complex* x, int stride) const {
    const int l = size;
    auto at = [&](int a) -> Complex& { return x[a * stride]; };
    // Forward substitution.
    for (int a = 1; a <= l - 2; ++a) at(a) -= lsub[a - 1] * at(a - 1);
    Complex acc = at(l - 1);
    for (int a = 0; a <= l - 2; ++a) acc -= lrow[a] * at(a);
    at(l - 1) = acc;
    // Back substitution (precomputed reciprocal pivots).
    at(l - 1) *= du_inv[l - 1];
    at(l - 2) = (at(l - 2) - eu[l - 2] * at(l - 1)) * du_inv[l - 2];
    for (int a = l - 3; a >= 0; --a) {
        at(a) = (at(a) - eu[a] * at(a + 1) - ucol[a] * at(l - 1)) * du_inv[a];
    }
}

double CornerTridiagLU::max_abs_lower() const {
    double worst = 0.0;
    for (int a = 0; a < lsub.size(); ++a) worst = std::max(worst, std::abs(lsub[a]));
    for (int a = 0; a < lrow.size(); ++a) worst = std::max(worst, std::abs(lrow[a]));
    return worst;
}

CMatrix CornerTridiagLU::dense_L() const {
    CMatrix L = CMatrix::Identity(size, size);
    for (int a = 0; a <= size - 3; ++a) L(a + 1, a) = lsub[a];
    for (int a = 0; a <= size - 2; ++a) L(size - 1, a) = lrow[a];
    return L;
}

CMatrix CornerTridiagLU::dense_U() const {
    CMatrix U = CMatrix::Zero(size, size);
    for (int a = 0; a < size; ++a) U(a, a) = du[a];
    for (int a = 0; a <= size - 2; ++a) U(a, a + 1) = eu[a];
    for (int a = 0; a <= size - 3; ++a) U(a, size - 1) += ucol[a];
    return U;
}

void BlockFactor::solve_inplace(Complex* x) const {
    even.solve_inplace(x, 2);
    odd.solve_inplace(x + 1, 2);
}

namespace {

// Shared-factor batched sweep: scalar chain coefficients across contiguous
// length-n columns of the transposed unknowns.
void chain_solve_transposed(const CornerTridiagLU& lu, CMatrix& xt) {
    const int l = lu.size;
    const int n = static_cast<int>(xt.rows());
    auto xcol = [&](int j) { return xt.data() + static_cast<size_t>(j) * n; };
    for (int a = 1; a <= l - 2; ++a) {
        const Complex ls = lu.lsub[a - 1];
        const Complex* prev = xcol(a - 1);
        Complex* cur = xcol(a);
        for (int i = 0; i < n; ++i) cur[i] -= ls * prev[i];
    }
    {
        Complex* last = xcol(l - 1);
        for (int a = 0; a <= l - 2; ++a) {
            const Complex lr = lu.lrow[a];
            const Complex* cur = xcol(a);
            for (int i = 0; i < n; ++i) last[i] -= lr * cur[i];
        }
        const Complex d = lu.du_inv[l - 1];
        for (int i = 0; i < n; ++i) last[i] *= d;
    }
    {
        Complex* cur = xcol(l - 2);
        const Complex* last = xcol(l - 1);
        const Complex e = lu.eu[l - 2];
        const Complex d = lu.du_inv[l - 2];
        for (int i = 0; i < n; ++i) cur[i] = (cur[i] - e * last[i]) * d;
    }
    for (int a = l - 3; a >= 0; --a) {
        Complex* cur = xcol(a);
        const Complex* nxt = xcol(a + 1);
        const Complex* last = xcol(l - 1);
        const Complex e = lu.eu[a];
        const Complex uc = lu.ucol[a];
        const Complex d = lu.du_inv[a];
        for (int i = 0; i < n; ++i) cur[i] = (cur[i] - e * nxt[i] - uc * last[i]) * d;
    }
}

void split_rows_transposed(const CMatrix& x, CMatrix& even_t, CMatrix& odd_t) {
    const int m = static_cast<int>(x.rows());
    const int n = static_cast<int>(x.cols());
    const int l = m / 2;
    even_t.resize(n, l);
    odd_t.resize(n, l);
    for (int a = 0; a < l; ++a) {
        even_t.col(a) = x.row(2 * a).transpose();
        odd_t.col(a) = x.row(2 * a + 1).transpose();
    }
}

void merge_rows_transposed(const CMatrix& even_t, const CMatrix& odd_t, CMatrix& x) {
    const int l = static_cast<int>(even_t.cols());
    for (int a = 0; a < l; ++a) {
        x.row(2 * a) = even_t.col(a).transpose();
        x.row(2 * a + 1) = odd_t.col(a).transpose();
    }
}

}  // namespace

void BlockFactor::solve_matrix(CMatrix& x) const {
    CMatrix even_t, odd_t;
    split_rows_transposed(x, even_t, odd_t);
    chain_solve_transposed(even, even_t);
    chain_solve_transposed(odd, odd_t);
    merge_rows_transposed(even_t, odd_t, x);
}

double BlockFactor::max_abs_lower() const {
    return std::max(even.max_abs_lower(), odd.max_abs_lower());
}

namespace {

CMatrix interleave(const CMatrix& ev, const CMatrix& od, int m) {
    CMatrix out = CMatrix::Zero(m, m);
    const int l = m / 2;
    for (int a = 0; a < l; ++a) {
        for (int b = 0; b < l; ++b) {
            out(2 * a, 2 * b) = ev(a, b);
            out(2 * a + 1, 2 * b + 1) = od(a, b);
        }
    }
    return out;
}

}  // namespace

CMatrix BlockFactor::dense_L() const { return interleave(even.dense_L(), odd.dense_L(), m); }
CMatrix BlockFactor::dense_U() const { return interleave(even.dense_U(), odd.dense_U(), m); }

BlockFactor factor_banded(const BandedCornerMatrix& s, int block_index) {
    if (s.m < 6 || s.m % 2 != 0) {
        throw std::invalid_argument("factor_banded: even m >= 6 required");
    }
    for (const auto& c : s.corners) {
        const bool canonical = (c.row == 0 && c.col == s.m - 2) || (c.row == s.m - 2 && c.col == 0);
        if (!canonical && c.value != Complex(0.0, 0.0)) {
            throw std::invalid_argument("factor_banded: unsupported corner position");
        }
    }
    BlockFactor f;
    f.m = s.m;
    f.even = factor_chain(extract_chain(s, 0), block_index);
    f.odd = factor_chain(extract_chain(s, 1), block_index);
    const double worst = f.max_abs_lower();
    if (!(worst <= kMultiplierLimit)) {
        throw std::runtime_error("LU without pivoting unstable in block " +
                                 std::to_string(block_index) + ": |L| reached " +
                                 std::to_string(worst));
    }
    return f;
}

void BatchedChainLU::solve_transposed(CMatrix& xt) const {
    // Column a of xt is the chain-position-a unknown of every block; each
    // sweep below is the blockwise recurrence run across all blocks at once.
    // Explicit std::complex loops keep the arithmetic bitwise identical to
    // CornerTridiagLU::solve_inplace.
    const int n = static_cast<int>(xt.rows());
    auto col = [&](const CMatrix& a, int j) { return a.data() + static_cast<size_t>(j) * n; };
    auto xcol = [&](int j) { return xt.data() + static_cast<size_t>(j) * n; };
    for (int a = 1; a <= l - 2; ++a) {
        const Complex* ls = col(lsub, a - 1);
        const Complex* prev = xcol(a - 1);
        Complex* cur = xcol(a);
        for (int i = 0; i < n; ++i) cur[i] -= ls[i] * prev[i];
    }
    {
        Complex* last = xcol(l - 1);
        for (int a = 0; a <= l - 2; ++a) {
            const Complex* lr = col(lrow, a);
            const Complex* cur = xcol(a);
            for (int i = 0; i < n; ++i) last[i] -= lr[i] * cur[i];
        }
        const Complex* d = col(du_inv, l - 1);
        for (int i = 0; i < n; ++i) last[i] *= d[i];
    }
    {
        Complex* cur = xcol(l - 2);
        const Complex* last = xcol(l - 1);
        const Complex* e = col(eu, l - 2);
        const Complex* d = col(du_inv, l - 2);
        for (int i = 0; i < n; ++i) cur[i] = (cur[i] - e[i] * last[i]) * d[i];
    }
    for (int a = l - 3; a >= 0; --a) {
        Complex* cur = xcol(a);
        const Complex* nxt = xcol(a + 1);
        const Complex* last = xcol(l - 1);
        const Complex* e = col(eu, a);
        const Complex* uc = col(ucol, a);
        const Complex* d = col(du_inv, a);
        for (int i = 0; i < n; ++i) cur[i] = (cur[i] - e[i] * nxt[i] - uc[i] * last[i]) * d[i];
    }
}

namespace {

BatchedChainLU batch_chains(const BlockLU& lu, int parity) {
    const int n = lu.spec.n;
    const int l = lu.spec.m / 2;
    BatchedChainLU batch;
    batch.l = l;
    batch.du_inv.resize(n, l);
    batch.eu.resize(n, l - 1);
    batch.ucol.resize(n, l - 2);
    batch.lsub.resize(n, l - 2);
    batch.lrow.resize(n, l - 1);
    for (int i = 0; i < n; ++i) {
        const CornerTridiagLU& chain = (parity == 0) ? lu.blocks[i]->even : lu.blocks[i]->odd;
        batch.du_inv.row(i) = chain.du_inv.transpose();
        batch.eu.row(i) = chain.eu.transpose();
        batch.ucol.row(i) = chain.ucol.transpose();
        batch.lsub.row(i) = chain.lsub.transpose();
        batch.lrow.row(i) = chain.lrow.transpose();
    }
    return batch;
}

}  // namespace

BlockLU factor_shifted(const BlockPencil& pencil, Complex z, Complex w,
                       std::optional<int> skip_block) {
    BlockLU lu;
    lu.z = z;
    lu.w = w;
    lu.spec = pencil.spec;
    lu.has_skip = skip_block.has_value();
    lu.blocks.resize(pencil.spec.n);
    for (int i = 0; i < pencil.spec.n; ++i) {
        if (skip_block && *skip_block == i) continue;
        const BandedCornerMatrix s = pencil.B.scaled(z).plus(pencil.block_A(i).scaled(w));
        lu.blocks[i] = factor_banded(s, i);
        lu.max_abs_lower = std::max(lu.max_abs_lower, lu.blocks[i]->max_abs_lower());
        // Row diagonal dominance check (off-diagonal mass per row).
        const int m = s.m;
        Eigen::VectorXd off = Eigen::VectorXd::Zero(m);
        for (int r = 0; r + 2 < m; ++r) {
            off[r] += std::abs(s.upper2[r]);
            off[r + 2] += std::abs(s.lower2[r]);
        }
        for (const auto& c : s.corners) off[c.row] += std::abs(c.value);
        bool dominant = true;
        for (int r = 0; r < m; ++r) {
            if (std::abs(s.diag[r]) < off[r]) dominant = false;
        }
        if (!dominant) lu.non_dominant_blocks.push_back(i);
    }
    if (!lu.has_skip) {
        lu.even_batch = batch_chains(lu, 0);
        lu.odd_batch = batch_chains(lu, 1);
    }
    return lu;
}

namespace {

void batched_solve_inplace(const BlockLU& lu, CMatrix& x) {
    CMatrix even_t, odd_t;
    split_rows_transposed(x, even_t, odd_t);
    lu.even_batch.solve_transposed(even_t);
    lu.odd_batch.solve_transposed(odd_t);
    merge_rows_transposed(even_t, odd_t, x);
}

}  // namespace

CoeffGrid solve_shifted(const BlockLU& lu, const BlockPencil& pencil, const CoeffGrid& b) {
    if (b.m() != pencil.spec.m || b.n() != pencil.spec.n || lu.spec.m != pencil.spec.m ||
        lu.spec.n != pencil.spec.n) {
        throw std::invalid_argument("solve_shifted: factor/pencil/rhs shape mismatch");
    }
    if (lu.has_skip) {
        throw std::runtime_error("solve_shifted: factorization has a skipped block");
    }
    CoeffGrid x{pencil.B.apply_matrix(b.data)};
    batched_solve_inplace(lu, x.data);
    g_solve_count.fetch_add(1, std::memory_order_relaxed);
    return x;
}

CoeffGrid solve_premultiplied(const BlockLU& lu, const CoeffGrid& rhs) {
    if (rhs.m() != lu.spec.m || rhs.n() != lu.spec.n) {
        throw std::invalid_argument("solve_premultiplied: factor/rhs shape mismatch");
    }
    if (lu.has_skip) {
        throw std::runtime_error("solve_premultiplied: factorization has a skipped block");
    }
    CoeffGrid x = rhs;
    batched_solve_inplace(lu, x.data);
    g_solve_count.fetch_add(1, std::memory_order_relaxed);
    return x;
}

bool FactorCache::Key::operator<(const Key& o) const {
    if (zr != o.zr) return zr < o.zr;
    if (zi != o.zi) return zi < o.zi;
    if (wr != o.wr) return wr < o.wr;
    return wi < o.wi;
}

const BlockLU& FactorCache::get(Complex z, Complex w) {
    Key key{z.real(), z.imag(), w.real(), w.imag()};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        it = cache_.emplace(key, std::make_unique<BlockLU>(factor_shifted(*pencil_, z, w))).first;
    }
    return *it->second;
}

long long block_solve_count() { return g_solve_count.load(std::memory_order_relaxed); }
void reset_block_solve_count() { g_solve_count.store(0, std::memory_order_relaxed); }

}  // namespace spherepde
