#include "spherepde/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "spherepde/fourier.hpp"
#include "spherepde/linsolve.hpp"

namespace spherepde {

BandedCornerMatrix BlockPencil::block_A(int i) const {
    return A_base.plus_diagonal(alpha * d2n[i]);
}

BlockPencil assemble_laplacian(const GridSpec& spec, Complex alpha) {
    spec.require_valid();
    if (spec.m < 8 || spec.n < 8) {
        throw std::invalid_argument("assemble_laplacian: m, n >= 8 required");
    }
    BlockPencil pencil;
    pencil.spec = spec;
    pencil.alpha = alpha;
    const BandedCornerMatrix tsin2 = build_tsin2(spec.m);
    const BandedCornerMatrix tcossin = build_tcossin(spec.m);
    const DiagDiffMatrix d1 = diff_matrix(spec.m, 1);
    const DiagDiffMatrix d2 = diff_matrix(spec.m, 2);
    pencil.A_base =
        tsin2.scaled_columns(d2.diagonal).plus(tcossin.scaled_columns(d1.diagonal)).scaled(alpha);
    pencil.d2n.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        const double k = wavenumber(i, spec.n);
        pencil.d2n[i] = -k * k;
    }
    pencil.B = tsin2;
    pencil.b_factor = std::make_shared<const BlockFactor>(factor_banded(tsin2));
    return pencil;
}

CoeffGrid apply_laplacian(const BlockPencil& pencil, const CoeffGrid& c) {
    CoeffGrid out = apply_A(pencil, c);
    pencil.b_factor->solve_matrix(out.data);
    return out;
}

CoeffGrid apply_A(const BlockPencil& pencil, const CoeffGrid& c) {
    if (c.m() != pencil.spec.m || c.n() != pencil.spec.n) {
        throw std::invalid_argument("apply_A: shape mismatch");
    }
    CoeffGrid out{pencil.A_base.apply_matrix(c.data)};
    CVector scale(pencil.spec.n);
    for (int i = 0; i < pencil.spec.n; ++i) scale[i] = pencil.alpha * pencil.d2n[i];
    out.data += c.data * scale.asDiagonal();
    return out;
}

CoeffGrid apply_B(const BlockPencil& pencil, const CoeffGrid& c) {
    return CoeffGrid{pencil.B.apply_matrix(c.data)};
}

CoeffGrid solve_B(const BlockPencil& pencil, const CoeffGrid& c) {
    CoeffGrid out = c;
    pencil.b_factor->solve_matrix(out.data);
    return out;
}

CoeffGrid premultiplied_rhs(const BlockPencil& pencil, const CoeffGrid& y, const CMatrix* z,
                            Complex s) {
    const int m = pencil.spec.m, n = pencil.spec.n;
    if (y.m() != m || y.n() != n || (z != nullptr && (z->rows() != m || z->cols() != n))) {
        throw std::invalid_argument("premultiplied_rhs: shape mismatch");
    }
    const BandedCornerMatrix& b = pencil.B;
    const BandedCornerMatrix& a = pencil.A_base;
    CoeffGrid out{CMatrix(m, n)};
    for (int i = 0; i < n; ++i) {
        const Complex* yc = y.data.col(i).data();
        Complex* oc = out.data.col(i).data();
        if (z == nullptr) {
            for (int r = 0; r < m; ++r) oc[r] = b.diag[r] * yc[r];
            for (int r = 0; r + 2 < m; ++r) oc[r] += b.upper2[r] * yc[r + 2];
            for (int r = 0; r + 2 < m; ++r) oc[r + 2] += b.lower2[r] * yc[r];
            for (const auto& c : b.corners) oc[c.row] += c.value * yc[c.col];
        } else {
            const Complex* zc = z->col(i).data();
            const Complex shift = s * pencil.alpha * pencil.d2n[i];
            for (int r = 0; r < m; ++r) {
                oc[r] = b.diag[r] * yc[r] + s * (a.diag[r] * zc[r]) + shift * zc[r];
            }
            for (int r = 0; r + 2 < m; ++r) {
                oc[r] += b.upper2[r] * yc[r + 2] + s * (a.upper2[r] * zc[r + 2]);
            }
            for (int r = 0; r + 2 < m; ++r) {
                oc[r + 2] += b.lower2[r] * yc[r] + s * (a.lower2[r] * zc[r]);
            }
            for (const auto& c : b.corners) oc[c.row] += c.value * yc[c.col];
            for (const auto& c : a.corners) oc[c.row] += s * (c.value * zc[c.col]);
        }
    }
    return out;
}

CMatrix dense_chain_operator(const BlockPencil& pencil, int block, int parity) {
    const int m = pencil.spec.m;
    const int l = m / 2;
    auto chain_of = [&](const BandedCornerMatrix& s) {
        CMatrix c = CMatrix::Zero(l, l);
        for (int a = 0; a < l; ++a) c(a, a) = s.diag[parity + 2 * a];
        for (int a = 0; a + 1 < l; ++a) {
            c(a, a + 1) = s.upper2[parity + 2 * a];
            c(a + 1, a) = s.lower2[parity + 2 * a];
        }
        if (parity == 0) {
            c(0, l - 1) += s.corner_at(0, m - 2);
            c(l - 1, 0) += s.corner_at(m - 2, 0);
        }
        return c;
    };
    const CMatrix b_chain = chain_of(pencil.B);
    const CMatrix a_chain = chain_of(pencil.block_A(block));
    return b_chain.partialPivLu().solve(a_chain);
}

SpectralDiagnostics spectral_diagnostics(const BlockPencil& pencil) {
    const int m = pencil.spec.m, n = pencil.spec.n;
    if (m > 128) {
        throw std::invalid_argument("spectral_diagnostics: dense eigensolves guarded to m <= 128");
    }
    SpectralDiagnostics diag;
    double sigma_max = 0.0;
    double sigma_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int parity = 0; parity < 2; ++parity) {
            const CMatrix chain = dense_chain_operator(pencil, i, parity);
            Eigen::ComplexEigenSolver<CMatrix> es(chain, /*computeEigenvectors=*/true);
            if (es.info() != Eigen::Success) {
                throw std::runtime_error("spectral_diagnostics: eigensolver failed on block " +
                                         std::to_string(i));
            }
            const int l = static_cast<int>(chain.rows());
            for (int j = 0; j < l; ++j) {
                const Complex ev = es.eigenvalues()[j];
                diag.max_abs_eig = std::max(diag.max_abs_eig, std::abs(ev));
                diag.max_imag = std::max(diag.max_imag, std::abs(ev.imag()));
                diag.max_real_pos = std::max(diag.max_real_pos, ev.real());
            }
            Eigen::JacobiSVD<CMatrix> svd(es.eigenvectors());
            sigma_max = std::max(sigma_max, svd.singularValues()[0]);
            sigma_min = std::min(sigma_min, svd.singularValues()[l - 1]);
        }
    }
    diag.max_real_pos = std::max(0.0, diag.max_real_pos);
    diag.cond_V = sigma_max / sigma_min;
    const double tol = 1e-8 * diag.max_abs_eig;
    diag.all_real = diag.max_imag <= tol;
    diag.all_nonpositive = diag.max_real_pos <= tol;
    return diag;
}

RVector msin2_cluster_eigs(int m) {
    if (m < 6 || m % 2 != 0) {
        throw std::invalid_argument("msin2_cluster_eigs: even m >= 6 required");
    }
    const double pi = std::numbers::pi;
    RVector eigs(m + 1);
    int idx = 0;
    for (int j = 1; j <= m / 2; ++j) {
        eigs[idx++] = 0.5 * (std::cos(pi * j / (m / 2 + 1)) + 1.0);
    }
    for (int j = 1; j <= m / 2 + 1; ++j) {
        eigs[idx++] = 0.5 * (std::cos(pi * j / (m / 2 + 2)) + 1.0);
    }
    std::sort(eigs.data(), eigs.data() + eigs.size());
    return eigs;
}

}  // namespace spherepde
