#include "spherepde/phi_functions.hpp"

#include "spherepde/parallel.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace spherepde {

namespace {

std::atomic<long long> g_matvec_count{0};

constexpr double kSeriesRadius = 1e-2;  // below this the divided forms cancel

Complex phi_series(int l, Complex z) {
    // sum_{k>=0} z^k / (k+l)!
    double fact = 1.0;
    for (int i = 2; i <= l; ++i) fact *= i;
    Complex term(1.0 / fact, 0.0);
    Complex acc = term;
    for (int k = 1; k <= 24; ++k) {
        term *= z / static_cast<double>(k + l);
        acc += term;
    }
    return acc;
}

}  // namespace

Complex phi_scalar(int l, Complex z) {
    if (l < 0 || l > 3) throw std::invalid_argument("phi_scalar: l must be 0..3");
    if (l == 0) return std::exp(z);
    if (std::abs(z) < kSeriesRadius) return phi_series(l, z);
    const Complex ez = std::exp(z);
    switch (l) {
        case 1:
            return (ez - 1.0) / z;
        case 2:
            return (ez - 1.0 - z) / (z * z);
        default:
            return (ez - 1.0 - z - 0.5 * z * z) / (z * z * z);
    }
}

Complex phi_contour(int l, Complex z, int contour_points, double radius) {
    const double pi = std::numbers::pi;
    Complex acc(0.0, 0.0);
    for (int k = 1; k <= contour_points; ++k) {
        const double angle = 2.0 * pi * (k - 0.5) / contour_points;
        acc += phi_scalar(l, z + radius * std::exp(Complex(0.0, angle)));
    }
    return acc / static_cast<double>(contour_points);
}

// ---------------------------------------------------------------------------
// Caratheodory-Fejer construction (long double internals).

namespace {

using LD = long double;
using CLD = std::complex<LD>;
using MatrixLD = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
using VectorLD = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
using VectorCLD = Eigen::Matrix<CLD, Eigen::Dynamic, 1>;

constexpr int kCfSamples = 1024;  // unit-circle sample count
constexpr int kCfCoeffs = 75;     // retained Chebyshev coefficients
constexpr LD kCfScale = 9.0L;     // half-line-to-disk transplant parameter

// Descending-coefficient Horner.
CLD polyval_desc(const VectorCLD& coeffs, CLD x) {
    CLD acc(0.0L, 0.0L);
    for (int i = 0; i < coeffs.size(); ++i) acc = acc * x + coeffs[i];
    return acc;
}

// Roots of a real descending-coefficient polynomial via a double-precision
// companion matrix, Newton-polished in long double.
std::vector<CLD> poly_roots(const VectorLD& coeffs_desc) {
    int start = 0;
    const LD maxc = coeffs_desc.cwiseAbs().maxCoeff();
    while (start < coeffs_desc.size() - 1 &&
           std::abs(coeffs_desc[start]) < 1e-13L * maxc) {
        ++start;
    }
    const int deg = static_cast<int>(coeffs_desc.size()) - 1 - start;
    if (deg < 1) return {};
    CMatrix companion = CMatrix::Zero(deg, deg);
    for (int j = 0; j < deg; ++j) {
        companion(0, j) = -static_cast<double>(coeffs_desc[start + 1 + j] / coeffs_desc[start]);
    }
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<CMatrix> es(companion, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("cf_build: companion eigensolver failed");
    }
    VectorCLD full(coeffs_desc.size());
    for (int i = 0; i < coeffs_desc.size(); ++i) full[i] = CLD(coeffs_desc[i], 0.0L);
    VectorCLD deriv(coeffs_desc.size() - 1);
    const int n = static_cast<int>(coeffs_desc.size()) - 1;
    for (int i = 0; i < n; ++i) deriv[i] = full[i] * static_cast<LD>(n - i);
    std::vector<CLD> roots(deg);
    for (int r = 0; r < deg; ++r) {
        CLD x(es.eigenvalues()[r].real(), es.eigenvalues()[r].imag());
        for (int it = 0; it < 4; ++it) {
            const CLD p = polyval_desc(full, x);
            const CLD dp = polyval_desc(deriv, x);
            if (std::abs(dp) == 0.0L) break;
            x -= p / dp;
        }
        roots[r] = x;
    }
    return roots;
}

}  // namespace

Complex CfApproximant::evaluate_exp(double x) const {
    Complex acc(r_inf, 0.0);
    for (int j = 0; j < p; ++j) acc += residues[j] / (Complex(x, 0.0) - poles[j]);
    return acc;
}

Complex CfApproximant::evaluate_phi(int l, double x) const {
    if (l == 0) return evaluate_exp(x);
    Complex acc(0.0, 0.0);
    for (int j = 0; j < p; ++j) {
        acc += residues[j] * std::pow(poles[j], -static_cast<double>(l)) /
               (Complex(x, 0.0) - poles[j]);
    }
    return acc;
}

CfApproximant cf_build(int p) {
    if (p != 10 && p != 12 && p != 14) {
        throw std::invalid_argument("cf_build: p must be 10, 12 or 14");
    }
    const int nf = kCfSamples;
    const int K = kCfCoeffs;
    const LD pi = std::numbers::pi_v<LD>;

    // Samples of the transplanted exponential on the unit circle.
    VectorLD F(nf);
    for (int k = 0; k < nf; ++k) {
        const LD t = std::cos(2.0L * pi * k / nf);
        F[k] = (t <= -1.0L) ? 0.0L : std::exp(kCfScale * (t - 1.0L) / (t + 1.0L));
    }
    // Laurent coefficients c_i = (1/nf) sum_k F_k cos(2 pi i k / nf) (F is even).
    VectorLD c(K + 1);
    for (int i = 0; i <= K; ++i) {
        LD acc = 0.0L;
        for (int k = 0; k < nf; ++k) acc += F[k] * std::cos(2.0L * pi * i * k / nf);
        c[i] = acc / nf;
    }

    // Singular triple p of the Hankel matrix of c_1..c_K.
    MatrixLD hankel = MatrixLD::Zero(K, K);
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K - i; ++j) hankel(i, j) = c[i + j + 1];
    }
    Eigen::JacobiSVD<MatrixLD> svd(hankel, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const LD s = svd.singularValues()[p];
    VectorLD u_rev(K), v(K);
    for (int i = 0; i < K; ++i) {
        u_rev[i] = svd.matrixU()(K - 1 - i, p);
        v[i] = svd.matrixV()(i, p);
    }

    // r-tilde = analytic part minus the Blaschke error term, on the circle.
    VectorCLD rt(nf);
    for (int k = 0; k < nf; ++k) {
        const CLD w = std::exp(CLD(0.0L, 2.0L * pi * k / nf));
        const CLD wc = std::conj(w);
        CLD f(0.0L, 0.0L), bn(0.0L, 0.0L), bd(0.0L, 0.0L);
        CLD wpow(1.0L, 0.0L);
        for (int i = 0; i <= K; ++i) {
            f += c[i] * wpow;
            wpow *= w;
        }
        CLD wcpow(1.0L, 0.0L);
        for (int i = 0; i < K; ++i) {
            bn += u_rev[i] * wcpow;
            bd += v[i] * wcpow;
            wcpow *= wc;
        }
        CLD wK(1.0L, 0.0L);
        for (int i = 0; i < K; ++i) wK *= w;
        rt[k] = f - s * wK * bn / bd;
    }

    // Poles: the p roots of the v-polynomial outside the unit disk.
    std::vector<CLD> zeta;
    for (const CLD& root : poly_roots(v)) {
        if (std::abs(root) > 1.0L) zeta.push_back(root);
    }
    if (static_cast<int>(zeta.size()) != p) {
        throw std::runtime_error("cf_build: expected " + std::to_string(p) +
                                 " poles, found " + std::to_string(zeta.size()));
    }

    // Monic denominator from the poles, descending coefficients.
    VectorCLD qc = VectorCLD::Zero(p + 1);
    qc[0] = CLD(1.0L, 0.0L);
    for (int k = 0; k < p; ++k) {
        for (int i = k + 1; i >= 1; --i) qc[i] -= zeta[k] * qc[i - 1];
    }

    // Numerator Taylor coefficients of rt * q.
    VectorLD ptc(p + 1);
    for (int i = 0; i <= p; ++i) {
        CLD acc(0.0L, 0.0L);
        for (int k = 0; k < nf; ++k) {
            const CLD w = std::exp(CLD(0.0L, 2.0L * pi * k / nf));
            acc += rt[k] * polyval_desc(qc, w) * std::exp(CLD(0.0L, -2.0L * pi * i * k / nf));
        }
        ptc[i] = acc.real() / nf;
    }

    // Residues in the disk plane, then transplanted to the half-line.
    CfApproximant out;
    out.p = p;
    out.shift = 1.0;
    out.poles.resize(p);
    out.residues.resize(p);
    const LD eshift = std::exp(1.0L);
    for (int k = 0; k < p; ++k) {
        CLD numer(0.0L, 0.0L);
        CLD zpow(1.0L, 0.0L);
        for (int i = 0; i <= p; ++i) {
            numer += ptc[i] * zpow;
            zpow *= zeta[k];
        }
        CLD denom(1.0L, 0.0L);
        for (int j = 0; j < p; ++j) {
            if (j != k) denom *= (zeta[k] - zeta[j]);
        }
        const CLD res_disk = numer / denom;
        const CLD zk = kCfScale * (zeta[k] - 1.0L) * (zeta[k] - 1.0L) /
                       ((zeta[k] + 1.0L) * (zeta[k] + 1.0L));
        const CLD ck = 4.0L * res_disk * zk / (zeta[k] * zeta[k] - 1.0L);
        out.poles[k] = Complex(static_cast<double>(zk.real() + out.shift),
                               static_cast<double>(zk.imag()));
        out.residues[k] = Complex(static_cast<double>((eshift * ck).real()),
                                  static_cast<double>((eshift * ck).imag()));
    }
    // The value at -infinity of the near-best approximant is at the
    // equioscillation level sigma_{p+1}; the pole/residue extraction fixes
    // the free constant to zero, which perturbs the error by at most that.
    out.r_inf = 0.0;

    // Close the data under conjugation exactly.
    std::vector<bool> used(p, false);
    for (int i = 0; i < p; ++i) {
        if (used[i]) continue;
        if (std::abs(out.poles[i].imag()) < 1e-8) {
            out.poles[i].imag(0.0);
            out.residues[i].imag(0.0);
            used[i] = true;
            continue;
        }
        int best = -1;
        double best_dist = 1e300;
        for (int j = 0; j < p; ++j) {
            if (j == i || used[j]) continue;
            const double dist = std::abs(std::conj(out.poles[i]) - out.poles[j]);
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        if (best < 0 || best_dist > 1e-6 * std::abs(out.poles[i])) {
            throw std::runtime_error("cf_build: poles are not conjugate-paired");
        }
        const Complex zm = 0.5 * (out.poles[i] + std::conj(out.poles[best]));
        const Complex cm = 0.5 * (out.residues[i] + std::conj(out.residues[best]));
        out.poles[i] = zm;
        out.poles[best] = std::conj(zm);
        out.residues[i] = cm;
        out.residues[best] = std::conj(cm);
        used[i] = used[best] = true;
    }
    for (int j = 0; j < p; ++j) {
        if (out.poles[j].real() == 0.0) {
            throw std::runtime_error("cf_build: pole on the imaginary axis");
        }
    }

    // Construction sanity: the approximant must track e^x along the half-line.
    double worst = std::abs(out.evaluate_exp(0.0) - 1.0);
    for (int i = 0; i <= 48; ++i) {
        const double x = -std::pow(10.0, -6.0 + 12.0 * i / 48.0);
        worst = std::max(worst, std::abs(out.evaluate_exp(x) - std::exp(x)));
    }
    if (!(worst < 1e-6)) {
        throw std::runtime_error("cf_build: construction failed accuracy check");
    }
    return out;
}

CoeffGrid phi_action_cf(const CfApproximant& appr, int l, double h, const BlockPencil& pencil,
                        const CoeffGrid& b) {
    CfPhiProvider provider(pencil, appr, h);
    return provider.phi(l, b);
}

// ---------------------------------------------------------------------------

CfPhiProvider::CfPhiProvider(const BlockPencil& pencil, const CfApproximant& appr, double h)
    : pencil_(&pencil), appr_(appr), h_(h) {
    if (!(pencil.alpha.imag() == 0.0 && pencil.alpha.real() >= 0.0)) {
        throw std::invalid_argument(
            "CF phi-actions need a diffusive operator (spectrum on the negative real axis)");
    }
    factors_h_.reserve(appr_.p);
    factors_half_.reserve(appr_.p);
    for (int j = 0; j < appr_.p; ++j) {
        factors_h_.push_back(factor_shifted(pencil, -appr_.poles[j], Complex(h, 0.0)));
        factors_half_.push_back(factor_shifted(pencil, -appr_.poles[j], Complex(h / 2.0, 0.0)));
    }
}

CoeffGrid CfPhiProvider::action(double scale, const CVector& weights, bool add_rinf,
                                const CoeffGrid& b) {
    const auto& factors = (scale == h_) ? factors_h_ : factors_half_;
    CoeffGrid acc{CMatrix::Zero(b.m(), b.n())};
    for (int j = 0; j < appr_.p; ++j) {
        const CoeffGrid x = solve_shifted(factors[j], *pencil_, b);
        acc.data += weights[j] * x.data;
    }
    if (add_rinf) acc.data += appr_.r_inf * b.data;
    return acc;
}

CoeffGrid CfPhiProvider::phi(int l, const CoeffGrid& b) {
    if (l < 0 || l > 3) throw std::invalid_argument("CfPhiProvider::phi: l must be 0..3");
    CVector w(appr_.p);
    for (int j = 0; j < appr_.p; ++j) {
        w[j] = appr_.residues[j] * std::pow(appr_.poles[j], -static_cast<double>(l));
    }
    return action(h_, w, l == 0, b);
}

CoeffGrid CfPhiProvider::phi0(const CoeffGrid& b) {
    return action(h_, appr_.residues, true, b);
}

CoeffGrid CfPhiProvider::phi0_half(const CoeffGrid& b) {
    return action(h_ / 2.0, appr_.residues, true, b);
}

CoeffGrid CfPhiProvider::phi1_half(const CoeffGrid& b) {
    CVector w(appr_.p);
    for (int j = 0; j < appr_.p; ++j) w[j] = appr_.residues[j] / appr_.poles[j];
    return action(h_ / 2.0, w, false, b);
}

CoeffGrid CfPhiProvider::f1(const CoeffGrid& b) {
    CVector w(appr_.p);
    for (int j = 0; j < appr_.p; ++j) {
        const Complex zi = 1.0 / appr_.poles[j];
        w[j] = appr_.residues[j] * (zi - 3.0 * zi * zi + 4.0 * zi * zi * zi);
    }
    return action(h_, w, false, b);
}

CoeffGrid CfPhiProvider::f2(const CoeffGrid& b) {
    CVector w(appr_.p);
    for (int j = 0; j < appr_.p; ++j) {
        const Complex zi = 1.0 / appr_.poles[j];
        w[j] = appr_.residues[j] * (2.0 * zi * zi - 4.0 * zi * zi * zi);
    }
    return action(h_, w, false, b);
}

CoeffGrid CfPhiProvider::f3(const CoeffGrid& b) {
    CVector w(appr_.p);
    for (int j = 0; j < appr_.p; ++j) {
        const Complex zi = 1.0 / appr_.poles[j];
        w[j] = appr_.residues[j] * (-zi * zi + 4.0 * zi * zi * zi);
    }
    return action(h_, w, false, b);
}

// ---------------------------------------------------------------------------

EigPhiData eig_precompute(const BlockPencil& pencil, double h, int contour_points,
                          double contour_radius) {
    const int n = pencil.spec.n;
    EigPhiData data;
    data.spec = pencil.spec;
    data.h = h;
    data.contour_points = contour_points;
    data.contour_radius = contour_radius;
    data.chains.resize(2 * n);
    parallel_for(2 * n, [&](int task) {
        const int i = task / 2;
        const int parity = task % 2;
        {
            const CMatrix chain_op = dense_chain_operator(pencil, i, parity);
            const int l = static_cast<int>(chain_op.rows());
            Eigen::ComplexEigenSolver<CMatrix> es(chain_op, /*computeEigenvectors=*/true);
            if (es.info() != Eigen::Success) {
                throw std::runtime_error("eig_precompute: eigensolver failed on block " +
                                         std::to_string(i));
            }
            ChainPhiData chain;
            chain.v = es.eigenvectors();
            chain.lambda = es.eigenvalues();
            {
                Eigen::JacobiSVD<CMatrix> svd(chain.v);
                const double cond = svd.singularValues()[0] / svd.singularValues()[l - 1];
                if (!(cond < 1e8)) {
                    throw std::runtime_error("eig_precompute: nearly defective block " +
                                             std::to_string(i) + " (cond(V) = " +
                                             std::to_string(cond) + ")");
                }
            }
            chain.vinv = chain.v.partialPivLu().solve(CMatrix::Identity(l, l));
            auto sandwich = [&](const CVector& diag) {
                return CMatrix(chain.v * diag.asDiagonal() * chain.vinv);
            };
            std::vector<CVector> diag_h(4, CVector(l)), diag_half(4, CVector(l));
            for (int q = 0; q < l; ++q) {
                for (int lev = 0; lev < 4; ++lev) {
                    diag_h[lev][q] =
                        phi_contour(lev, h * chain.lambda[q], contour_points, contour_radius);
                    diag_half[lev][q] =
                        phi_contour(lev, 0.5 * h * chain.lambda[q], contour_points, contour_radius);
                }
            }
            chain.phi_h.reserve(4);
            chain.phi_half.reserve(4);
            for (int lev = 0; lev < 4; ++lev) {
                chain.phi_h.push_back(sandwich(diag_h[lev]));
                chain.phi_half.push_back(sandwich(diag_half[lev]));
            }
            chain.f_h.push_back(sandwich(diag_h[1] - 3.0 * diag_h[2] + 4.0 * diag_h[3]));
            chain.f_h.push_back(sandwich(2.0 * diag_h[2] - 4.0 * diag_h[3]));
            chain.f_h.push_back(sandwich(-diag_h[2] + 4.0 * diag_h[3]));
            data.chains[2 * i + parity] = std::move(chain);
        }
    });
    return data;
}

CoeffGrid eig_apply(const EigPhiData& data, PhiMatrixKind kind, const CoeffGrid& b) {
    if (b.m() != data.spec.m || b.n() != data.spec.n) {
        throw std::invalid_argument("eig_apply: shape mismatch");
    }
    const int m = data.spec.m, n = data.spec.n;
    const int l = m / 2;
    CoeffGrid out{CMatrix(m, n)};
    CVector x(l), y(l);
    for (int i = 0; i < n; ++i) {
        for (int parity = 0; parity < 2; ++parity) {
            const ChainPhiData& chain = data.chain(i, parity);
            const CMatrix* mat = nullptr;
            switch (kind) {
                case PhiMatrixKind::Phi0H: mat = &chain.phi_h[0]; break;
                case PhiMatrixKind::Phi1H: mat = &chain.phi_h[1]; break;
                case PhiMatrixKind::Phi2H: mat = &chain.phi_h[2]; break;
                case PhiMatrixKind::Phi3H: mat = &chain.phi_h[3]; break;
                case PhiMatrixKind::Phi0Half: mat = &chain.phi_half[0]; break;
                case PhiMatrixKind::Phi1Half: mat = &chain.phi_half[1]; break;
                case PhiMatrixKind::F1: mat = &chain.f_h[0]; break;
                case PhiMatrixKind::F2: mat = &chain.f_h[1]; break;
                case PhiMatrixKind::F3: mat = &chain.f_h[2]; break;
            }
            for (int a = 0; a < l; ++a) x[a] = b.data(parity + 2 * a, i);
            y.noalias() = (*mat) * x;
            for (int a = 0; a < l; ++a) out.data(parity + 2 * a, i) = y[a];
        }
    }
    g_matvec_count.fetch_add(1, std::memory_order_relaxed);
    return out;
}

long long eig_matvec_count() { return g_matvec_count.load(std::memory_order_relaxed); }
void reset_eig_matvec_count() { g_matvec_count.store(0, std::memory_order_relaxed); }

}  // namespace spherepde
