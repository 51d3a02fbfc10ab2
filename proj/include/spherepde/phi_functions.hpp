#pragma once

#include <memory>
#include <vector>

#include "spherepde/laplacian.hpp"
#include "spherepde/linsolve.hpp"
#include "spherepde/types.hpp"

namespace spherepde {

/// phi_0(z) = e^z, phi_{l+1}(z) = (phi_l(z) - 1/l!)/z.  Below |z| = 1e-2 the
/// divided forms cancel catastrophically and a Taylor series is used instead.
Complex phi_scalar(int l, Complex z);

/// Contour average (1/M) sum_k phi_l(z + e^{2 pi i (k-0.5)/M}) over the unit
/// circle around z; exact for these entire functions up to 1/M! and roundoff.
Complex phi_contour(int l, Complex z, int contour_points = 32, double radius = 1.0);

/// Type (p,p) near-best rational approximant to e^z on the negative real
/// axis with a unit shift: e^z ~= r_inf + sum_j c_j/(z - z_j).  The common
/// poles also serve phi_1..phi_3 through the weights c_j z_j^{-l}.
struct CfApproximant {
    int p = 12;
    CVector poles;     // z_j, nonzero real parts, conjugate-closed
    CVector residues;  // c_j
    double r_inf = 0.0;
    double shift = 1.0;

    Complex evaluate_exp(double x) const;     // r_inf + sum c_j/(x - z_j)
    Complex evaluate_phi(int l, double x) const;
};

/// Caratheodory-Fejer construction on the transplanted unit disk: Chebyshev
/// expansion of exp(9(t-1)/(t+1)), SVD of the coefficient Hankel matrix,
/// Blaschke-product extraction of the degree-p part, pole/residue recovery,
/// then the unit shift.  p in {10, 12, 14}.
CfApproximant cf_build(int p);

/// One-shot phi_l(h L) b through p shifted solves (plus r_inf b for l = 0).
/// Requires a diffusive pencil.
CoeffGrid phi_action_cf(const CfApproximant& appr, int l, double h, const BlockPencil& pencil,
                        const CoeffGrid& b);

/// Eigen-decomposed phi data for one parity chain of one block.
struct ChainPhiData {
    CMatrix v, vinv;
    CVector lambda;                  // eigenvalues of the chain operator
    std::vector<CMatrix> phi_h;      // phi_l(h L), l = 0..3
    std::vector<CMatrix> phi_half;   // phi_l(h L / 2), l = 0..3
    std::vector<CMatrix> f_h;        // f_1, f_2, f_3 at step h
};

/// Blockwise phi matrices via per-chain eigendecomposition and contour
/// averages; O(n m^3) precompute, O(n m^2) per action.
struct EigPhiData {
    GridSpec spec;
    double h = 0.0;
    int contour_points = 32;
    double contour_radius = 1.0;
    std::vector<ChainPhiData> chains;  // 2n entries: block-major, even then odd

    const ChainPhiData& chain(int block, int parity) const {
        return chains[2 * block + parity];
    }
};

/// cond(V) of any chain above 1e8 aborts (nearly defective discretization).
EigPhiData eig_precompute(const BlockPencil& pencil, double h, int contour_points = 32,
                          double contour_radius = 1.0);

enum class PhiMatrixKind { Phi0H, Phi1H, Phi2H, Phi3H, Phi0Half, Phi1Half, F1, F2, F3 };

CoeffGrid eig_apply(const EigPhiData& data, PhiMatrixKind kind, const CoeffGrid& b);

/// The nine phi-actions one ETDRK4 step needs, behind one interface.
class PhiProvider {
  public:
    virtual ~PhiProvider() = default;
    virtual CoeffGrid phi0(const CoeffGrid& b) = 0;       // phi_0(hL) b
    virtual CoeffGrid phi0_half(const CoeffGrid& b) = 0;  // phi_0(hL/2) b
    virtual CoeffGrid phi1_half(const CoeffGrid& b) = 0;  // phi_1(hL/2) b
    virtual CoeffGrid f1(const CoeffGrid& b) = 0;
    virtual CoeffGrid f2(const CoeffGrid& b) = 0;
    virtual CoeffGrid f3(const CoeffGrid& b) = 0;
};

/// CF route: every action is p shifted solves against factors precomputed at
/// construction (p at step h, p at h/2).
class CfPhiProvider : public PhiProvider {
  public:
    CfPhiProvider(const BlockPencil& pencil, const CfApproximant& appr, double h);

    CoeffGrid phi0(const CoeffGrid& b) override;
    CoeffGrid phi0_half(const CoeffGrid& b) override;
    CoeffGrid phi1_half(const CoeffGrid& b) override;
    CoeffGrid f1(const CoeffGrid& b) override;
    CoeffGrid f2(const CoeffGrid& b) override;
    CoeffGrid f3(const CoeffGrid& b) override;

    /// phi_l(hL) b at the full step, all l from the same p solves.
    CoeffGrid phi(int l, const CoeffGrid& b);

  private:
    CoeffGrid action(double scale, const CVector& weights, bool add_rinf, const CoeffGrid& b);

    const BlockPencil* pencil_;
    CfApproximant appr_;
    double h_;
    std::vector<BlockLU> factors_h_;     // (h A - z_j B), j = 1..p
    std::vector<BlockLU> factors_half_;  // (h/2 A - z_j B)
};

/// EIG route: every action is one block-diagonal dense matrix-vector product.
class EigPhiProvider : public PhiProvider {
  public:
    explicit EigPhiProvider(EigPhiData data) : data_(std::move(data)) {}

    CoeffGrid phi0(const CoeffGrid& b) override { return eig_apply(data_, PhiMatrixKind::Phi0H, b); }
    CoeffGrid phi0_half(const CoeffGrid& b) override {
        return eig_apply(data_, PhiMatrixKind::Phi0Half, b);
    }
    CoeffGrid phi1_half(const CoeffGrid& b) override {
        return eig_apply(data_, PhiMatrixKind::Phi1Half, b);
    }
    CoeffGrid f1(const CoeffGrid& b) override { return eig_apply(data_, PhiMatrixKind::F1, b); }
    CoeffGrid f2(const CoeffGrid& b) override { return eig_apply(data_, PhiMatrixKind::F2, b); }
    CoeffGrid f3(const CoeffGrid& b) override { return eig_apply(data_, PhiMatrixKind::F3, b); }

    const EigPhiData& data() const { return data_; }

  private:
    EigPhiData data_;
};

/// Running count of whole-grid eig-matrix actions.
long long eig_matvec_count();
void reset_eig_matvec_count();

}  // namespace spherepde
