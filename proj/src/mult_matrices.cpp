#include "spherepde/mult_matrices.hpp"

#include <stdexcept>
#include <string>

namespace spherepde {

namespace {

void require_mult_size(int m) {
    if (m < 6 || m % 2 != 0) {
        throw std::invalid_argument("multiplication matrices need even m >= 6, got m=" +
                                    std::to_string(m));
    }
}

}  // namespace

BandedCornerMatrix BandedCornerMatrix::zero(int m) {
    BandedCornerMatrix a;
    a.m = m;
    a.diag = CVector::Zero(m);
    a.upper2 = CVector::Zero(m - 2);
    a.lower2 = CVector::Zero(m - 2);
    return a;
}

CMatrix BandedCornerMatrix::dense() const {
    CMatrix a = CMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) a(i, i) = diag[i];
    for (int i = 0; i + 2 < m; ++i) {
        a(i, i + 2) += upper2[i];
        a(i + 2, i) += lower2[i];
    }
    for (const auto& c : corners) a(c.row, c.col) += c.value;
    return a;
}

void BandedCornerMatrix::apply(const Complex* x, Complex* y) const {
    // Accumulation order (diag, upper, lower, corners) matches apply_matrix
    // so the two paths agree bitwise.
    for (int i = 0; i < m; ++i) y[i] = diag[i] * x[i];
    for (int i = 0; i + 2 < m; ++i) y[i] += upper2[i] * x[i + 2];
    for (int i = 0; i + 2 < m; ++i) y[i + 2] += lower2[i] * x[i];
    for (const auto& c : corners) y[c.row] += c.value * x[c.col];
}

CMatrix BandedCornerMatrix::apply_matrix(const CMatrix& x) const {
    CMatrix y = diag.asDiagonal() * x;
    y.topRows(m - 2).noalias() += upper2.asDiagonal() * x.bottomRows(m - 2);
    y.bottomRows(m - 2).noalias() += lower2.asDiagonal() * x.topRows(m - 2);
    for (const auto& c : corners) y.row(c.row) += c.value * x.row(c.col);
    return y;
}

Complex BandedCornerMatrix::corner_at(int row, int col) const {
    for (const auto& c : corners) {
        if (c.row == row && c.col == col) return c.value;
    }
    return Complex(0.0, 0.0);
}

void BandedCornerMatrix::add_corner(int row, int col, Complex value) {
    for (auto& c : corners) {
        if (c.row == row && c.col == col) {
            c.value += value;
            return;
        }
    }
    corners.push_back({row, col, value});
}

BandedCornerMatrix BandedCornerMatrix::scaled_columns(const CVector& d) const {
    BandedCornerMatrix a = *this;
    for (int i = 0; i < m; ++i) a.diag[i] *= d[i];
    for (int i = 0; i + 2 < m; ++i) {
        a.upper2[i] *= d[i + 2];
        a.lower2[i] *= d[i];
    }
    for (auto& c : a.corners) c.value *= d[c.col];
    return a;
}

BandedCornerMatrix BandedCornerMatrix::scaled(Complex s) const {
    BandedCornerMatrix a = *this;
    a.diag *= s;
    a.upper2 *= s;
    a.lower2 *= s;
    for (auto& c : a.corners) c.value *= s;
    return a;
}

BandedCornerMatrix BandedCornerMatrix::plus(const BandedCornerMatrix& other) const {
    BandedCornerMatrix a = *this;
    a.diag += other.diag;
    a.upper2 += other.upper2;
    a.lower2 += other.lower2;
    for (const auto& c : other.corners) a.add_corner(c.row, c.col, c.value);
    return a;
}

BandedCornerMatrix BandedCornerMatrix::plus_diagonal(Complex s) const {
    BandedCornerMatrix a = *this;
    a.diag.array() += s;
    return a;
}

BandedCornerMatrix build_tsin2(int m) {
    require_mult_size(m);
    BandedCornerMatrix t = BandedCornerMatrix::zero(m);
    t.diag.setConstant(0.5);
    t.upper2.setConstant(-0.25);
    t.lower2.setConstant(-0.25);
    t.lower2[0] = -0.125;  // (2,0): the -m/2 wrap halves this entry
    t.add_corner(0, m - 2, -0.25);
    t.add_corner(m - 2, 0, -0.125);
    return t;
}

BandedCornerMatrix build_tcossin(int m) {
    require_mult_size(m);
    const Complex i4(0.0, 0.25);
    const Complex i8(0.0, 0.125);
    BandedCornerMatrix t = BandedCornerMatrix::zero(m);
    t.upper2.setConstant(i4);
    t.lower2.setConstant(-i4);
    t.lower2[0] = -i8;
    t.add_corner(0, m - 2, -i4);
    t.add_corner(m - 2, 0, i8);
    return t;
}

BandedCornerMatrix naive_msin2(int m) {
    require_mult_size(m);
    BandedCornerMatrix t = BandedCornerMatrix::zero(m);
    t.diag.setConstant(0.5);
    t.upper2.setConstant(-0.25);
    t.lower2.setConstant(-0.25);
    return t;
}

}  // namespace spherepde
