#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spherepde {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Uniform doubled-grid resolution: m latitude points, n longitude points.
/// Both counts must be even so the FFT wavenumber layout -m/2..m/2-1 applies.
struct GridSpec {
    int m = 0;
    int n = 0;

    bool valid() const { return m >= 2 && n >= 2 && m % 2 == 0 && n % 2 == 0; }

    void require_valid() const {
        if (!valid()) {
            throw std::invalid_argument("GridSpec: m and n must be even and >= 2 (got m=" +
                                        std::to_string(m) + ", n=" + std::to_string(n) + ")");
        }
    }
};

/// Fourier coefficients of a doubled (bi-periodic) function.
/// data(j+m/2, k+n/2) holds the coefficient of e^{i j theta} e^{i k lambda},
/// j = -m/2..m/2-1, k = -n/2..n/2-1.  The +m/2 and +n/2 boundary modes are
/// folded onto -m/2 / -n/2 (the m-coefficient FFT convention).
struct CoeffGrid {
    CMatrix data;  // m x n

    int m() const { return static_cast<int>(data.rows()); }
    int n() const { return static_cast<int>(data.cols()); }
    GridSpec spec() const { return {m(), n()}; }
};

/// Samples of a doubled function on the uniform grid
/// theta_p = -pi + p*2pi/m (rows), lambda_q = -pi + q*2pi/n (cols), zero-based.
struct ValueGrid {
    CMatrix data;  // m x n

    int m() const { return static_cast<int>(data.rows()); }
    int n() const { return static_cast<int>(data.cols()); }
    GridSpec spec() const { return {m(), n()}; }
};

/// Latitudinal wavenumber of a storage row (symmetric for columns).
inline int wavenumber(int row, int m) { return row - m / 2; }
inline int row_of_wavenumber(int j, int m) { return j + m / 2; }

}  // namespace spherepde
