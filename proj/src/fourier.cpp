#include "spherepde/fourier.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include <fftw3.h>

namespace spherepde {

namespace {

std::atomic<long long> g_fft_count{0};

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

// Aligned per-thread scratch so plans can use SIMD kernels.
fftw_complex* scratch_for(size_t count) {
    thread_local std::unique_ptr<fftw_complex, FftwDeleter> buffer;
    thread_local size_t capacity = 0;
    if (capacity < count) {
        buffer.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count)));
        if (!buffer) throw std::bad_alloc();
        capacity = count;
    }
    return buffer.get();
}

// FFTW plan cache keyed by shape and direction.  Plans are created on an
// aligned prototype buffer; execution uses fftw_execute_dft on the caller's
// aligned scratch of the same shape.
class FftEngine {
  public:
    static FftEngine& instance() {
        static FftEngine engine;
        return engine;
    }

    // In-place 2D transform of an m x n column-major aligned array.
    // sign = FFTW_FORWARD computes sum_p x_p e^{-2 pi i j p / m} along each axis.
    void transform2d(fftw_complex* data, int m, int n, int sign) {
        Key key{m, n, sign};
        Plans plans;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it == cache_.end()) {
                plans = make_plans(m, n, sign);
                cache_.emplace(key, plans);
            } else {
                plans = it->second;
            }
        }
        fftw_execute_dft(plans.cols, data, data);
        fftw_execute_dft(plans.rows, data, data);
        g_fft_count.fetch_add(1, std::memory_order_relaxed);
    }

  private:
    using Key = std::tuple<int, int, int>;
    struct Plans {
        fftw_plan cols = nullptr;  // length-m transforms down each column
        fftw_plan rows = nullptr;  // length-n transforms along each row
    };

    static Plans make_plans(int m, int n, int sign) {
        Plans plans;
        std::unique_ptr<fftw_complex, FftwDeleter> proto(
            static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m * n)));
        if (!proto) throw std::bad_alloc();
        // Column-major m x n: columns are contiguous (stride 1, dist m),
        // rows are strided by m (dist 1).
        fftw_iodim col_dim{m, 1, 1};
        fftw_iodim col_loop{n, m, m};
        plans.cols = fftw_plan_guru_dft(1, &col_dim, 1, &col_loop, proto.get(), proto.get(), sign,
                                        FFTW_ESTIMATE);
        fftw_iodim row_dim{n, m, m};
        fftw_iodim row_loop{m, 1, 1};
        plans.rows = fftw_plan_guru_dft(1, &row_dim, 1, &row_loop, proto.get(), proto.get(), sign,
                                        FFTW_ESTIMATE);
        if (plans.cols == nullptr || plans.rows == nullptr) {
            throw std::runtime_error("FFTW plan creation failed");
        }
        return plans;
    }

    std::mutex mutex_;
    std::map<Key, Plans> cache_;
};

}  // namespace

std::pair<RVector, RVector> make_grid(const GridSpec& spec) {
    spec.require_valid();
    const double pi = std::numbers::pi;
    RVector theta(spec.m), lambda(spec.n);
    // (2p - m) * pi/m rather than -pi + p*2pi/m so that theta = 0 is exact and
    // the doubling reflection picks a stable branch there.
    for (int p = 0; p < spec.m; ++p) theta[p] = (2.0 * p - spec.m) * (pi / spec.m);
    for (int q = 0; q < spec.n; ++q) lambda[q] = (2.0 * q - spec.n) * (pi / spec.n);
    return {theta, lambda};
}

CoeffGrid vals_to_coeffs(const ValueGrid& v) {
    v.spec().require_valid();
    const int m = v.m(), n = v.n();
    auto* scratch = scratch_for(static_cast<size_t>(m) * n);
    auto* cells = reinterpret_cast<Complex*>(scratch);
    std::copy(v.data.data(), v.data.data() + static_cast<size_t>(m) * n, cells);
    FftEngine::instance().transform2d(scratch, m, n, FFTW_FORWARD);
    // Shift to wavenumber order, apply the (-1)^(j+k) phase from the grid
    // starting at -pi, and normalize by 1/(nm) in one pass.
    CoeffGrid c{CMatrix(m, n)};
    const double norm = 1.0 / (static_cast<double>(m) * n);
    for (int q = 0; q < n; ++q) {
        const int qs = (q + n / 2) % n;
        const Complex* src = cells + static_cast<size_t>(qs) * m;
        Complex* dst = c.data.data() + static_cast<size_t>(q) * m;
        for (int p = 0; p < m; ++p) {
            const int ps = (p + m / 2) % m;
            const double sign = ((p + q) & 1) ? -norm : norm;
            dst[p] = sign * src[ps];
        }
    }
    return c;
}

ValueGrid coeffs_to_vals(const CoeffGrid& c) {
    c.spec().require_valid();
    const int m = c.m(), n = c.n();
    auto* scratch = scratch_for(static_cast<size_t>(m) * n);
    auto* cells = reinterpret_cast<Complex*>(scratch);
    for (int q = 0; q < n; ++q) {
        const int qs = (q + n / 2) % n;
        const Complex* src = c.data.data() + static_cast<size_t>(qs) * m;
        Complex* dst = cells + static_cast<size_t>(q) * m;
        for (int p = 0; p < m; ++p) {
            const int ps = (p + m / 2) % m;
            dst[p] = ((ps + qs) & 1) ? -src[ps] : src[ps];
        }
    }
    FftEngine::instance().transform2d(scratch, m, n, FFTW_BACKWARD);
    ValueGrid v{CMatrix(m, n)};
    std::copy(cells, cells + static_cast<size_t>(m) * n, v.data.data());
    return v;
}

CoeffGrid pointwise_in_value_space(const CoeffGrid& c,
                                   const std::function<Complex(Complex)>& f) {
    c.spec().require_valid();
    const int m = c.m(), n = c.n();
    auto* scratch = scratch_for(static_cast<size_t>(m) * n);
    auto* cells = reinterpret_cast<Complex*>(scratch);
    for (int q = 0; q < n; ++q) {
        const int qs = (q + n / 2) % n;
        const Complex* src = c.data.data() + static_cast<size_t>(qs) * m;
        Complex* dst = cells + static_cast<size_t>(q) * m;
        for (int p = 0; p < m; ++p) {
            const int ps = (p + m / 2) % m;
            dst[p] = ((ps + qs) & 1) ? -src[ps] : src[ps];
        }
    }
    FftEngine::instance().transform2d(scratch, m, n, FFTW_BACKWARD);
    const size_t count = static_cast<size_t>(m) * n;
    for (size_t i = 0; i < count; ++i) cells[i] = f(cells[i]);
    FftEngine::instance().transform2d(scratch, m, n, FFTW_FORWARD);
    CoeffGrid out{CMatrix(m, n)};
    const double norm = 1.0 / (static_cast<double>(m) * n);
    for (int q = 0; q < n; ++q) {
        const int qs = (q + n / 2) % n;
        const Complex* src = cells + static_cast<size_t>(qs) * m;
        Complex* dst = out.data.data() + static_cast<size_t>(q) * m;
        for (int p = 0; p < m; ++p) {
            const int ps = (p + m / 2) % m;
            const double sign = ((p + q) & 1) ? -norm : norm;
            dst[p] = sign * src[ps];
        }
    }
    return out;
}

DiagDiffMatrix diff_matrix(int m, int order) {
    GridSpec{m, 2}.require_valid();
    if (order != 1 && order != 2) {
        throw std::invalid_argument("diff_matrix: order must be 1 or 2");
    }
    DiagDiffMatrix d;
    d.order = order;
    d.diagonal.resize(m);
    for (int r = 0; r < m; ++r) {
        const int j = wavenumber(r, m);
        if (order == 1) {
            d.diagonal[r] = (r == 0) ? Complex(0.0, 0.0) : Complex(0.0, j);
        } else {
            d.diagonal[r] = Complex(-static_cast<double>(j) * j, 0.0);
        }
    }
    return d;
}

ProjectionMaps projection_maps(int m) {
    GridSpec{m, 2}.require_valid();
    ProjectionMaps maps;
    maps.P = Eigen::MatrixXd::Zero(m + 1, m);
    maps.P(0, 0) = 0.5;
    maps.P(m, 0) = 0.5;
    for (int i = 1; i < m; ++i) maps.P(i, i) = 1.0;

    maps.Q_diff = Eigen::MatrixXd::Zero(m, m + 1);
    for (int i = 0; i < m; ++i) maps.Q_diff(i, i) = 1.0;
    maps.Q_diff(0, m) = 1.0;

    maps.Q_mult = Eigen::MatrixXd::Zero(m, m + 5);
    for (int i = 0; i < m; ++i) maps.Q_mult(i, i + 2) = 1.0;
    maps.Q_mult(0, m + 2) = 1.0;
    return maps;
}

CoeffGrid pad_coeffs(const CoeffGrid& c, int m2, int n2) {
    const int m = c.m(), n = c.n();
    GridSpec{m2, n2}.require_valid();
    if (m2 < m || n2 < n) {
        throw std::invalid_argument("pad_coeffs: target grid must not be smaller");
    }
    // Rows first: split the folded -m/2 mode onto +-m/2 of the larger grid.
    CMatrix rows = CMatrix::Zero(m2, n);
    const int roff = (m2 - m) / 2;
    if (m2 == m) {
        rows = c.data;
    } else {
        for (int r = 1; r < m; ++r) rows.row(roff + r) = c.data.row(r);
        rows.row(roff) = 0.5 * c.data.row(0);
        rows.row(roff + m) = 0.5 * c.data.row(0);
    }
    CMatrix out = CMatrix::Zero(m2, n2);
    const int coff = (n2 - n) / 2;
    if (n2 == n) {
        out = rows;
    } else {
        for (int q = 1; q < n; ++q) out.col(coff + q) = rows.col(q);
        out.col(coff) = 0.5 * rows.col(0);
        out.col(coff + n) = 0.5 * rows.col(0);
    }
    return CoeffGrid{std::move(out)};
}

long long fft_count() { return g_fft_count.load(std::memory_order_relaxed); }
void reset_fft_count() { g_fft_count.store(0, std::memory_order_relaxed); }

}  // namespace spherepde
