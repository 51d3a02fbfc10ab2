#include "spherepde/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace spherepde {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'D', 'E', 'S', 'N', 'A', 'P'};

template <typename T>
void put(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

}  // namespace

uint64_t fnv1a_hash(const std::string& text) {
    uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

void write_snapshot(const std::string& path, const SnapshotFile& snap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot: " + path);
    out.write(kMagic, sizeof(kMagic));
    put<uint32_t>(out, snap.version);
    put<uint32_t>(out, snap.is_complex ? 1u : 0u);
    put<uint32_t>(out, static_cast<uint32_t>(snap.m));
    put<uint32_t>(out, static_cast<uint32_t>(snap.n));
    put<uint32_t>(out, static_cast<uint32_t>(snap.values.rows()));
    put<uint32_t>(out, 0u);  // reserved
    put<double>(out, snap.t);
    put<uint64_t>(out, snap.problem_hash);
    for (int r = 0; r < snap.values.rows(); ++r) {
        for (int c = 0; c < snap.values.cols(); ++c) {
            put<double>(out, snap.values(r, c).real());
            if (snap.is_complex) put<double>(out, snap.values(r, c).imag());
        }
    }
    if (!out) throw std::runtime_error("short write: " + path);
}

SnapshotFile read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read snapshot: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not a snapshot file: " + path);
    }
    SnapshotFile snap;
    snap.version = get<uint32_t>(in);
    if (snap.version != 1) throw std::runtime_error("unsupported snapshot version");
    snap.is_complex = get<uint32_t>(in) != 0;
    snap.m = static_cast<int>(get<uint32_t>(in));
    snap.n = static_cast<int>(get<uint32_t>(in));
    const int rows = static_cast<int>(get<uint32_t>(in));
    (void)get<uint32_t>(in);  // reserved
    snap.t = get<double>(in);
    snap.problem_hash = get<uint64_t>(in);
    snap.values.resize(rows, snap.n);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < snap.n; ++c) {
            const double re = get<double>(in);
            const double im = snap.is_complex ? get<double>(in) : 0.0;
            snap.values(r, c) = Complex(re, im);
        }
    }
    if (!in) throw std::runtime_error("truncated snapshot: " + path);
    return snap;
}

void render_ppm(const std::string& path, const CMatrix& values, int upscale) {
    if (upscale < 1) throw std::invalid_argument("render_ppm: upscale must be >= 1");
    const int rows = static_cast<int>(values.rows());
    const int cols = static_cast<int>(values.cols());
    if (rows < 2 || cols < 2) throw std::invalid_argument("render_ppm: grid too small");
    Eigen::MatrixXd field = values.real();
    double vmax = field.cwiseAbs().maxCoeff();
    if (vmax == 0.0) vmax = 1.0;

    const int out_rows = rows * upscale;
    const int out_cols = cols * upscale;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image: " + path);
    out << "P6\n" << out_cols << " " << out_rows << "\n255\n";
    std::vector<unsigned char> line(static_cast<size_t>(out_cols) * 3);
    for (int r = 0; r < out_rows; ++r) {
        const double fr = static_cast<double>(r) / upscale;
        const int r0 = std::min(static_cast<int>(fr), rows - 1);
        const int r1 = std::min(r0 + 1, rows - 1);
        const double tr = fr - r0;
        for (int c = 0; c < out_cols; ++c) {
            const double fc = static_cast<double>(c) / upscale;
            const int c0 = std::min(static_cast<int>(fc), cols - 1);
            const int c1 = std::min(c0 + 1, cols - 1);
            const double tc = fc - c0;
            const double v = (1 - tr) * ((1 - tc) * field(r0, c0) + tc * field(r0, c1)) +
                             tr * ((1 - tc) * field(r1, c0) + tc * field(r1, c1));
            // Diverging blue-white-red, symmetric about zero.
            const double s = std::clamp(v / vmax, -1.0, 1.0);
            double red, green, blue;
            if (s >= 0.0) {
                red = 1.0;
                green = 1.0 - s * 0.75;
                blue = 1.0 - s;
            } else {
                red = 1.0 + s;
                green = 1.0 + s * 0.75;
                blue = 1.0;
            }
            line[3 * c + 0] = static_cast<unsigned char>(std::lround(255 * red));
            line[3 * c + 1] = static_cast<unsigned char>(std::lround(255 * green));
            line[3 * c + 2] = static_cast<unsigned char>(std::lround(255 * blue));
        }
        out.write(reinterpret_cast<const char*>(line.data()), static_cast<std::streamsize>(line.size()));
    }
    if (!out) throw std::runtime_error("short write: " + path);
}

}  // namespace spherepde
