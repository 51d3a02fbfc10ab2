#pragma once

#include <cstdint>
#include <string>

#include "spherepde/types.hpp"

namespace spherepde {

/// Snapshot file: "SPDESNAP" magic, version, complex flag, originating grid
/// (m doubled latitudes, n longitudes), stored row count (m/2+1 sphere rows,
/// north to south), time, problem hash, then row-major little-endian float64
/// payload (re/im interleaved when complex).
struct SnapshotFile {
    uint32_t version = 1;
    bool is_complex = true;
    int m = 0;
    int n = 0;
    double t = 0.0;
    uint64_t problem_hash = 0;
    CMatrix values;  // (m/2 + 1) x n sphere samples
};

void write_snapshot(const std::string& path, const SnapshotFile& snap);
SnapshotFile read_snapshot(const std::string& path);

/// FNV-1a of a parameter string, for the manifest/snapshot problem hash.
uint64_t fnv1a_hash(const std::string& text);

/// Equirectangular raster of the real part as a binary PPM with a fixed
/// diverging colormap (symmetric range), optional bilinear upscale.
void render_ppm(const std::string& path, const CMatrix& values, int upscale = 1);

}  // namespace spherepde
