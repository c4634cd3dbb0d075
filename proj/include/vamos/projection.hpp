#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vamos/common.hpp"
#include "vamos/image.hpp"
#include "vamos/volume.hpp"

// Orthogonal intensity projections. Axis convention: z = axial = B-scan rows
// (length H), x = lateral = B-scan columns (length W), slice index = slow
// axis. Axial profiles collapse z and have length W; lateral profiles
// collapse x and have length H. Means accumulate in 64-bit and divide once,
// so parallel per-slice projection stays bit-identical to sequential runs.

namespace vamos {

enum class Axis { axial, lateral };
enum class ProjKind { max, avg };

struct Profile {
    std::vector<double> values;
    Axis axis = Axis::axial;
    ProjKind kind = ProjKind::max;

    int length() const { return static_cast<int>(values.size()); }
};

template <class T>
Profile axial_profile(const Image2D<T>& b, ProjKind kind) {
    if (b.height < 1 || b.width < 1) throw shape_error("axial_profile: empty B-scan");
    Profile prof;
    prof.axis = Axis::axial;
    prof.kind = kind;
    prof.values.assign(static_cast<std::size_t>(b.width), 0.0);
    if (kind == ProjKind::max) {
        for (int x = 0; x < b.width; ++x) {
            double m = static_cast<double>(b.at(0, x));
            for (int z = 1; z < b.height; ++z)
                m = std::max(m, static_cast<double>(b.at(z, x)));
            prof.values[static_cast<std::size_t>(x)] = m;
        }
    } else {
        for (int x = 0; x < b.width; ++x) {
            double sum = 0.0;
            for (int z = 0; z < b.height; ++z) sum += static_cast<double>(b.at(z, x));
            prof.values[static_cast<std::size_t>(x)] = sum / b.height;
        }
    }
    return prof;
}

template <class T>
Profile lateral_profile(const Image2D<T>& b, ProjKind kind) {
    if (b.height < 1 || b.width < 1) throw shape_error("lateral_profile: empty B-scan");
    Profile prof;
    prof.axis = Axis::lateral;
    prof.kind = kind;
    prof.values.assign(static_cast<std::size_t>(b.height), 0.0);
    if (kind == ProjKind::max) {
        for (int z = 0; z < b.height; ++z) {
            double m = static_cast<double>(b.at(z, 0));
            for (int x = 1; x < b.width; ++x)
                m = std::max(m, static_cast<double>(b.at(z, x)));
            prof.values[static_cast<std::size_t>(z)] = m;
        }
    } else {
        for (int z = 0; z < b.height; ++z) {
            double sum = 0.0;
            for (int x = 0; x < b.width; ++x) sum += static_cast<double>(b.at(z, x));
            prof.values[static_cast<std::size_t>(z)] = sum / b.width;
        }
    }
    return prof;
}

template <class T>
Profile profile_of(const Image2D<T>& b, Axis axis, ProjKind kind) {
    return axis == Axis::axial ? axial_profile(b, kind) : lateral_profile(b, kind);
}

// En face MIP: pixel (n, x) = max over depth z of slice n. Rows follow the
// slow axis, so a dropped slice shows up as a blank band.
inline ImageF enface_mip(const Volume& v) {
    ImageF img(v.n_slices, v.width);
    for (int n = 0; n < v.n_slices; ++n) {
        const float* sl = v.slice_ptr(n);
        float* row = img.v.data() + static_cast<std::size_t>(n) * v.width;
        for (int x = 0; x < v.width; ++x) row[x] = sl[x];
        for (int z = 1; z < v.height; ++z) {
            const float* src = sl + static_cast<std::size_t>(z) * v.width;
            for (int x = 0; x < v.width; ++x) row[x] = std::max(row[x], src[x]);
        }
    }
    return img;
}

// Linear quantization of [0,1] to 8-bit, round half up.
inline std::uint8_t quantize_u8(double v) {
    const double scaled = std::floor(v * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

// Binary PGM (P5), 8-bit, deterministic bytes.
template <class T>
void write_pgm(const Image2D<T>& img, const std::string& path) {
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    out.reserve(out.size() + img.size());
    for (const T& v : img.v) out.push_back(static_cast<char>(quantize_u8(static_cast<double>(v))));
    detail::write_file_bytes(path, out);
}

} // namespace vamos
