#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vamos/common.hpp"
#include "vamos/image.hpp"

namespace vamos {

// N x H x W stack of B-scans, slice-major then row (z) then column (x).
// Intensities are stored as 32-bit floats; normalized data lives in [0,1].
// Dimensions are fixed at construction.
struct Volume {
    int n_slices = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Volume() = default;
    Volume(int n, int h, int w, float fill = 0.0f) : n_slices(n), height(h), width(w) {
        if (n <= 0 || h <= 0 || w <= 0) throw shape_error("Volume: non-positive dimensions");
        data.assign(static_cast<std::size_t>(n) * h * w, fill);
    }

    std::size_t slice_size() const { return static_cast<std::size_t>(height) * width; }

    float& at(int s, int z, int x) {
        return data[(static_cast<std::size_t>(s) * height + z) * width + x];
    }
    float at(int s, int z, int x) const {
        return data[(static_cast<std::size_t>(s) * height + z) * width + x];
    }

    const float* slice_ptr(int s) const { return data.data() + slice_size() * s; }
    float* slice_ptr(int s) { return data.data() + slice_size() * s; }

    ImageF slice(int s) const {
        if (s < 0 || s >= n_slices) throw index_error("Volume::slice: index out of range");
        ImageF img(height, width);
        std::memcpy(img.v.data(), slice_ptr(s), slice_size() * sizeof(float));
        return img;
    }

    void set_slice(int s, const ImageF& img) {
        if (s < 0 || s >= n_slices) throw index_error("Volume::set_slice: index out of range");
        if (img.height != height || img.width != width)
            throw shape_error("Volume::set_slice: shape mismatch");
        std::memcpy(slice_ptr(s), img.v.data(), slice_size() * sizeof(float));
    }
};

// Min-max rescale to [0,1]; constant volumes map to all zeros.
inline void normalize_in_place(Volume& v) {
    const auto [lo_it, hi_it] = std::minmax_element(v.data.begin(), v.data.end());
    const float lo = *lo_it, hi = *hi_it;
    if (hi <= lo) {
        std::fill(v.data.begin(), v.data.end(), 0.0f);
        return;
    }
    const float scale = 1.0f / (hi - lo);
    for (float& x : v.data) x = (x - lo) * scale;
}

// Per-slice validity record. true = slice is valid, false = corrupted /
// unsampled. Harness-side bookkeeping only; the network never sees it.
struct ValidityMask {
    std::vector<std::uint8_t> flags;

    ValidityMask() = default;
    explicit ValidityMask(int n_slices, bool valid = true)
        : flags(static_cast<std::size_t>(n_slices), valid ? 1 : 0) {
        if (n_slices <= 0) throw shape_error("ValidityMask: non-positive length");
    }

    int n_slices() const { return static_cast<int>(flags.size()); }
    bool valid(int s) const { return flags[static_cast<std::size_t>(s)] != 0; }
    void set_valid(int s, bool v) { flags[static_cast<std::size_t>(s)] = v ? 1 : 0; }

    int count_invalid() const {
        return static_cast<int>(std::count(flags.begin(), flags.end(), 0));
    }

    std::vector<int> invalid_indices() const {
        std::vector<int> out;
        for (int i = 0; i < n_slices(); ++i)
            if (!valid(i)) out.push_back(i);
        return out;
    }
};

// S consecutive B-scans centered on a target slice; the model's input unit.
// Position (S-1)/2 is the reconstruction target and is always zero-filled.
struct SliceStack {
    int s_count = 0;
    int height = 0;
    int width = 0;
    int center_index = 0;                  // global index of the center slice
    std::vector<float> data;               // S x H x W
    std::vector<std::uint8_t> stack_mask;  // per-position validity after masking

    std::size_t slice_size() const { return static_cast<std::size_t>(height) * width; }
    float* slice_ptr(int pos) { return data.data() + slice_size() * pos; }
    const float* slice_ptr(int pos) const { return data.data() + slice_size() * pos; }
};

// Gathers S slices centered on `target`. Out-of-range neighbors clamp to the
// nearest edge slice; slices invalid under `mask` are zero-filled; the center
// position is zero-filled unconditionally (it is the prediction target).
inline SliceStack extract_stack(const Volume& v, const ValidityMask& mask, int target, int s) {
    if (mask.n_slices() != v.n_slices)
        throw shape_error("extract_stack: mask length does not match volume");
    if (target < 0 || target >= v.n_slices)
        throw index_error("extract_stack: target out of range");
    if (s < 1 || s % 2 == 0) throw config_error("extract_stack: S must be odd and positive");

    SliceStack st;
    st.s_count = s;
    st.height = v.height;
    st.width = v.width;
    st.center_index = target;
    st.data.assign(static_cast<std::size_t>(s) * v.height * v.width, 0.0f);
    st.stack_mask.assign(static_cast<std::size_t>(s), 0);

    const int half = (s - 1) / 2;
    for (int pos = 0; pos < s; ++pos) {
        const int raw = target + pos - half;
        const int idx = std::clamp(raw, 0, v.n_slices - 1);
        const bool keep = mask.valid(idx) && pos != half;
        st.stack_mask[pos] = keep ? 1 : 0;
        if (keep)
            std::memcpy(st.slice_ptr(pos), v.slice_ptr(idx), st.slice_size() * sizeof(float));
    }
    return st;
}

// ---- persistence ----------------------------------------------------------
//
// .octav layout: 8-byte magic "OCTAVOL1", uint32 LE header length, JSON header
// {"n_slices","height","width","dtype":"f32le"}, raw little-endian f32 payload
// in slice-major order. Byte-for-byte deterministic.

namespace detail {

inline constexpr char volume_magic[8] = {'O', 'C', 'T', 'A', 'V', 'O', 'L', '1'};

inline void append_u32_le(std::string& out, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xFF));
}

inline std::uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint32_t f32_bits(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    return u;
}

inline float bits_f32(std::uint32_t u) {
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

inline void append_f32_le(std::string& out, float f) { append_u32_le(out, f32_bits(f)); }

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) throw io_error("read failed: " + path);
    return bytes;
}

inline void write_file_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) throw io_error("write failed: " + path);
}

} // namespace detail

inline void save_volume(const Volume& v, const std::string& path) {
    nlohmann::ordered_json header;
    header["n_slices"] = v.n_slices;
    header["height"] = v.height;
    header["width"] = v.width;
    header["dtype"] = "f32le";
    const std::string hj = header.dump();

    std::string out;
    out.reserve(12 + hj.size() + v.data.size() * 4);
    out.append(detail::volume_magic, 8);
    detail::append_u32_le(out, static_cast<std::uint32_t>(hj.size()));
    out.append(hj);
    if constexpr (std::endian::native == std::endian::little) {
        const char* raw = reinterpret_cast<const char*>(v.data.data());
        out.append(raw, v.data.size() * 4);
    } else {
        for (float f : v.data) detail::append_f32_le(out, f);
    }
    detail::write_file_bytes(path, out);
}

inline Volume load_volume(const std::string& path) {
    const std::string bytes = detail::read_file_bytes(path);
    if (bytes.size() < 12 || std::memcmp(bytes.data(), detail::volume_magic, 8) != 0)
        throw data_error("load_volume: bad magic in " + path);
    const std::uint32_t hlen =
        detail::read_u32_le(reinterpret_cast<const unsigned char*>(bytes.data() + 8));
    if (bytes.size() < 12 + static_cast<std::size_t>(hlen))
        throw data_error("load_volume: truncated header in " + path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(bytes.substr(12, hlen));
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("load_volume: unparsable header: ") + e.what());
    }
    if (!header.contains("n_slices") || !header.contains("height") || !header.contains("width"))
        throw data_error("load_volume: header missing dimensions");
    if (header.value("dtype", "") != std::string("f32le"))
        throw data_error("load_volume: unsupported dtype");

    const int n = header["n_slices"].get<int>();
    const int h = header["height"].get<int>();
    const int w = header["width"].get<int>();
    if (n <= 0 || h <= 0 || w <= 0) throw data_error("load_volume: non-positive dimensions");

    const std::size_t count = static_cast<std::size_t>(n) * h * w;
    const std::size_t payload = bytes.size() - 12 - hlen;
    if (payload != count * 4)
        throw data_error("load_volume: payload size mismatch (expected " +
                         std::to_string(count * 4) + " bytes, got " + std::to_string(payload) +
                         ")");

    Volume v(n, h, w);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data()) + 12 + hlen;
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(v.data.data(), p, count * 4);
    } else {
        for (std::size_t i = 0; i < count; ++i)
            v.data[i] = detail::bits_f32(detail::read_u32_le(p + 4 * i));
    }
    for (std::size_t i = 0; i < count; ++i)
        if (!std::isfinite(v.data[i]))
            throw data_error("load_volume: non-finite value at flat index " + std::to_string(i));
    return v;
}

// .mask.json = {"n_slices": N, "corrupted": [sorted slice indices]}
inline void save_mask_json(const ValidityMask& mask, const std::string& path) {
    nlohmann::ordered_json j;
    j["n_slices"] = mask.n_slices();
    j["corrupted"] = mask.invalid_indices();
    detail::write_file_bytes(path, j.dump(2) + "\n");
}

inline ValidityMask load_mask_json(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_file_bytes(path));
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("load_mask_json: ") + e.what());
    }
    if (!j.contains("n_slices") || !j.contains("corrupted"))
        throw data_error("load_mask_json: missing keys");
    const int n = j["n_slices"].get<int>();
    if (n <= 0) throw data_error("load_mask_json: non-positive n_slices");
    ValidityMask mask(n, true);
    for (const auto& e : j["corrupted"]) {
        const int idx = e.get<int>();
        if (idx < 0 || idx >= n) throw data_error("load_mask_json: corrupted index out of range");
        mask.set_valid(idx, false);
    }
    return mask;
}

} // namespace vamos
