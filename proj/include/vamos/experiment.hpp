#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "vamos/common.hpp"
#include "vamos/corruption.hpp"
#include "vamos/metrics.hpp"
#include "vamos/net.hpp"
#include "vamos/projection.hpp"
#include "vamos/train.hpp"
#include "vamos/volume.hpp"

// Experiment plumbing: content checksums for manifests, the rotating
// train/val/test fold assignment, and the corruption-severity sweep.

namespace vamos {

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return std::string(buf, 16);
}

inline std::string file_checksum_hex(const std::string& path) {
    const std::string bytes = detail::read_file_bytes(path);
    return hex64(fnv1a64(bytes.data(), bytes.size()));
}

inline std::string read_text_file(const std::string& path) { return detail::read_file_bytes(path); }

inline void write_text_file(const std::string& path, const std::string& text) {
    detail::write_file_bytes(path, text);
}

// Rotating assignment: test = {fold}, val = {(fold+1) mod n}, train = rest.
// With n = 7 this is the 5/1/1 rotation; every index appears as test exactly
// once across folds 0..n-1.
struct FoldSplit {
    int fold = 0;
    std::vector<int> train, val, test;
};

inline FoldSplit split_folds(int n_volumes, int fold) {
    if (n_volumes < 3) throw config_error("split_folds: need at least 3 volumes");
    if (fold < 0 || fold >= n_volumes)
        throw config_error("split_folds: fold must be in [0, " + std::to_string(n_volumes)
                           + ")");
    FoldSplit s;
    s.fold = fold;
    s.test.push_back(fold);
    s.val.push_back((fold + 1) % n_volumes);
    for (int i = 0; i < n_volumes; ++i)
        if (i != s.test[0] && i != s.val[0]) s.train.push_back(i);
    return s;
}

// A single corruption block of exactly `block_length` slices centered in the
// volume; length 0 leaves everything valid.
inline ValidityMask centered_block_mask(int n_slices, int block_length) {
    if (n_slices <= 0) throw shape_error("centered_block_mask: non-positive n_slices");
    if (block_length < 0 || block_length > n_slices)
        throw config_error("centered_block_mask: block length must be in [0, n_slices]");
    ValidityMask mask(n_slices, true);
    const int start = (n_slices - block_length) / 2;
    for (int i = start; i < start + block_length; ++i) mask.set_valid(i, false);
    return mask;
}

struct SweepRow {
    int block_length = 0;
    double corrupted_mie = 0.0; // en face MIE of the zero-filled volume vs ground truth
    double restored_mie = 0.0;  // en face MIE of the model restoration vs ground truth
};

// Corruption-severity sweep: for each length, blank a centered block, restore
// it, and measure the en face MIE of both the blanked and restored volumes.
inline std::vector<SweepRow> severity_sweep(const Model& model, const Volume& gt,
                                            const std::vector<int>& lengths, int threads = 1) {
    const ImageD mip_gt = convert<double>(enface_mip(gt));
    std::vector<SweepRow> rows;
    rows.reserve(lengths.size());
    for (int len : lengths) {
        const ValidityMask mask = centered_block_mask(gt.n_slices, len);
        const Volume corrupted = apply_mask(gt, mask);
        const Volume restored = infer_volume(model, corrupted, mask, threads);
        SweepRow row;
        row.block_length = len;
        row.corrupted_mie = metric_mie(convert<double>(enface_mip(corrupted)), mip_gt);
        row.restored_mie = metric_mie(convert<double>(enface_mip(restored)), mip_gt);
        rows.push_back(row);
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "block_length,corrupted_mie,restored_mie\n";
    char buf[96];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.block_length, r.corrupted_mie,
                      r.restored_mie);
        out += buf;
    }
    return out;
}

} // namespace vamos
