#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vamos/common.hpp"
#include "vamos/rng.hpp"
#include "vamos/volume.hpp"

// Synthetic bulk-motion corruption: contiguous blocks of dropped B-scans with
// truncated-geometric lengths. Dynamic mode resamples per target per epoch
// during training; fixed mode is a pure function of the seed and is used for
// validation/test masks held constant across methods.

namespace vamos {

enum class CorruptionMode { dynamic, fixed };

// Truncation semantics for block lengths above max_block: `renormalize`
// conditions the geometric law on k <= max_block (default); `clamp` maps
// longer draws onto max_block, which piles probability there.
enum class TruncationPolicy { renormalize, clamp };

struct CorruptionConfig {
    double p = 0.4;
    int max_block = 6;
    CorruptionMode mode = CorruptionMode::dynamic;
    TruncationPolicy truncation = TruncationPolicy::renormalize;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(p > 0.0 && p < 1.0)) throw config_error("CorruptionConfig: p must be in (0,1)");
        if (max_block < 1) throw config_error("CorruptionConfig: max_block must be >= 1");
    }
};

// Conditional pmf P(k) = p q^{k-1} / (1 - q^max), k in [1, max_block].
inline double truncated_geometric_pmf(double p, int max_block, int k) {
    if (k < 1 || k > max_block) return 0.0;
    const double q = 1.0 - p;
    return p * std::pow(q, k - 1) / (1.0 - std::pow(q, max_block));
}

inline double truncated_geometric_mean(double p, int max_block) {
    double m = 0.0;
    for (int k = 1; k <= max_block; ++k) m += k * truncated_geometric_pmf(p, max_block, k);
    return m;
}

// Block length in [1, max_block] under the configured truncation policy.
inline int sample_block_length(const CorruptionConfig& cfg, Rng& rng) {
    cfg.validate();
    const double u = rng.u01();
    const double q = 1.0 - cfg.p;
    if (cfg.truncation == TruncationPolicy::renormalize) {
        // inverse CDF of the conditional law, evaluated by accumulation
        const double z = 1.0 - std::pow(q, cfg.max_block);
        double cdf = 0.0;
        double pk = cfg.p; // p q^{k-1}
        for (int k = 1; k < cfg.max_block; ++k) {
            cdf += pk / z;
            if (u < cdf) return k;
            pk *= q;
        }
        return cfg.max_block;
    }
    // clamp: unconditioned geometric draw, capped
    const int k = 1 + static_cast<int>(std::floor(std::log1p(-u) / std::log(q)));
    return std::min(std::max(k, 1), cfg.max_block);
}

// Drops one block that always contains `target`; the block offset is uniform
// over every placement that stays inside [0, n_slices).
inline ValidityMask corrupt_for_target(const CorruptionConfig& cfg, int target, int n_slices,
                                       Rng& rng) {
    cfg.validate();
    if (target < 0 || target >= n_slices)
        throw index_error("corrupt_for_target: target out of range");

    const int k = std::min(sample_block_length(cfg, rng), n_slices);
    const int lo = std::max(0, target - k + 1);
    const int hi = std::min(target, n_slices - k);
    const int start = lo + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));

    ValidityMask mask(n_slices, true);
    for (int i = start; i < start + k; ++i) mask.set_valid(i, false);
    return mask;
}

// Fixed evaluation masks: n_events disjoint blocks, deterministic in the
// config seed. Overlapping placements are rejected; after 10^4 consecutive
// rejections the volume is deemed too full.
inline ValidityMask generate_fixed_masks(const CorruptionConfig& cfg, int n_slices, int n_events) {
    cfg.validate();
    if (n_slices <= 0) throw shape_error("generate_fixed_masks: non-positive n_slices");
    if (n_events < 1) throw config_error("generate_fixed_masks: n_events must be >= 1");

    Rng rng(mix_seed(cfg.seed, 0x6d61736bull));
    ValidityMask mask(n_slices, true);
    constexpr int rejection_limit = 10000;

    for (int e = 0; e < n_events; ++e) {
        int rejections = 0;
        for (;;) {
            const int k = std::min(sample_block_length(cfg, rng), n_slices);
            const int start = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_slices - k + 1)));
            bool overlaps = false;
            for (int i = start; i < start + k && !overlaps; ++i)
                if (!mask.valid(i)) overlaps = true;
            if (!overlaps) {
                for (int i = start; i < start + k; ++i) mask.set_valid(i, false);
                break;
            }
            if (++rejections >= rejection_limit)
                throw capacity_error("generate_fixed_masks: cannot place " +
                                     std::to_string(n_events) + " disjoint events in " +
                                     std::to_string(n_slices) + " slices");
        }
    }
    return mask;
}

// Copy of `v` with every invalid slice zero-filled. Idempotent.
inline Volume apply_mask(const Volume& v, const ValidityMask& mask) {
    if (mask.n_slices() != v.n_slices)
        throw shape_error("apply_mask: mask length does not match volume");
    Volume out = v;
    for (int s = 0; s < v.n_slices; ++s)
        if (!mask.valid(s))
            std::fill_n(out.slice_ptr(s), out.slice_size(), 0.0f);
    return out;
}

} // namespace vamos
