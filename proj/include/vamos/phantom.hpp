#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "vamos/common.hpp"
#include "vamos/rng.hpp"
#include "vamos/volume.hpp"

// Synthetic vessel phantoms: bright smooth tubes threaded along the slow
// axis over a dim speckle background. Stand-in training/evaluation corpus
// exercising vessel-weighted losses (sparse bright structure on dim noise).

namespace vamos {

struct PhantomConfig {
    int n_slices = 64;
    int height = 48;
    int width = 96;
    int vessels = 6;
    double radius_min = 1.2;
    double radius_max = 3.0;
    double background_level = 0.08; // mean of the exponential speckle field
    double peak_min = 0.6;
    double peak_max = 1.0;

    void validate() const {
        if (n_slices <= 0 || height <= 0 || width <= 0)
            throw config_error("PhantomConfig: non-positive dimensions");
        if (vessels < 1) throw config_error("PhantomConfig: vessel count must be >= 1");
        if (radius_min <= 0 || radius_max < radius_min)
            throw config_error("PhantomConfig: bad radius range");
        if (background_level < 0) throw config_error("PhantomConfig: negative noise level");
        if (peak_min < 0 || peak_max > 1.0 || peak_max < peak_min)
            throw config_error("PhantomConfig: peak range must lie inside [0,1]");
    }
};

// One rendered tube. center[n] = (z, x) of the centerline in slice n;
// intensity is peak * exp(-d^2 / (2 sigma^2)) with sigma = radius/2, cut
// hard to zero beyond `cutoff` = 2*radius.
struct VesselCurve {
    std::vector<std::array<double, 2>> center;
    double radius = 0;
    double cutoff = 0;
    double peak = 0;
};

struct PhantomScene {
    Volume volume;
    std::vector<VesselCurve> curves;
};

namespace detail {

inline VesselCurve sample_curve(const PhantomConfig& cfg, Rng& rng) {
    VesselCurve c;
    c.radius = rng.uniform(cfg.radius_min, cfg.radius_max);
    c.cutoff = 2.0 * c.radius;
    c.peak = rng.uniform(cfg.peak_min, cfg.peak_max);

    // Low-curvature space curve: a gentle mean drift plus one low-frequency
    // sinusoid per in-plane axis, parameterized by slice index.
    const double margin_z = std::min(4.0 + c.cutoff, 0.4 * cfg.height);
    const double margin_x = std::min(4.0 + c.cutoff, 0.4 * cfg.width);
    const double z0 = rng.uniform(margin_z, cfg.height - margin_z);
    const double x0 = rng.uniform(margin_x, cfg.width - margin_x);
    const double drift_z = rng.uniform(-0.12, 0.12) * cfg.height;
    const double drift_x = rng.uniform(-0.12, 0.12) * cfg.width;
    const double amp_z = rng.uniform(0.03, 0.12) * cfg.height;
    const double amp_x = rng.uniform(0.03, 0.12) * cfg.width;
    const double freq_z = rng.uniform(0.4, 1.2);
    const double freq_x = rng.uniform(0.4, 1.2);
    const double phase_z = rng.uniform(0.0, 6.283185307179586);
    const double phase_x = rng.uniform(0.0, 6.283185307179586);

    c.center.resize(static_cast<std::size_t>(cfg.n_slices));
    const double denom = cfg.n_slices > 1 ? cfg.n_slices - 1.0 : 1.0;
    for (int n = 0; n < cfg.n_slices; ++n) {
        const double t = n / denom;
        double z = z0 + drift_z * (t - 0.5) + amp_z * std::sin(6.283185307179586 * freq_z * t + phase_z);
        double x = x0 + drift_x * (t - 0.5) + amp_x * std::sin(6.283185307179586 * freq_x * t + phase_x);
        z = std::clamp(z, 1.0, cfg.height - 2.0);
        x = std::clamp(x, 1.0, cfg.width - 2.0);
        c.center[static_cast<std::size_t>(n)] = {z, x};
    }
    return c;
}

} // namespace detail

inline PhantomScene render_phantom(const PhantomConfig& cfg, std::uint64_t seed) {
    cfg.validate();

    PhantomScene scene;
    scene.volume = Volume(cfg.n_slices, cfg.height, cfg.width);

    Rng curve_rng(mix_seed(seed, 0x76657373)); // vessel geometry stream
    scene.curves.reserve(static_cast<std::size_t>(cfg.vessels));
    for (int i = 0; i < cfg.vessels; ++i)
        scene.curves.push_back(detail::sample_curve(cfg, curve_rng));

    // Speckle background: clipped exponential, mean ~ background_level.
    Volume& v = scene.volume;
    if (cfg.background_level > 0) {
        Rng noise_rng(mix_seed(seed, 0x6e6f6973));
        for (float& px : v.data) {
            const double u = noise_rng.u01();
            px = static_cast<float>(std::min(1.0, -cfg.background_level * std::log1p(-u)));
        }
    }

    // Vessels occlude the background: voxel = max(background, tube intensity).
    for (const VesselCurve& c : scene.curves) {
        const double sigma = c.radius * 0.5;
        const double inv_2s2 = 1.0 / (2.0 * sigma * sigma);
        const double cut2 = c.cutoff * c.cutoff;
        for (int n = 0; n < cfg.n_slices; ++n) {
            const auto [cz, cx] = c.center[static_cast<std::size_t>(n)];
            const int z_lo = std::max(0, static_cast<int>(std::floor(cz - c.cutoff)));
            const int z_hi = std::min(cfg.height - 1, static_cast<int>(std::ceil(cz + c.cutoff)));
            const int x_lo = std::max(0, static_cast<int>(std::floor(cx - c.cutoff)));
            const int x_hi = std::min(cfg.width - 1, static_cast<int>(std::ceil(cx + c.cutoff)));
            for (int z = z_lo; z <= z_hi; ++z) {
                for (int x = x_lo; x <= x_hi; ++x) {
                    const double dz = z - cz;
                    const double dx = x - cx;
                    const double d2 = dz * dz + dx * dx;
                    if (d2 > cut2) continue;
                    const float val = static_cast<float>(c.peak * std::exp(-d2 * inv_2s2));
                    float& px = v.at(n, z, x);
                    if (val > px) px = val;
                }
            }
        }
    }
    return scene;
}

inline Volume generate_phantom(const PhantomConfig& cfg, std::uint64_t seed) {
    return render_phantom(cfg, seed).volume;
}

} // namespace vamos
