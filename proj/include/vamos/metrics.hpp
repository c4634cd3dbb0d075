#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "vamos/common.hpp"
#include "vamos/image.hpp"
#include "vamos/projection.hpp"
#include "vamos/special.hpp"
#include "vamos/volume.hpp"

// Image-quality metric suite. Pixel-accuracy metrics (l1, mie, psnr, ssim,
// ncc) are used on en face projections; edge/sharpness metrics (gradient_l1,
// laplacian_blur_diff, sobel_edge_preservation) on individual B-scans.
// Undefined results (zero variance, zero error, degenerate tests) are
// returned as non-finite doubles and serialized as JSON null.

namespace vamos {

struct MetricResult {
    std::string name;
    double value = 0.0;
    bool higher_is_better = false;
    long n_samples = 0;
};

inline double metric_l1(const ImageD& a, const ImageD& b) {
    require_same_shape(a, b, "metric_l1");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) acc += std::abs(a.v[i] - b.v[i]);
    return acc / static_cast<double>(a.v.size());
}

// Mean intensity error: absolute difference of the global means.
inline double metric_mie(const ImageD& a, const ImageD& b) {
    require_same_shape(a, b, "metric_mie");
    double sa = 0.0, sb = 0.0;
    for (double x : a.v) sa += x;
    for (double x : b.v) sb += x;
    return std::abs(sa - sb) / static_cast<double>(a.v.size());
}

// +infinity when the images are identical (MSE = 0).
inline double metric_psnr(const ImageD& a, const ImageD& b, double peak = 1.0) {
    require_same_shape(a, b, "metric_psnr");
    if (!(peak > 0.0)) throw config_error("metric_psnr: peak must be > 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(a.v.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

// NaN when either image has zero variance (correlation undefined).
inline double metric_ncc(const ImageD& a, const ImageD& b) {
    require_same_shape(a, b, "metric_ncc");
    const double n = static_cast<double>(a.v.size());
    double sa = 0.0, sb = 0.0;
    for (double x : a.v) sa += x;
    for (double x : b.v) sb += x;
    const double ma = sa / n, mb = sb / n;
    double va = 0.0, vb = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        const double da = a.v[i] - ma, db = b.v[i] - mb;
        va += da * da;
        vb += db * db;
        cov += da * db;
    }
    if (va == 0.0 || vb == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return cov / std::sqrt(va * vb);
}

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// dynamic range 1, averaged over window positions fully inside the image.
inline double metric_ssim(const ImageD& a, const ImageD& b) {
    require_same_shape(a, b, "metric_ssim");
    constexpr int win = 11, rad = win / 2;
    constexpr double sigma = 1.5, k1 = 0.01, k2 = 0.03, dyn = 1.0;
    if (a.height < win || a.width < win)
        throw shape_error("metric_ssim: image smaller than the 11x11 window");

    double g[win];
    double gsum = 0.0;
    for (int i = 0; i < win; ++i) {
        const double d = i - rad;
        g[i] = std::exp(-0.5 * d * d / (sigma * sigma));
        gsum += g[i];
    }
    for (double& x : g) x /= gsum;

    const double c1 = (k1 * dyn) * (k1 * dyn);
    const double c2 = (k2 * dyn) * (k2 * dyn);

    double acc = 0.0;
    long count = 0;
    for (int cy = rad; cy < a.height - rad; ++cy) {
        for (int cx = rad; cx < a.width - rad; ++cx) {
            double ua = 0, ub = 0, uaa = 0, ubb = 0, uab = 0;
            for (int wy = 0; wy < win; ++wy) {
                const int y = cy + wy - rad;
                for (int wx = 0; wx < win; ++wx) {
                    const int x = cx + wx - rad;
                    const double wgt = g[wy] * g[wx];
                    const double pa = a.at(y, x), pb = b.at(y, x);
                    ua += wgt * pa;
                    ub += wgt * pb;
                    uaa += wgt * pa * pa;
                    ubb += wgt * pb * pb;
                    uab += wgt * pa * pb;
                }
            }
            const double va = uaa - ua * ua;
            const double vb = ubb - ub * ub;
            const double vab = uab - ua * ub;
            const double s = ((2.0 * ua * ub + c1) * (2.0 * vab + c2))
                             / ((ua * ua + ub * ub + c1) * (va + vb + c2));
            acc += s;
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

namespace detail {

// Mirror-without-edge border index (…, a2, a1 | a0, a1, a2, …).
inline int reflect101(int i, int n) {
    if (n == 1) return 0;
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

inline ImageD sobel_magnitude(const ImageD& img) {
    ImageD out(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
        const int ym = reflect101(y - 1, img.height), yp = reflect101(y + 1, img.height);
        for (int x = 0; x < img.width; ++x) {
            const int xm = reflect101(x - 1, img.width), xp = reflect101(x + 1, img.width);
            const double tl = img.at(ym, xm), tc = img.at(ym, x), tr = img.at(ym, xp);
            const double ml = img.at(y, xm), mr = img.at(y, xp);
            const double bl = img.at(yp, xm), bc = img.at(yp, x), br = img.at(yp, xp);
            const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
            out.at(y, x) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

inline ImageD laplacian(const ImageD& img) {
    ImageD out(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
        const int ym = reflect101(y - 1, img.height), yp = reflect101(y + 1, img.height);
        for (int x = 0; x < img.width; ++x) {
            const int xm = reflect101(x - 1, img.width), xp = reflect101(x + 1, img.width);
            out.at(y, x) = img.at(ym, x) + img.at(yp, x) + img.at(y, xm) + img.at(y, xp)
                           - 4.0 * img.at(y, x);
        }
    }
    return out;
}

inline double population_variance(const ImageD& img) {
    const double n = static_cast<double>(img.v.size());
    double s = 0.0;
    for (double x : img.v) s += x;
    const double mean = s / n;
    double acc = 0.0;
    for (double x : img.v) {
        const double d = x - mean;
        acc += d * d;
    }
    return acc / n;
}

} // namespace detail

// Mean absolute difference of 3x3 Sobel gradient-magnitude maps.
inline double metric_gradient_l1(const ImageD& a, const ImageD& b) {
    require_same_shape(a, b, "metric_gradient_l1");
    return metric_l1(detail::sobel_magnitude(a), detail::sobel_magnitude(b));
}

// Sharpness statistic: |var(laplacian(a)) - var(laplacian(b))|.
inline double metric_laplacian_blur_diff(const ImageD& a, const ImageD& b) {
    require_same_shape(a, b, "metric_laplacian_blur_diff");
    return std::abs(detail::population_variance(detail::laplacian(a))
                    - detail::population_variance(detail::laplacian(b)));
}

// Asymmetric: (pred, gt). Over pixels where gt's Sobel magnitude reaches its
// 90th percentile, returns sum(min(G_pred, G_gt)) / sum(G_gt). 1 = edges fully
// preserved; NaN when gt has no gradient mass at the threshold.
inline double metric_sobel_edge_preservation(const ImageD& pred, const ImageD& gt) {
    require_same_shape(pred, gt, "metric_sobel_edge_preservation");
    const ImageD gp = detail::sobel_magnitude(pred);
    const ImageD gg = detail::sobel_magnitude(gt);
    std::vector<double> sorted(gg.v);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t idx =
        static_cast<std::size_t>(0.9 * static_cast<double>(sorted.size() - 1));
    const double thr = sorted[idx];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < gg.v.size(); ++i) {
        if (gg.v[i] >= thr) {
            num += std::min(gp.v[i], gg.v[i]);
            den += gg.v[i];
        }
    }
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return num / den;
}

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    long dof = 0;
    bool degenerate = false; // zero-variance differences
};

// Two-sided paired t-test on equal-length samples.
inline TTestResult paired_t_test(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw shape_error("paired_t_test: length mismatch");
    if (xs.size() < 2) throw shape_error("paired_t_test: need at least 2 pairs");
    const std::size_t n = xs.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = xs[i] - ys[i];
    double mean = 0.0;
    for (double x : d) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : d) {
        const double dd = x - mean;
        ss += dd * dd;
    }
    TTestResult res;
    res.dof = static_cast<long>(n) - 1;
    const double var = ss / static_cast<double>(res.dof);
    if (var == 0.0) {
        res.degenerate = true;
        res.t = 0.0;
        res.p = std::numeric_limits<double>::quiet_NaN();
        return res;
    }
    res.t = mean / std::sqrt(var / static_cast<double>(n));
    res.p = student_t_two_sided_p(res.t, static_cast<double>(res.dof));
    return res;
}

namespace detail {

inline nlohmann::ordered_json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

} // namespace detail

// Per-volume evaluation report. Pixel-accuracy metrics compare full en face
// MIPs; edge metrics compare the corrupted (i.e. restored) B-scans only, since
// untouched slices pass through the pipeline bit-identically.
inline nlohmann::ordered_json evaluate_pair(const Volume& restored, const Volume& gt,
                                            const ValidityMask& mask,
                                            const std::string& volume_id = "",
                                            std::uint64_t mask_seed = 0) {
    if (restored.n_slices != gt.n_slices || restored.height != gt.height
        || restored.width != gt.width)
        throw shape_error("evaluate_pair: volume shapes differ");
    if (mask.n_slices() != gt.n_slices)
        throw shape_error("evaluate_pair: mask length != slice count");

    const ImageD mip_r = convert<double>(enface_mip(restored));
    const ImageD mip_g = convert<double>(enface_mip(gt));

    nlohmann::ordered_json mip;
    mip["l1"] = detail::json_number(metric_l1(mip_r, mip_g));
    mip["mie"] = detail::json_number(metric_mie(mip_r, mip_g));
    mip["ssim"] = detail::json_number(metric_ssim(mip_r, mip_g));
    mip["ncc"] = detail::json_number(metric_ncc(mip_r, mip_g));
    mip["psnr"] = detail::json_number(metric_psnr(mip_r, mip_g));

    nlohmann::ordered_json per_slice = nlohmann::ordered_json::array();
    double sum_grad = 0.0, sum_blur = 0.0, sum_edge = 0.0;
    long n_edge = 0;
    const std::vector<int> corrupted = mask.invalid_indices();
    for (int s : corrupted) {
        const ImageD rs = convert<double>(restored.slice(s));
        const ImageD gs = convert<double>(gt.slice(s));
        const double grad = metric_gradient_l1(rs, gs);
        const double blur = metric_laplacian_blur_diff(rs, gs);
        const double edge = metric_sobel_edge_preservation(rs, gs);
        sum_grad += grad;
        sum_blur += blur;
        if (std::isfinite(edge)) {
            sum_edge += edge;
            ++n_edge;
        }
        nlohmann::ordered_json row;
        row["slice"] = s;
        row["gradient_l1"] = detail::json_number(grad);
        row["laplacian_blur_diff"] = detail::json_number(blur);
        row["sobel_edge_preservation"] = detail::json_number(edge);
        per_slice.push_back(row);
    }

    nlohmann::ordered_json bscan;
    const double nc = static_cast<double>(corrupted.size());
    bscan["gradient_l1"] =
        corrupted.empty() ? nlohmann::ordered_json(nullptr) : detail::json_number(sum_grad / nc);
    bscan["laplacian_blur_diff"] =
        corrupted.empty() ? nlohmann::ordered_json(nullptr) : detail::json_number(sum_blur / nc);
    bscan["sobel_edge_preservation"] =
        n_edge == 0 ? nlohmann::ordered_json(nullptr)
                    : detail::json_number(sum_edge / static_cast<double>(n_edge));
    bscan["lpips"] = nullptr; // reserved; perceptual-network metric not computed

    nlohmann::ordered_json report;
    report["volume_id"] = volume_id;
    report["mask_seed"] = mask_seed;
    report["bscan_metrics"] = bscan;
    report["mip_metrics"] = mip;
    report["per_slice"] = per_slice;
    return report;
}

} // namespace vamos
