#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "vamos/common.hpp"
#include "vamos/image.hpp"
#include "vamos/projection.hpp"

// Composite reconstruction loss: vessel-weighted MSE plus L1 penalties on the
// four orthogonal intensity profiles (axial/lateral x max/avg), each with an
// analytic gradient w.r.t. the prediction. All arithmetic in double.

namespace vamos {

struct LossConfig {
    double alpha_w = 100.0;     // prediction-based weight gain
    double gamma_w = 1.0 / 3.0; // sublinear weight exponent
    double c = 0.5;             // weight floor
    double lambda_proj = 3.0;   // projection-term multiplier

    // With true (default) the weight w is treated as a constant during
    // differentiation. With false the prediction-based term is differentiated
    // too; its pow derivative is singular at 0, so the base is floored at
    // epsilon_pow there.
    bool detach_pred_weight = true;
    double epsilon_pow = 1e-8;

    // Ablation switches: a disabled axis contributes neither to the total nor
    // to the gradient and is reported as 0 in the breakdown.
    bool use_axial_proj = true;
    bool use_lateral_proj = true;

    void validate() const {
        if (alpha_w < 0) throw config_error("LossConfig: alpha_w must be >= 0");
        if (c < 0) throw config_error("LossConfig: c must be >= 0");
        // gamma_w = 0 is the plain-MSE ablation: both pow terms become 1, so
        // with alpha_w = 0 and c = 0 the weight is identically 1.
        if (!(gamma_w >= 0.0 && gamma_w <= 1.0))
            throw config_error("LossConfig: gamma_w must be in [0,1]");
        if (lambda_proj < 0) throw config_error("LossConfig: lambda_proj must be >= 0");
        if (epsilon_pow <= 0) throw config_error("LossConfig: epsilon_pow must be positive");
    }
};

struct LossBreakdown {
    double total = 0;
    double wmse = 0;
    double mip_ax = 0;
    double mip_lat = 0;
    double aip_ax = 0;
    double aip_lat = 0;
};

struct LossResult {
    double value = 0;
    ImageD grad;
};

// Per-pixel weight w = alpha_w * pred^gamma_w + target^gamma_w + c.
inline double wmse_weight(double pred_px, double target_px, const LossConfig& cfg) {
    return cfg.alpha_w * std::pow(pred_px, cfg.gamma_w) + std::pow(target_px, cfg.gamma_w) + cfg.c;
}

inline LossResult weighted_mse(const ImageD& pred, const ImageD& target, const LossConfig& cfg) {
    cfg.validate();
    require_same_shape(pred, target, "weighted_mse");

    const double n = static_cast<double>(pred.size());
    LossResult res;
    res.grad = ImageD(pred.height, pred.width);

    double sum = 0.0;
    for (std::size_t i = 0; i < pred.v.size(); ++i) {
        const double yh = pred.v[i];
        if (yh < 0.0) throw domain_error("weighted_mse: negative prediction value");
        const double y = target.v[i];
        const double d = yh - y;
        const double w = cfg.alpha_w * std::pow(yh, cfg.gamma_w) + std::pow(y, cfg.gamma_w) + cfg.c;
        sum += w * d * d;

        double g = 2.0 / n * w * d;
        if (!cfg.detach_pred_weight) {
            const double base = std::max(yh, cfg.epsilon_pow);
            g += 1.0 / n * cfg.alpha_w * cfg.gamma_w * std::pow(base, cfg.gamma_w - 1.0) * d * d;
        }
        res.grad.v[i] = g;
    }
    res.value = sum / n;
    return res;
}

namespace detail {

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// First-encountered (lowest index) argmax along a column of `img`.
inline int argmax_column(const ImageD& img, int x) {
    int best = 0;
    double bv = img.at(0, x);
    for (int z = 1; z < img.height; ++z)
        if (img.at(z, x) > bv) {
            bv = img.at(z, x);
            best = z;
        }
    return best;
}

inline int argmax_row(const ImageD& img, int z) {
    int best = 0;
    double bv = img.at(z, 0);
    for (int x = 1; x < img.width; ++x)
        if (img.at(z, x) > bv) {
            bv = img.at(z, x);
            best = x;
        }
    return best;
}

} // namespace detail

// Mean absolute difference of the two images' profiles along `axis`/`kind`.
// Gradient w.r.t. the prediction: avg-kind spreads sign(diff) over the
// collapsed line; max-kind routes it entirely to the line's first argmax of
// the predicted image. sign(0) = 0.
inline LossResult projection_l1(const ImageD& pred, const ImageD& target, Axis axis,
                                ProjKind kind) {
    require_same_shape(pred, target, "projection_l1");

    const Profile pp = profile_of(pred, axis, kind);
    const Profile pt = profile_of(target, axis, kind);
    const int len_profile = pp.length();
    const int len_collapsed = axis == Axis::axial ? pred.height : pred.width;

    LossResult res;
    res.grad = ImageD(pred.height, pred.width);

    double sum = 0.0;
    for (int i = 0; i < len_profile; ++i) {
        const double diff = pp.values[static_cast<std::size_t>(i)] -
                            pt.values[static_cast<std::size_t>(i)];
        sum += std::fabs(diff);
        const double s = detail::sign_of(diff);
        if (s == 0.0) continue;

        if (kind == ProjKind::avg) {
            const double g = s / (static_cast<double>(len_profile) * len_collapsed);
            if (axis == Axis::axial) {
                for (int z = 0; z < pred.height; ++z) res.grad.at(z, i) += g;
            } else {
                for (int x = 0; x < pred.width; ++x) res.grad.at(i, x) += g;
            }
        } else {
            const double g = s / static_cast<double>(len_profile);
            if (axis == Axis::axial) {
                res.grad.at(detail::argmax_column(pred, i), i) += g;
            } else {
                res.grad.at(i, detail::argmax_row(pred, i)) += g;
            }
        }
    }
    res.value = sum / len_profile;
    return res;
}

// Total = wmse + lambda_proj * (mip_ax + mip_lat + aip_ax + aip_lat) over the
// enabled axes. Gradient accumulation is component-major in that fixed order.
inline std::pair<LossBreakdown, ImageD> vamos_loss(const ImageD& pred, const ImageD& target,
                                                   const LossConfig& cfg) {
    cfg.validate();
    require_same_shape(pred, target, "vamos_loss");

    LossBreakdown bd;
    LossResult wm = weighted_mse(pred, target, cfg);
    bd.wmse = wm.value;
    ImageD grad = std::move(wm.grad);

    const bool ax = cfg.use_axial_proj && cfg.lambda_proj > 0.0;
    const bool lat = cfg.use_lateral_proj && cfg.lambda_proj > 0.0;

    const auto add_term = [&](Axis axis, ProjKind kind, double& slot) {
        LossResult r = projection_l1(pred, target, axis, kind);
        slot = r.value;
        for (std::size_t i = 0; i < grad.v.size(); ++i)
            grad.v[i] += cfg.lambda_proj * r.grad.v[i];
    };

    if (ax) add_term(Axis::axial, ProjKind::max, bd.mip_ax);
    if (lat) add_term(Axis::lateral, ProjKind::max, bd.mip_lat);
    if (ax) add_term(Axis::axial, ProjKind::avg, bd.aip_ax);
    if (lat) add_term(Axis::lateral, ProjKind::avg, bd.aip_lat);

    bd.total = bd.wmse + cfg.lambda_proj * (bd.mip_ax + bd.mip_lat + bd.aip_ax + bd.aip_lat);
    return {bd, std::move(grad)};
}

} // namespace vamos
