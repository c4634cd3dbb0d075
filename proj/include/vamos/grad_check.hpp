#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vamos/common.hpp"
#include "vamos/image.hpp"
#include "vamos/loss.hpp"
#include "vamos/rng.hpp"

// Central-difference verification of the analytic loss gradients, in 64-bit.
//
// Two subtleties, both documented on the ops they affect:
//  * detach_pred_weight=true means the optimized function treats the weight
//    field as a constant; its finite-difference oracle therefore differences
//    the frozen-weight quadratic, not the raw formula.
//  * |.| and max(.) are non-differentiable on a measure-zero set. Pixels
//    whose +-h neighborhood straddles such a point (profile difference near
//    zero, or a line argmax tie within the step) are reported as excluded
//    coordinates rather than failures.

namespace vamos {

struct GradCheckFailure {
    int trial = 0;
    int y = 0;
    int x = 0;
    double analytic = 0;
    double fd = 0;
    double rel_err = 0;
};

struct GradCheckReport {
    std::string op;
    int trials = 0;
    double step = 0;
    double threshold = 0;
    long checked = 0;
    long excluded = 0;
    double max_rel_err = 0;
    std::vector<GradCheckFailure> failures; // capped at 32

    bool pass() const { return failures.empty(); }
};

using LossValueFn = std::function<double(const ImageD&)>;
using LossGradFn = std::function<ImageD(const ImageD&)>;
using ExcludeFn = std::function<bool(int y, int x)>;

// Compares grad_fn(point) against central differences of value_fn around
// `point`, using the fourth-order five-point stencil so that the sharply
// curved weight term (~ x^{-2/3} near 0) does not drown the comparison in
// truncation error. Relative error uses max(|analytic|, |fd|, 1e-6) as
// denominator so coordinates where both sides vanish compare as equal.
inline void check_gradient_at(GradCheckReport& rep, int trial, const ImageD& point,
                              const LossValueFn& value_fn, const LossGradFn& grad_fn,
                              const ExcludeFn& exclude = {}) {
    const ImageD analytic = grad_fn(point);
    ImageD probe = point;
    const double h = rep.step;
    for (int y = 0; y < point.height; ++y) {
        for (int x = 0; x < point.width; ++x) {
            if (exclude && exclude(y, x)) {
                ++rep.excluded;
                continue;
            }
            const double orig = probe.at(y, x);
            probe.at(y, x) = orig + 2.0 * h;
            const double fp2 = value_fn(probe);
            probe.at(y, x) = orig + h;
            const double fp1 = value_fn(probe);
            probe.at(y, x) = orig - h;
            const double fm1 = value_fn(probe);
            probe.at(y, x) = orig - 2.0 * h;
            const double fm2 = value_fn(probe);
            probe.at(y, x) = orig;

            const double fd = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
            const double a = analytic.at(y, x);
            const double rel = std::fabs(a - fd) / std::max({std::fabs(a), std::fabs(fd), 1e-6});
            ++rep.checked;
            rep.max_rel_err = std::max(rep.max_rel_err, rel);
            if (rel >= rep.threshold && rep.failures.size() < 32)
                rep.failures.push_back({trial, y, x, a, fd, rel});
        }
    }
}

namespace detail {

// Per-pixel exclusion for one projection term: kinks of |profile diff| and
// argmax ties within the finite-difference step.
inline ExcludeFn projection_exclusion(const ImageD& pred, const ImageD& target, Axis axis,
                                      ProjKind kind, double h) {
    const Profile pp = profile_of(pred, axis, kind);
    const Profile pt = profile_of(target, axis, kind);
    const int len_collapsed = axis == Axis::axial ? pred.height : pred.width;
    const double tie_eps = 10.0 * h;
    const double kink_eps =
        kind == ProjKind::max ? 10.0 * h : 10.0 * h / static_cast<double>(len_collapsed);

    std::vector<char> line_kink(pp.values.size(), 0);
    for (std::size_t i = 0; i < pp.values.size(); ++i)
        line_kink[i] = std::fabs(pp.values[i] - pt.values[i]) <= kink_eps ? 1 : 0;

    if (kind == ProjKind::avg) {
        return [axis, line_kink](int y, int x) {
            return line_kink[static_cast<std::size_t>(axis == Axis::axial ? x : y)] != 0;
        };
    }

    // max-kind: a pixel within tie_eps of its line maximum sits next to a
    // routing switch; everything far below the maximum has a flat FD of 0.
    ImageD pred_copy = pred;
    std::vector<double> line_max(pp.values.begin(), pp.values.end());
    return [axis, line_kink, line_max, pred_copy, tie_eps](int y, int x) {
        const std::size_t line = static_cast<std::size_t>(axis == Axis::axial ? x : y);
        const double v = pred_copy.at(y, x);
        const double gap = line_max[line] - v;
        if (gap <= tie_eps) {
            // near (or at) the max: require a clear top-two gap
            double second = -1e300;
            if (axis == Axis::axial) {
                for (int z = 0; z < pred_copy.height; ++z)
                    if (z != y) second = std::max(second, pred_copy.at(z, x));
            } else {
                for (int xx = 0; xx < pred_copy.width; ++xx)
                    if (xx != x) second = std::max(second, pred_copy.at(y, xx));
            }
            if (line_max[line] - second <= tie_eps) return true;
            return line_kink[line] != 0;
        }
        return false;
    };
}

inline ExcludeFn union_exclusion(std::vector<ExcludeFn> fns) {
    return [fns = std::move(fns)](int y, int x) {
        for (const auto& f : fns)
            if (f && f(y, x)) return true;
        return false;
    };
}

} // namespace detail

// Named differentiable ops for the CLI `losscheck` surface.
inline const std::vector<std::string>& grad_check_op_ids() {
    static const std::vector<std::string> ids = {
        "weighted_mse", "weighted_mse_attached", "mip_axial", "mip_lateral",
        "aip_axial",    "aip_lateral",           "vamos"};
    return ids;
}

inline GradCheckReport grad_check(const std::string& op_id, int trials, std::uint64_t seed,
                                  double h = 1e-4, double threshold = 1e-4) {
    GradCheckReport rep;
    rep.op = op_id;
    rep.trials = trials;
    rep.step = h;
    rep.threshold = threshold;

    bool known = false;
    for (const auto& id : grad_check_op_ids()) known |= (id == op_id);
    if (!known) throw config_error("grad_check: unknown op id '" + op_id + "'");

    LossConfig cfg; // default weighting constants
    LossConfig cfg_attached = cfg;
    cfg_attached.detach_pred_weight = false;

    constexpr int dim = 8;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(mix_seed(seed, 0x67726164ull, static_cast<std::uint64_t>(trial)));
        ImageD pred(dim, dim), target(dim, dim);
        // bounded away from 0 so the pow derivative stays mild at h=1e-4
        for (auto& v : pred.v) v = rng.uniform(0.05, 0.95);
        for (auto& v : target.v) v = rng.uniform(0.05, 0.95);

        if (op_id == "weighted_mse") {
            // frozen-weight oracle (stop-gradient semantics)
            ImageD w0(dim, dim);
            for (std::size_t i = 0; i < w0.v.size(); ++i)
                w0.v[i] = wmse_weight(pred.v[i], target.v[i], cfg);
            const double n = static_cast<double>(pred.size());
            auto frozen = [&](const ImageD& p) {
                double s = 0;
                for (std::size_t i = 0; i < p.v.size(); ++i) {
                    const double d = p.v[i] - target.v[i];
                    s += w0.v[i] * d * d;
                }
                return s / n;
            };
            auto grad = [&](const ImageD& p) { return weighted_mse(p, target, cfg).grad; };
            check_gradient_at(rep, trial, pred, frozen, grad);
        } else if (op_id == "weighted_mse_attached") {
            auto value = [&](const ImageD& p) { return weighted_mse(p, target, cfg_attached).value; };
            auto grad = [&](const ImageD& p) { return weighted_mse(p, target, cfg_attached).grad; };
            check_gradient_at(rep, trial, pred, value, grad);
        } else if (op_id == "vamos") {
            ImageD w0(dim, dim);
            for (std::size_t i = 0; i < w0.v.size(); ++i)
                w0.v[i] = wmse_weight(pred.v[i], target.v[i], cfg);
            const double n = static_cast<double>(pred.size());
            auto value = [&](const ImageD& p) {
                double s = 0;
                for (std::size_t i = 0; i < p.v.size(); ++i) {
                    const double d = p.v[i] - target.v[i];
                    s += w0.v[i] * d * d;
                }
                double total = s / n;
                total += cfg.lambda_proj * projection_l1(p, target, Axis::axial, ProjKind::max).value;
                total += cfg.lambda_proj * projection_l1(p, target, Axis::lateral, ProjKind::max).value;
                total += cfg.lambda_proj * projection_l1(p, target, Axis::axial, ProjKind::avg).value;
                total += cfg.lambda_proj * projection_l1(p, target, Axis::lateral, ProjKind::avg).value;
                return total;
            };
            auto grad = [&](const ImageD& p) { return vamos_loss(p, target, cfg).second; };
            auto excl = detail::union_exclusion(
                {detail::projection_exclusion(pred, target, Axis::axial, ProjKind::max, h),
                 detail::projection_exclusion(pred, target, Axis::lateral, ProjKind::max, h),
                 detail::projection_exclusion(pred, target, Axis::axial, ProjKind::avg, h),
                 detail::projection_exclusion(pred, target, Axis::lateral, ProjKind::avg, h)});
            check_gradient_at(rep, trial, pred, value, grad, excl);
        } else {
            const Axis axis = (op_id == "mip_axial" || op_id == "aip_axial") ? Axis::axial
                                                                             : Axis::lateral;
            const ProjKind kind =
                (op_id == "mip_axial" || op_id == "mip_lateral") ? ProjKind::max : ProjKind::avg;
            auto value = [&](const ImageD& p) { return projection_l1(p, target, axis, kind).value; };
            auto grad = [&](const ImageD& p) { return projection_l1(p, target, axis, kind).grad; };
            check_gradient_at(rep, trial, pred, value, grad,
                              detail::projection_exclusion(pred, target, axis, kind, h));
        }
    }
    return rep;
}

} // namespace vamos
