#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "vamos/common.hpp"
#include "vamos/corruption.hpp"
#include "vamos/loss.hpp"
#include "vamos/net.hpp"
#include "vamos/rng.hpp"
#include "vamos/volume.hpp"

namespace vamos {

struct TrainConfig {
    int epochs = 10;
    int batch_size = 4;
    double learning_rate = 1e-3;
    CorruptionConfig corruption;
    std::uint64_t seed = 0;
    int checkpoint_every = 0; // 0 disables periodic checkpoints
    long max_steps = 0;       // 0 = bounded by epochs only
    int overfit_target = -1;  // >= 0 pins training to one stack of volume 0
    bool deterministic = true;
    int threads = 1;

    void validate() const {
        if (epochs < 1) throw config_error("TrainConfig: epochs must be >= 1");
        if (batch_size < 1) throw config_error("TrainConfig: batch_size must be >= 1");
        if (!(learning_rate > 0.0)) throw config_error("TrainConfig: learning_rate must be > 0");
        if (checkpoint_every < 0) throw config_error("TrainConfig: checkpoint_every must be >= 0");
        if (max_steps < 0) throw config_error("TrainConfig: max_steps must be >= 0");
        if (threads < 1) throw config_error("TrainConfig: threads must be >= 1");
        corruption.validate();
        if (corruption.mode != CorruptionMode::dynamic)
            throw config_error("TrainConfig: training requires dynamic corruption mode");
    }
};

struct EpochLog {
    int epoch = 0;
    long steps = 0; // global optimizer steps completed at end of this epoch
    long items = 0; // stacks consumed this epoch
    LossBreakdown mean; // per-item mean of the loss components
};

struct TrainHooks {
    std::function<void(const EpochLog&)> on_epoch;
    std::function<void(const Model&, int epoch, long step)> on_checkpoint;
};

namespace detail {

inline void check_finite_breakdown(const LossBreakdown& b, long step) {
    const std::pair<const char*, double> parts[] = {
        {"wmse", b.wmse},       {"mip_axial", b.mip_ax}, {"mip_lateral", b.mip_lat},
        {"aip_axial", b.aip_ax}, {"aip_lateral", b.aip_lat}, {"total", b.total},
    };
    for (const auto& [name, value] : parts)
        if (!std::isfinite(value))
            throw data_error("training diverged: non-finite " + std::string(name) + " at step "
                             + std::to_string(step + 1));
}

// Mask for one training item: a truncated-geometric block around `target`.
inline ValidityMask training_mask(const CorruptionConfig& cc, int n_slices, int epoch, int vol,
                                  int target) {
    Rng rng(mix_seed(cc.seed, static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(vol),
                     static_cast<std::uint64_t>(target)));
    return corrupt_for_target(cc, target, n_slices, rng);
}

} // namespace detail

// Trains in place. Ground-truth volumes stay clean; corruption only shapes the
// validity mask used when assembling each input stack. Returns per-epoch logs.
inline std::vector<EpochLog> train(Model& model, const std::vector<Volume>& volumes,
                                   const TrainConfig& tc, const LossConfig& lc,
                                   const TrainHooks& hooks = {}) {
    tc.validate();
    lc.validate();
    if (volumes.empty()) throw data_error("train: no volumes");
    const int div = 1 << model.cfg.depth;
    for (const Volume& v : volumes)
        if (v.height < div || v.width < div)
            throw shape_error("train: volume smaller than the network's 2^depth minimum");
    if (tc.overfit_target >= 0 && tc.overfit_target >= volumes[0].n_slices)
        throw config_error("train: overfit_target out of range for volume 0");

    struct Item {
        int vol;
        int target;
    };

    AdamConfig acfg;
    acfg.lr = tc.learning_rate;
    AdamState adam;
    adam.init_like(model);
    Gradients grads;
    grads.init_like(model);
    FwdCache cache;

    // In overfit mode the mask is drawn once and reused every step.
    ValidityMask overfit_mask;
    if (tc.overfit_target >= 0)
        overfit_mask =
            detail::training_mask(tc.corruption, volumes[0].n_slices, 0, 0, tc.overfit_target);

    std::vector<EpochLog> logs;
    long step = 0;
    bool stop = false;

    for (int epoch = 0; epoch < tc.epochs && !stop; ++epoch) {
        std::vector<Item> schedule;
        if (tc.overfit_target >= 0) {
            schedule.push_back({0, tc.overfit_target});
        } else {
            for (int v = 0; v < static_cast<int>(volumes.size()); ++v)
                for (int t = 0; t < volumes[static_cast<std::size_t>(v)].n_slices; ++t)
                    schedule.push_back({v, t});
            Rng shuffle_rng(mix_seed(tc.seed, 0x73686566ull, static_cast<std::uint64_t>(epoch)));
            for (std::size_t i = schedule.size(); i > 1; --i) {
                const std::size_t j = shuffle_rng.uniform_int(i);
                std::swap(schedule[i - 1], schedule[j]);
            }
        }

        EpochLog log;
        log.epoch = epoch;
        double sum_total = 0, sum_wmse = 0, sum_mip_ax = 0, sum_mip_lat = 0, sum_aip_ax = 0,
               sum_aip_lat = 0;

        for (std::size_t pos = 0; pos < schedule.size() && !stop;) {
            const std::size_t batch_end =
                std::min(schedule.size(), pos + static_cast<std::size_t>(tc.batch_size));
            grads.zero();
            int batch_items = 0;
            for (std::size_t bi = pos; bi < batch_end; ++bi) {
                const Item& it = schedule[bi];
                const Volume& gt = volumes[static_cast<std::size_t>(it.vol)];
                const ValidityMask mask =
                    tc.overfit_target >= 0
                        ? overfit_mask
                        : detail::training_mask(tc.corruption, gt.n_slices, epoch, it.vol,
                                                it.target);
                const SliceStack stack = extract_stack(gt, mask, it.target, model.cfg.s_in);
                const Tensor input = tensor_from_stack(stack);
                const ImageF pred = model_forward(model, input, cache);
                const ImageD predd = convert<double>(pred);
                const ImageD gtd = convert<double>(gt.slice(it.target));

                const auto [breakdown, grad_img] = vamos_loss(predd, gtd, lc);
                detail::check_finite_breakdown(breakdown, step);
                model_backward(model, cache, grad_img, grads);

                sum_total += breakdown.total;
                sum_wmse += breakdown.wmse;
                sum_mip_ax += breakdown.mip_ax;
                sum_mip_lat += breakdown.mip_lat;
                sum_aip_ax += breakdown.aip_ax;
                sum_aip_lat += breakdown.aip_lat;
                ++batch_items;
                ++log.items;
            }
            grads.scale(1.0f / static_cast<float>(batch_items));
            adam_step(model, grads, adam, acfg);
            ++step;
            pos = batch_end;
            if (tc.max_steps > 0 && step >= tc.max_steps) stop = true;
        }

        log.steps = step;
        if (log.items > 0) {
            const double inv = 1.0 / static_cast<double>(log.items);
            log.mean.total = sum_total * inv;
            log.mean.wmse = sum_wmse * inv;
            log.mean.mip_ax = sum_mip_ax * inv;
            log.mean.mip_lat = sum_mip_lat * inv;
            log.mean.aip_ax = sum_aip_ax * inv;
            log.mean.aip_lat = sum_aip_lat * inv;
        }
        logs.push_back(log);
        if (hooks.on_epoch) hooks.on_epoch(log);

        const bool periodic =
            tc.checkpoint_every > 0 && (epoch + 1) % tc.checkpoint_every == 0;
        const bool last = stop || epoch + 1 == tc.epochs;
        if (hooks.on_checkpoint && (periodic || last)) hooks.on_checkpoint(model, epoch, step);
    }
    return logs;
}

// Replaces every invalid slice with the network's prediction from the clean
// context around it. Valid slices are copied through untouched. Slices are
// independent, so threading changes nothing but wall time.
inline Volume infer_volume(const Model& model, const Volume& v, const ValidityMask& mask,
                           int threads = 1) {
    if (mask.flags.size() != static_cast<std::size_t>(v.n_slices))
        throw shape_error("infer_volume: mask length != slice count");
    const std::vector<int> targets = mask.invalid_indices();
    if (static_cast<int>(targets.size()) == v.n_slices)
        throw data_error("infer_volume: refusing a volume with every slice invalid");
    const int div = 1 << model.cfg.depth;
    if (v.height < div || v.width < div)
        throw shape_error("infer_volume: volume smaller than the network's 2^depth minimum");

    Volume out = v;
    if (targets.empty()) return out;

    const auto run_range = [&](std::size_t lo, std::size_t hi) {
        FwdCache cache;
        for (std::size_t i = lo; i < hi; ++i) {
            const int t = targets[i];
            const SliceStack stack = extract_stack(v, mask, t, model.cfg.s_in);
            const ImageF pred = model_forward(model, tensor_from_stack(stack), cache);
            out.set_slice(t, pred);
        }
    };

    const int n_workers =
        std::max(1, std::min(threads, static_cast<int>(targets.size())));
    if (n_workers == 1) {
        run_range(0, targets.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t per = (targets.size() + n_workers - 1) / n_workers;
        for (int w = 0; w < n_workers; ++w) {
            const std::size_t lo = static_cast<std::size_t>(w) * per;
            const std::size_t hi = std::min(targets.size(), lo + per);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (std::thread& th : pool) th.join();
    }
    return out;
}

} // namespace vamos
