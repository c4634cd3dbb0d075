// Acceptance suite: nine numbered criteria, one [PASS]/[FAIL] line each.
//
//   ./acceptance            run everything (the slow end-to-end runs included)
//   ./acceptance --only 1,5 run a comma-separated subset
//
// Exits 0 only if every requested criterion passes. Each criterion is
// self-contained: it builds its own phantoms, models, and temp files, so a
// subset run behaves exactly like the full suite.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vamos/vamos.hpp"

namespace {

using namespace vamos;
namespace fs = std::filesystem;

// Thrown on the first unmet requirement; main() turns it into a [FAIL] line.
struct criterion_failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw criterion_failed(what);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "vamos-acceptance";
    fs::create_directories(dir);
    return dir;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), "cannot reopen " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ImageD random_image(int h, int w, std::uint64_t seed, double lo = 0.05, double hi = 0.95) {
    ImageD img(h, w);
    Rng rng(seed);
    for (auto& v : img.v) v = rng.uniform(lo, hi);
    return img;
}

// ---------------------------------------------------------------------------
// 1. Analytic loss gradients vs 64-bit central differences, 100 trials per op.

void criterion_1(std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const std::string& op : grad_check_op_ids()) {
        const GradCheckReport rep = grad_check(op, 100, 2026);
        worst = std::max(worst, rep.max_rel_err);
        if (!rep.pass()) {
            const GradCheckFailure& f = rep.failures.front();
            throw criterion_failed(op + ": trial " + std::to_string(f.trial) + " pixel ("
                                   + std::to_string(f.y) + "," + std::to_string(f.x)
                                   + ") analytic " + fmt(f.analytic) + " fd " + fmt(f.fd)
                                   + " rel " + fmt(f.rel_err));
        }
        require(rep.max_rel_err < 1e-4,
                op + ": max relative error " + fmt(rep.max_rel_err) + " >= 1e-4");
    }
    const double secs = seconds_since(t0);
    require(secs < 30.0, "runtime " + fmt(secs) + " s exceeds the 30 s budget");
    note = "7 ops x 100 trials, max rel err " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s";
}

// ---------------------------------------------------------------------------
// 2. Loss identities: exact zero at pred == target, lambda_proj = 0 collapse,
//    breakdown linearity within 8 ulps on 1000 random pairs.

void criterion_2(std::string& note) {
    const LossConfig lc;

    for (int i = 0; i < 20; ++i) {
        const ImageD img = random_image(8, 8, mix_seed(20, static_cast<std::uint64_t>(i)));
        const auto [bd, grad] = vamos_loss(img, img, lc);
        require(bd.total == 0.0 && bd.wmse == 0.0 && bd.mip_ax == 0.0 && bd.mip_lat == 0.0
                    && bd.aip_ax == 0.0 && bd.aip_lat == 0.0,
                "pred == target must give exactly zero components");
        for (double g : grad.v) require(g == 0.0, "pred == target must give a zero gradient");
    }

    LossConfig off = lc;
    off.lambda_proj = 0.0;
    for (int i = 0; i < 100; ++i) {
        const ImageD p = random_image(8, 8, mix_seed(21, static_cast<std::uint64_t>(i)));
        const ImageD t = random_image(8, 8, mix_seed(22, static_cast<std::uint64_t>(i)));
        const auto [bd, grad] = vamos_loss(p, t, off);
        require(bd.total == bd.wmse, "lambda_proj = 0 must make total identical to wmse");
    }

    double worst_ulps = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ImageD p = random_image(8, 8, mix_seed(23, static_cast<std::uint64_t>(i)));
        const ImageD t = random_image(8, 8, mix_seed(24, static_cast<std::uint64_t>(i)));
        const auto [bd, grad] = vamos_loss(p, t, lc);
        const double recomposed =
            bd.wmse + lc.lambda_proj * (bd.mip_ax + bd.mip_lat + bd.aip_ax + bd.aip_lat);
        const double scale = std::max({std::fabs(bd.total), std::fabs(recomposed), 1.0});
        const double ulps =
            std::fabs(bd.total - recomposed) / (scale * std::numeric_limits<double>::epsilon());
        worst_ulps = std::max(worst_ulps, ulps);
        require(ulps <= 8.0, "pair " + std::to_string(i) + ": breakdown off by "
                                 + fmt(ulps, 3) + " ulps");
    }
    note = "zeros exact, collapse exact, worst linearity gap " + fmt(worst_ulps, 3) + " ulps";
}

// ---------------------------------------------------------------------------
// 3. Corruption statistics: truncated-geometric draws match the renormalized
//    pmf (chi-square), never exceed the cap, and always invalidate the target.

void criterion_3(std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();
    CorruptionConfig cfg; // p = 0.4, max_block = 6, renormalize
    require(std::fabs(truncated_geometric_pmf(cfg.p, cfg.max_block, 1) - 0.41957572502685286)
                < 1e-12,
            "P(1) does not match the renormalized pmf");

    constexpr int draws = 100000;
    std::vector<long> counts(static_cast<std::size_t>(cfg.max_block) + 1, 0);
    Rng rng(777);
    for (int i = 0; i < draws; ++i) {
        const int k = sample_block_length(cfg, rng);
        require(k >= 1 && k <= cfg.max_block,
                "draw " + std::to_string(k) + " escapes [1, " + std::to_string(cfg.max_block)
                    + "]");
        ++counts[static_cast<std::size_t>(k)];
    }
    double stat = 0.0;
    for (int k = 1; k <= cfg.max_block; ++k) {
        const double expected = draws * truncated_geometric_pmf(cfg.p, cfg.max_block, k);
        const double diff = static_cast<double>(counts[static_cast<std::size_t>(k)]) - expected;
        stat += diff * diff / expected;
    }
    const double p_value = chi_square_upper_p(stat, cfg.max_block - 1.0);
    require(p_value > 0.01, "chi-square p = " + fmt(p_value) + " <= 0.01");

    const int n_slices = 40;
    for (int target = 0; target < n_slices; ++target) {
        for (int trial = 0; trial < 5; ++trial) {
            Rng mask_rng(mix_seed(3, static_cast<std::uint64_t>(target),
                                  static_cast<std::uint64_t>(trial)));
            const ValidityMask m = corrupt_for_target(cfg, target, n_slices, mask_rng);
            require(!m.valid(target), "target slice " + std::to_string(target)
                                          + " survived corruption");
        }
    }
    const double secs = seconds_since(t0);
    require(secs < 10.0, "runtime " + fmt(secs) + " s exceeds the 10 s budget");
    note = "chi-square p " + fmt(p_value, 3) + " over 1e5 draws, " + fmt(secs, 3) + " s";
}

// ---------------------------------------------------------------------------
// 4. Projection operators vs naive double-loop reductions, transpose duality,
//    and the masked-slice <-> blank en face row equivalence.

void criterion_4(std::string& note) {
    for (int i = 0; i < 1000; ++i) {
        const ImageD b = random_image(5, 7, mix_seed(40, static_cast<std::uint64_t>(i)), 0.0, 1.0);

        for (int x = 0; x < b.width; ++x) {
            double m = b.at(0, x), s = 0.0;
            for (int z = 0; z < b.height; ++z) {
                m = std::max(m, b.at(z, x));
                s += b.at(z, x);
            }
            require(profile_of(b, Axis::axial, ProjKind::max).values[x] == m,
                    "axial max mismatch");
            require(profile_of(b, Axis::axial, ProjKind::avg).values[x] == s / b.height,
                    "axial avg mismatch");
        }
        for (int z = 0; z < b.height; ++z) {
            double m = b.at(z, 0), s = 0.0;
            for (int x = 0; x < b.width; ++x) {
                m = std::max(m, b.at(z, x));
                s += b.at(z, x);
            }
            require(profile_of(b, Axis::lateral, ProjKind::max).values[z] == m,
                    "lateral max mismatch");
            require(profile_of(b, Axis::lateral, ProjKind::avg).values[z] == s / b.width,
                    "lateral avg mismatch");
        }

        ImageD t(b.width, b.height);
        for (int z = 0; z < b.height; ++z)
            for (int x = 0; x < b.width; ++x) t.at(x, z) = b.at(z, x);
        for (const ProjKind kind : {ProjKind::max, ProjKind::avg}) {
            const Profile pa = profile_of(b, Axis::axial, kind);
            const Profile pl = profile_of(t, Axis::lateral, kind);
            for (int j = 0; j < pa.length(); ++j)
                require(pa.values[static_cast<std::size_t>(j)]
                            == pl.values[static_cast<std::size_t>(j)],
                        "transpose duality broken");
        }
    }

    PhantomConfig pc;
    pc.n_slices = 20;
    pc.height = 16;
    pc.width = 24;
    pc.vessels = 3;
    const Volume gt = generate_phantom(pc, 404);
    CorruptionConfig cc;
    cc.seed = 405;
    const ValidityMask mask = generate_fixed_masks(cc, pc.n_slices, 2);
    const ImageF mip = enface_mip(apply_mask(gt, mask));
    for (int n = 0; n < pc.n_slices; ++n) {
        bool all_zero = true;
        for (int x = 0; x < mip.width; ++x) all_zero &= (mip.at(n, x) == 0.0f);
        require(all_zero == !mask.valid(n),
                "en face row " + std::to_string(n) + " zero-pattern disagrees with the mask");
    }
    note = "1000 B-scans exact, duality exact, blank rows match the mask";
}

// ---------------------------------------------------------------------------
// 5. Metric oracles: brute-force parity, frozen SSIM references, a t-table
//    p-value, and the half-intensity edge-preservation identity.

void criterion_5(std::string& note) {
    for (int i = 0; i < 50; ++i) {
        const ImageD a = random_image(13, 17, mix_seed(50, static_cast<std::uint64_t>(i)));
        const ImageD b = random_image(13, 17, mix_seed(51, static_cast<std::uint64_t>(i)));
        const double n = static_cast<double>(a.size());
        double l1 = 0, sa = 0, sb = 0, mse = 0;
        for (std::size_t j = 0; j < a.v.size(); ++j) {
            l1 += std::fabs(a.v[j] - b.v[j]);
            sa += a.v[j];
            sb += b.v[j];
            mse += (a.v[j] - b.v[j]) * (a.v[j] - b.v[j]);
        }
        l1 /= n;
        mse /= n;
        require(std::fabs(metric_l1(a, b) - l1) < 1e-9, "l1 drifts from brute force");
        require(std::fabs(metric_mie(a, b) - std::fabs(sa - sb) / n) < 1e-9,
                "mie drifts from brute force");
        require(std::fabs(metric_psnr(a, b) - 10.0 * std::log10(1.0 / mse)) < 1e-9,
                "psnr drifts from brute force");
        const double ma = sa / n, mb = sb / n;
        double va = 0, vb = 0, cov = 0;
        for (std::size_t j = 0; j < a.v.size(); ++j) {
            va += (a.v[j] - ma) * (a.v[j] - ma);
            vb += (b.v[j] - mb) * (b.v[j] - mb);
            cov += (a.v[j] - ma) * (b.v[j] - mb);
        }
        require(std::fabs(metric_ncc(a, b) - cov / std::sqrt(va * vb)) < 1e-9,
                "ncc drifts from brute force");
    }

    // Gaussian-weighted (sigma 1.5, 11x11), valid-window, population-covariance
    // SSIM at data range 1; reference values frozen from an independent run.
    std::uint64_t state = 42;
    std::vector<ImageD> imgs;
    for (int i = 0; i < 6; ++i) {
        ImageD img(16, 16);
        for (auto& v : img.v) v = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        imgs.push_back(std::move(img));
    }
    const struct {
        int a, b;
        double ref;
    } ssim_cases[] = {
        {0, 1, 0.025591057863894325},
        {2, 3, -0.02071579549401649},
        {4, 5, -0.03769356793937794},
    };
    for (const auto& c : ssim_cases)
        require(std::fabs(metric_ssim(imgs[c.a], imgs[c.b]) - c.ref) < 1e-6,
                "ssim drifts from the frozen reference");

    std::vector<double> xs(10), ys(10, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = (i % 2 == 0) ? 5.5 : -0.5;
    const TTestResult tt = paired_t_test(xs, ys);
    require(std::fabs(tt.t - 2.5) < 1e-12, "t statistic is not 2.5");
    require(std::fabs(tt.p - 0.03386182768298571) < 1e-3,
            "two-sided p for t=2.5, n=10 misses the table value");

    PhantomConfig pc;
    pc.n_slices = 4;
    pc.height = 24;
    pc.width = 32;
    pc.vessels = 3;
    const Volume ph = generate_phantom(pc, 500);
    const ImageD gt = convert<double>(ph.slice(2));
    ImageD half = gt;
    for (auto& v : half.v) v *= 0.5;
    const double ep = metric_sobel_edge_preservation(half, gt);
    require(std::fabs(ep - 0.5) < 1e-9, "edge preservation of half-intensity input is not 0.5");

    note = "brute-force parity 1e-9, ssim 1e-6, t-test p " + fmt(tt.p, 4) + ", edge 0.5 exact";
}

// ---------------------------------------------------------------------------
// 6. Overfit smoke: 300 single-item steps on one stack must cut the loss
//    below 10% of its first-step value.

void criterion_6(std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();

    PhantomConfig pc; // library default: 64 x 48 x 96, six vessels
    const Volume gt = generate_phantom(pc, 600);

    ModelConfig mc;
    mc.seed = 601;
    Model model = build_model(mc);

    TrainConfig tc;
    tc.epochs = 300; // overfit schedule trains one item per epoch
    tc.batch_size = 1;
    tc.overfit_target = pc.n_slices / 2;
    tc.seed = 602;
    tc.corruption.seed = 603;

    const LossConfig lc;
    const std::vector<EpochLog> logs = train(model, {gt}, tc, lc);
    require(logs.size() == 300, "expected 300 optimizer steps");
    const double first = logs.front().mean.total;
    const double last = logs.back().mean.total;
    require(last < 0.10 * first, "loss " + fmt(first) + " -> " + fmt(last)
                                     + " misses the 10% bar");
    const double secs = seconds_since(t0);
    require(secs < 300.0, "runtime " + fmt(secs) + " s exceeds the 5 min budget");
    note = "loss " + fmt(first, 4) + " -> " + fmt(last, 4) + " ("
           + fmt(100.0 * last / first, 3) + "%), " + fmt(secs, 3) + " s";
}

// ---------------------------------------------------------------------------
// Shared by criteria 7-9: a small phantom family and a matched trainer.

PhantomConfig small_phantom_cfg() {
    PhantomConfig pc;
    pc.n_slices = 28;
    pc.height = 32;
    pc.width = 64;
    pc.vessels = 4;
    return pc;
}

TrainConfig small_train_cfg(int epochs, std::uint64_t seed, std::uint64_t corruption_seed) {
    TrainConfig tc;
    tc.epochs = epochs;
    tc.batch_size = 4;
    tc.seed = seed;
    tc.corruption.seed = corruption_seed;
    return tc;
}

// ---------------------------------------------------------------------------
// 7. Ablation trend: with matched budgets, adding the axial projection terms
//    and then the lateral ones must improve the en face restoration metrics.

void criterion_7(std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();

    const PhantomConfig pc = small_phantom_cfg();
    constexpr int n_vols = 7;
    std::vector<Volume> vols;
    std::vector<ValidityMask> masks;
    for (int v = 0; v < n_vols; ++v) {
        vols.push_back(generate_phantom(pc, mix_seed(700, static_cast<std::uint64_t>(v))));
        CorruptionConfig cm;
        cm.seed = mix_seed(701, static_cast<std::uint64_t>(v));
        masks.push_back(generate_fixed_masks(cm, pc.n_slices, 2));
    }

    LossConfig wmse_only;
    wmse_only.lambda_proj = 0.0;
    LossConfig axial_only;
    axial_only.use_lateral_proj = false;
    const LossConfig full;

    struct Scores {
        double l1 = 0, mie = 0, ssim = 0, ncc = 0;
    };
    const auto run_config = [&](const LossConfig& lc) {
        ModelConfig mc;
        mc.seed = 702; // identical init across the three configurations
        Model model = build_model(mc);
        // Start the sigmoid head at the data's prior brightness (~0.12) instead of
        // 0.5. From a 0.5 start the projection-free arm slams its pre-activations
        // into the saturated tail where float32 sigmoid underflows to exactly 0,
        // freezing training; every arm gets the same starting point.
        std::vector<float> flat = flatten_parameters(model);
        flat.back() = -2.0f;
        load_parameters(model, flat);
        const TrainConfig tc = small_train_cfg(12, 703, 704);
        train(model, vols, tc, lc);

        Scores s;
        for (int v = 0; v < n_vols; ++v) {
            const Volume corrupted = apply_mask(vols[static_cast<std::size_t>(v)],
                                                masks[static_cast<std::size_t>(v)]);
            const Volume restored = infer_volume(model, corrupted,
                                                 masks[static_cast<std::size_t>(v)]);
            const ImageD mr = convert<double>(enface_mip(restored));
            const ImageD mg = convert<double>(enface_mip(vols[static_cast<std::size_t>(v)]));
            s.l1 += metric_l1(mr, mg) / n_vols;
            s.mie += metric_mie(mr, mg) / n_vols;
            s.ssim += metric_ssim(mr, mg) / n_vols;
            s.ncc += metric_ncc(mr, mg) / n_vols;
        }
        return s;
    };

    const Scores a = run_config(wmse_only);
    const Scores b = run_config(axial_only);
    const Scores c = run_config(full);

    std::ostringstream table;
    table << "L1 " << fmt(a.l1, 4) << " > " << fmt(b.l1, 4) << " > " << fmt(c.l1, 4) << ", MIE "
          << fmt(a.mie, 4) << " > " << fmt(b.mie, 4) << " > " << fmt(c.mie, 4) << ", SSIM "
          << fmt(c.ssim, 4) << " vs " << fmt(a.ssim, 4) << ", NCC " << fmt(c.ncc, 4) << " vs "
          << fmt(a.ncc, 4);

    require(a.l1 > b.l1 && b.l1 > c.l1, "en face MIP L1 not strictly improving: " + table.str());
    require(a.mie > b.mie && b.mie > c.mie,
            "en face MIP MIE not strictly improving: " + table.str());
    require(c.ssim > a.ssim, "full-loss SSIM does not beat the plain-MSE run: " + table.str());
    require(c.ncc > a.ncc, "full-loss NCC does not beat the plain-MSE run: " + table.str());

    const double secs = seconds_since(t0);
    require(secs < 3600.0, "runtime " + fmt(secs) + " s exceeds the 60 min budget");
    note = table.str() + ", " + fmt(secs, 3) + " s";
}

// ---------------------------------------------------------------------------
// 8. Severity sweep: restoration must beat zero-filling at every block length,
//    and blanking more slices can only raise the corrupted-volume error.

void criterion_8(std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();

    const PhantomConfig pc = small_phantom_cfg();
    const Volume gt = generate_phantom(pc, 800);

    ModelConfig mc;
    mc.seed = 801;
    Model model = build_model(mc);
    const TrainConfig tc = small_train_cfg(20, 802, 803);
    train(model, {gt}, tc, LossConfig{});

    std::vector<int> lengths(10);
    for (int i = 0; i < 10; ++i) lengths[static_cast<std::size_t>(i)] = i + 1;
    const std::vector<SweepRow> rows = severity_sweep(model, gt, lengths);
    require(rows.size() == lengths.size(), "sweep dropped rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& r = rows[i];
        require(r.restored_mie < r.corrupted_mie,
                "block length " + std::to_string(r.block_length) + ": restored MIE "
                    + fmt(r.restored_mie) + " >= corrupted MIE " + fmt(r.corrupted_mie));
        if (i > 0)
            require(rows[i - 1].corrupted_mie <= r.corrupted_mie,
                    "corrupted MIE decreased between lengths "
                        + std::to_string(rows[i - 1].block_length) + " and "
                        + std::to_string(r.block_length));
    }
    const double secs = seconds_since(t0);
    note = "corrupted MIE " + fmt(rows.front().corrupted_mie, 4) + " .. "
           + fmt(rows.back().corrupted_mie, 4) + ", restored below it at all 10 lengths, "
           + fmt(secs, 3) + " s";
}

// ---------------------------------------------------------------------------
// 9. Determinism & persistence: two from-scratch pipeline runs produce the
//    same report JSON byte for byte; volume and checkpoint files round-trip.

void criterion_9(std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = scratch_dir();

    const auto pipeline = [&](const fs::path& ckpt_path) {
        const PhantomConfig pc = small_phantom_cfg();
        const Volume gt = generate_phantom(pc, 900);

        CorruptionConfig cm;
        cm.seed = 901;
        const ValidityMask mask = generate_fixed_masks(cm, pc.n_slices, 2);
        const Volume corrupted = apply_mask(gt, mask);

        ModelConfig mc;
        mc.seed = 902;
        Model model = build_model(mc);
        TrainConfig tc = small_train_cfg(60, 903, 904);
        tc.max_steps = 300;
        const LossConfig lc;
        const std::vector<EpochLog> logs = train(model, {gt}, tc, lc);
        save_checkpoint(ckpt_path.string(), model, tc, lc, logs.back().epoch,
                        logs.back().steps);

        const Volume restored = infer_volume(model, corrupted, mask);
        return evaluate_pair(restored, gt, mask, "phantom-900", cm.seed).dump(2);
    };

    const std::string report_a = pipeline(dir / "run_a.ckpt");
    const std::string report_b = pipeline(dir / "run_b.ckpt");
    require(report_a == report_b, "reports from two identical runs differ");
    require(read_bytes(dir / "run_a.ckpt") == read_bytes(dir / "run_b.ckpt"),
            "checkpoints from two identical runs differ");

    // Volume persistence: load back bit-exactly, and re-saving reproduces the
    // file byte for byte.
    const Volume vol = generate_phantom(small_phantom_cfg(), 905);
    const fs::path vol_a = dir / "vol_a.octav", vol_b = dir / "vol_b.octav";
    save_volume(vol, vol_a.string());
    const Volume loaded = load_volume(vol_a.string());
    require(loaded.n_slices == vol.n_slices && loaded.height == vol.height
                && loaded.width == vol.width,
            "volume shape changed across save/load");
    require(std::memcmp(loaded.data.data(), vol.data.data(),
                        vol.data.size() * sizeof(float)) == 0,
            "volume payload changed across save/load");
    save_volume(loaded, vol_b.string());
    require(read_bytes(vol_a) == read_bytes(vol_b), "volume re-save is not byte-identical");

    // Checkpoint persistence: parameters load back bit-exactly and re-save
    // reproduces the file.
    const LoadedCheckpoint ck = load_checkpoint((dir / "run_a.ckpt").string());
    const fs::path ck_b = dir / "run_a_resave.ckpt";
    save_checkpoint(ck_b.string(), ck.model, ck.train, ck.loss, ck.epoch, ck.step);
    require(read_bytes(dir / "run_a.ckpt") == read_bytes(ck_b),
            "checkpoint re-save is not byte-identical");

    const double secs = seconds_since(t0);
    note = "two pipeline runs identical, volume and checkpoint round-trips exact, "
           + fmt(secs, 3) + " s";
}

struct Criterion {
    int id;
    const char* label;
    void (*run)(std::string&);
};

const Criterion criteria[] = {
    {1, "loss gradients match 64-bit central differences", criterion_1},
    {2, "loss identities: exact zeros, collapse, linearity", criterion_2},
    {3, "corruption draws follow the truncated-geometric law", criterion_3},
    {4, "projections match naive reductions and the mask", criterion_4},
    {5, "metrics match brute force and frozen references", criterion_5},
    {6, "overfit run cuts the loss below 10% in 300 steps", criterion_6},
    {7, "projection terms improve en face restoration", criterion_7},
    {8, "restoration beats zero-filling at every severity", criterion_8},
    {9, "pipeline is deterministic and files round-trip", criterion_9},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        std::string value;
        if (arg.rfind("--only=", 0) == 0) {
            value = arg.substr(7);
        } else if (arg == "--only" && i + 1 < argc) {
            value = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--only N[,N...]]\n";
            return 2;
        }
        std::stringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ',')) wanted.push_back(std::stoi(tok));
    }

    int failures = 0, ran = 0;
    for (const Criterion& c : criteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end())
            continue;
        ++ran;
        std::string detail;
        try {
            c.run(detail);
            std::cout << "[PASS] " << c.id << ". " << c.label << " (" << detail << ")"
                      << std::endl;
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] " << c.id << ". " << c.label << "\n        " << e.what()
                      << std::endl;
        }
    }
    std::cout << (ran - failures) << "/" << ran << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
