// Command-line front end for the OCTA motion-artifact inpainting toolkit.
//
// Subcommands: phantom | split | corrupt | train | infer | project | eval |
// sweep | losscheck. Every run writes the fully-resolved configuration beside
// its outputs so any result can be reproduced from the sidecar alone.
//
// Exit codes: 0 success, 2 configuration error, 3 data/runtime error,
// 4 gradient-check failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vamos/vamos.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool deterministic = true;
    bool deterministic_given = false;
};

vamos::RunConfig resolve_config(const GlobalOpts& g) {
    vamos::RunConfig rc;
    if (!g.config_path.empty()) rc = vamos::load_run_config(g.config_path);
    if (g.seed_given) rc.seed = g.seed;
    if (g.deterministic_given) rc.deterministic = g.deterministic;
    vamos::resolve_seeds(rc);
    return rc;
}

void write_sidecar_config(const vamos::RunConfig& rc, const std::string& out_path, bool is_dir) {
    const fs::path p = is_dir ? fs::path(out_path) / "resolved_config.json"
                              : fs::path(out_path + ".config.json");
    vamos::write_text_file(p.string(), vamos::to_json(rc).dump(2) + "\n");
}

void ensure_parent_dir(const std::string& file_path) {
    const fs::path parent = fs::path(file_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

std::string volume_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "vol_%03d.octav", index);
    return buf;
}

struct ManifestEntry {
    std::string file;
    std::uint64_t seed = 0;
    std::string checksum;
};

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    const ordered_json j =
        vamos::parse_json_text(vamos::read_text_file(path), "manifest file " + path);
    if (!j.contains("volumes") || !j.at("volumes").is_array())
        throw vamos::data_error("manifest '" + path + "' has no volume list");
    std::vector<ManifestEntry> entries;
    for (const auto& e : j.at("volumes")) {
        ManifestEntry m;
        m.file = e.at("file").get<std::string>();
        m.seed = e.value("seed", std::uint64_t{0});
        m.checksum = e.value("checksum", std::string{});
        entries.push_back(std::move(m));
    }
    if (entries.empty()) throw vamos::data_error("manifest '" + path + "' lists no volumes");
    return entries;
}

vamos::Volume load_manifest_volume(const std::string& manifest_path, const ManifestEntry& e) {
    const fs::path dir = fs::path(manifest_path).parent_path();
    const std::string vpath = (dir / e.file).string();
    if (!e.checksum.empty() && vamos::file_checksum_hex(vpath) != e.checksum)
        throw vamos::data_error("checksum mismatch for '" + vpath
                                + "' (file changed since the manifest was written)");
    return vamos::load_volume(vpath);
}

// ---- subcommand bodies -----------------------------------------------------

void cmd_phantom(const vamos::RunConfig& rc, const std::string& out_dir, int count) {
    if (count < 1) throw vamos::config_error("phantom: count must be >= 1");
    rc.phantom.validate();
    fs::create_directories(out_dir);

    ordered_json volumes = ordered_json::array();
    for (int i = 0; i < count; ++i) {
        const std::uint64_t vseed = vamos::mix_seed(rc.seed, 0x766f6c75ull, i);
        const vamos::Volume v = vamos::generate_phantom(rc.phantom, vseed);
        const std::string name = volume_file_name(i);
        const std::string path = (fs::path(out_dir) / name).string();
        vamos::save_volume(v, path);
        ordered_json entry;
        entry["file"] = name;
        entry["seed"] = vseed;
        entry["checksum"] = vamos::file_checksum_hex(path);
        volumes.push_back(entry);
    }

    ordered_json manifest;
    manifest["count"] = count;
    manifest["phantom"] = vamos::to_json(rc.phantom);
    manifest["base_seed"] = rc.seed;
    manifest["volumes"] = volumes;
    vamos::write_text_file((fs::path(out_dir) / "manifest.json").string(),
                           manifest.dump(2) + "\n");
    write_sidecar_config(rc, out_dir, /*is_dir=*/true);
    std::cout << "wrote " << count << " phantom volume(s) + manifest to " << out_dir << "\n";
}

void cmd_split(const vamos::RunConfig& rc, const std::string& manifest_path, int fold,
               const std::string& out_path) {
    const std::vector<ManifestEntry> entries = load_manifest(manifest_path);
    const int n = static_cast<int>(entries.size());
    const vamos::FoldSplit s = vamos::split_folds(n, fold);

    const auto names = [&entries](const std::vector<int>& idxs) {
        ordered_json arr = ordered_json::array();
        for (int i : idxs) arr.push_back(entries[static_cast<std::size_t>(i)].file);
        return arr;
    };
    ordered_json j;
    j["fold"] = s.fold;
    j["n_volumes"] = n;
    j["train"] = s.train;
    j["val"] = s.val;
    j["test"] = s.test;
    j["train_files"] = names(s.train);
    j["val_files"] = names(s.val);
    j["test_files"] = names(s.test);
    ensure_parent_dir(out_path);
    vamos::write_text_file(out_path, j.dump(2) + "\n");
    write_sidecar_config(rc, out_path, /*is_dir=*/false);
    std::cout << "fold " << fold << ": train=" << s.train.size() << " val=" << s.val.size()
              << " test=" << s.test.size() << " -> " << out_path << "\n";
}

void cmd_corrupt(vamos::RunConfig rc, const std::string& in_path, const std::string& out_path,
                 int events) {
    rc.corruption.mode = vamos::CorruptionMode::fixed; // held-out masks are always fixed
    const vamos::Volume v = vamos::load_volume(in_path);
    const vamos::ValidityMask mask = vamos::generate_fixed_masks(rc.corruption, v.n_slices, events);
    const vamos::Volume corrupted = vamos::apply_mask(v, mask);
    ensure_parent_dir(out_path);
    vamos::save_volume(corrupted, out_path);
    vamos::save_mask_json(mask, out_path + ".mask.json");
    write_sidecar_config(rc, out_path, /*is_dir=*/false);
    std::cout << "corrupted " << mask.count_invalid() << "/" << v.n_slices << " slices -> "
              << out_path << "\n";
}

std::vector<int> subset_indices(const std::string& split_path, const std::string& subset, int n) {
    if (split_path.empty() || subset == "all") {
        std::vector<int> all(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
        return all;
    }
    const ordered_json j =
        vamos::parse_json_text(vamos::read_text_file(split_path), "split file " + split_path);
    if (!j.contains(subset))
        throw vamos::config_error("split file has no '" + subset + "' subset");
    std::vector<int> idxs = j.at(subset).get<std::vector<int>>();
    for (int i : idxs)
        if (i < 0 || i >= n)
            throw vamos::data_error("split index " + std::to_string(i)
                                    + " out of range for manifest of " + std::to_string(n));
    return idxs;
}

void cmd_train(vamos::RunConfig rc, const std::string& manifest_path,
               const std::string& split_path, const std::string& subset,
               const std::string& out_path, const std::string& log_path) {
    const std::vector<ManifestEntry> entries = load_manifest(manifest_path);
    const std::vector<int> idxs =
        subset_indices(split_path, subset, static_cast<int>(entries.size()));
    if (idxs.empty()) throw vamos::data_error("train: selected subset is empty");
    std::vector<vamos::Volume> volumes;
    volumes.reserve(idxs.size());
    for (int i : idxs)
        volumes.push_back(load_manifest_volume(manifest_path, entries[static_cast<std::size_t>(i)]));

    rc.train.deterministic = rc.deterministic;
    vamos::Model model = vamos::build_model(rc.model);

    ensure_parent_dir(out_path);
    const std::string effective_log = log_path.empty() ? out_path + ".log.jsonl" : log_path;
    ensure_parent_dir(effective_log);
    std::ofstream log(effective_log, std::ios::trunc);
    if (!log) throw vamos::io_error("cannot open train log '" + effective_log + "'");

    vamos::TrainHooks hooks;
    hooks.on_epoch = [&log](const vamos::EpochLog& e) {
        ordered_json j;
        j["epoch"] = e.epoch;
        j["steps"] = e.steps;
        j["items"] = e.items;
        j["loss"] = e.mean.total;
        j["wmse"] = e.mean.wmse;
        j["mip_axial"] = e.mean.mip_ax;
        j["mip_lateral"] = e.mean.mip_lat;
        j["aip_axial"] = e.mean.aip_ax;
        j["aip_lateral"] = e.mean.aip_lat;
        log << j.dump() << "\n";
        log.flush();
        std::cout << "epoch " << e.epoch << " steps " << e.steps << " loss " << e.mean.total
                  << "\n";
    };
    hooks.on_checkpoint = [&](const vamos::Model& m, int epoch, long step) {
        vamos::save_checkpoint(out_path, m, rc.train, rc.loss, epoch, step);
    };

    vamos::train(model, volumes, rc.train, rc.loss, hooks);
    write_sidecar_config(rc, out_path, /*is_dir=*/false);
    std::cout << "checkpoint -> " << out_path << "\n";
}

void cmd_infer(const vamos::RunConfig& rc, const std::string& ckpt_path,
               const std::string& in_path, const std::string& mask_path,
               const std::string& out_path, int threads) {
    const vamos::LoadedCheckpoint ck = vamos::load_checkpoint(ckpt_path);
    const vamos::Volume v = vamos::load_volume(in_path);
    const std::string effective_mask = mask_path.empty() ? in_path + ".mask.json" : mask_path;
    const vamos::ValidityMask mask = vamos::load_mask_json(effective_mask);
    const vamos::Volume restored = vamos::infer_volume(ck.model, v, mask, threads);
    ensure_parent_dir(out_path);
    vamos::save_volume(restored, out_path);
    write_sidecar_config(rc, out_path, /*is_dir=*/false);
    std::cout << "restored " << mask.count_invalid() << " slice(s) -> " << out_path << "\n";
}

void cmd_project(const vamos::RunConfig& rc, const std::string& in_path,
                 const std::string& out_path) {
    const vamos::Volume v = vamos::load_volume(in_path);
    const vamos::ImageF mip = vamos::enface_mip(v);
    ensure_parent_dir(out_path);
    vamos::write_pgm(mip, out_path);
    write_sidecar_config(rc, out_path, /*is_dir=*/false);
    std::cout << "en face MIP (" << mip.height << "x" << mip.width << ") -> " << out_path << "\n";
}

void cmd_eval(const vamos::RunConfig& rc, const std::string& restored_path,
              const std::string& gt_path, const std::string& mask_path,
              const std::string& out_path, std::string volume_id) {
    const vamos::Volume restored = vamos::load_volume(restored_path);
    const vamos::Volume gt = vamos::load_volume(gt_path);
    const vamos::ValidityMask mask = vamos::load_mask_json(mask_path);
    if (volume_id.empty()) volume_id = fs::path(restored_path).filename().string();
    const ordered_json report =
        vamos::evaluate_pair(restored, gt, mask, volume_id, rc.corruption.seed);
    ensure_parent_dir(out_path);
    vamos::write_text_file(out_path, report.dump(2) + "\n");
    write_sidecar_config(rc, out_path, /*is_dir=*/false);
    std::cout << "report -> " << out_path << "\n";
}

void cmd_sweep(const vamos::RunConfig& rc, const std::string& ckpt_path,
               const std::string& gt_path, const std::vector<int>& lengths,
               const std::string& out_path, int threads) {
    if (lengths.empty()) throw vamos::config_error("sweep: empty length list");
    const vamos::LoadedCheckpoint ck = vamos::load_checkpoint(ckpt_path);
    const vamos::Volume gt = vamos::load_volume(gt_path);
    const std::vector<vamos::SweepRow> rows = vamos::severity_sweep(ck.model, gt, lengths, threads);
    ensure_parent_dir(out_path);
    vamos::write_text_file(out_path, vamos::sweep_csv(rows));
    write_sidecar_config(rc, out_path, /*is_dir=*/false);
    for (const vamos::SweepRow& r : rows)
        std::cout << "L=" << r.block_length << " corrupted_mie=" << r.corrupted_mie
                  << " restored_mie=" << r.restored_mie << "\n";
    std::cout << "sweep -> " << out_path << "\n";
}

int cmd_losscheck(const vamos::RunConfig& rc, const std::string& op, int trials, double step,
                  double threshold) {
    std::vector<std::string> ops;
    if (op == "all")
        ops = vamos::grad_check_op_ids();
    else
        ops.push_back(op);

    bool all_pass = true;
    for (const std::string& id : ops) {
        const vamos::GradCheckReport rep =
            vamos::grad_check(id, trials, rc.seed, step, threshold);
        std::printf("losscheck op=%-20s trials=%d checked=%ld excluded=%ld max_rel_err=%.3e %s\n",
                    rep.op.c_str(), rep.trials, rep.checked, rep.excluded, rep.max_rel_err,
                    rep.pass() ? "[PASS]" : "[FAIL]");
        for (const vamos::GradCheckFailure& f : rep.failures)
            std::printf("  trial %d pixel (%d,%d): analytic=%.9e fd=%.9e rel_err=%.3e\n", f.trial,
                        f.y, f.x, f.analytic, f.fd, f.rel_err);
        all_pass = all_pass && rep.pass();
    }
    return all_pass ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"OCTA motion-artifact inpainting toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    auto* opt_seed = app.add_option("--seed", g.seed, "base seed; section seeds derive from it");
    auto* opt_det = app.add_flag("--deterministic,!--no-deterministic", g.deterministic,
                                 "force reproducible execution (default on)");
    app.add_option("--config", g.config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);

    const auto resolve = [&]() {
        g.seed_given = opt_seed->count() > 0;
        g.deterministic_given = opt_det->count() > 0;
        return resolve_config(g);
    };

    std::optional<int> exit_code;

    // phantom
    auto* sc_phantom = app.add_subcommand("phantom", "generate a synthetic vessel dataset");
    std::string ph_out;
    int ph_count = -1;
    sc_phantom->add_option("--out", ph_out, "output directory")->required();
    sc_phantom->add_option("--count", ph_count, "number of volumes (default from config: 7)");
    sc_phantom->callback([&] {
        const vamos::RunConfig rc = resolve();
        cmd_phantom(rc, ph_out, ph_count > 0 ? ph_count : rc.phantom_count);
    });

    // split
    auto* sc_split = app.add_subcommand("split", "rotate a train/val/test fold assignment");
    std::string sp_manifest, sp_out;
    int sp_fold = 0;
    sc_split->add_option("--manifest", sp_manifest, "dataset manifest.json")
        ->required()
        ->check(CLI::ExistingFile);
    sc_split->add_option("--fold", sp_fold, "fold index")->required();
    sc_split->add_option("--out", sp_out, "output split JSON")->required();
    sc_split->callback(
        [&] { cmd_split(resolve(), sp_manifest, sp_fold, sp_out); });

    // corrupt
    auto* sc_corrupt = app.add_subcommand("corrupt", "apply fixed corruption masks to a volume");
    std::string co_in, co_out;
    int co_events = -1;
    double co_p = -1.0;
    int co_max_block = -1;
    sc_corrupt->add_option("--in", co_in, "input .octav volume")->required()->check(CLI::ExistingFile);
    sc_corrupt->add_option("--out", co_out, "output corrupted volume")->required();
    sc_corrupt->add_option("--events", co_events, "number of disjoint corruption blocks");
    sc_corrupt->add_option("--p", co_p, "geometric parameter override");
    sc_corrupt->add_option("--max-block", co_max_block, "truncation bound override");
    sc_corrupt->callback([&] {
        vamos::RunConfig rc = resolve();
        if (co_p > 0.0) rc.corruption.p = co_p;
        if (co_max_block > 0) rc.corruption.max_block = co_max_block;
        cmd_corrupt(rc, co_in, co_out, co_events > 0 ? co_events : rc.eval.n_events);
    });

    // train
    auto* sc_train = app.add_subcommand("train", "train the restoration network");
    std::string tr_manifest, tr_split, tr_subset = "all", tr_out, tr_log;
    int tr_epochs = -1, tr_batch = -1, tr_overfit = -2;
    long tr_steps = -1;
    double tr_lr = -1.0;
    sc_train->add_option("--data", tr_manifest, "dataset manifest.json")
        ->required()
        ->check(CLI::ExistingFile);
    sc_train->add_option("--split", tr_split, "split JSON from the split subcommand")
        ->check(CLI::ExistingFile);
    sc_train->add_option("--subset", tr_subset, "train|val|test|all (default all, or train when --split given)");
    sc_train->add_option("--out", tr_out, "output checkpoint path")->required();
    sc_train->add_option("--log", tr_log, "train log path (default <out>.log.jsonl)");
    sc_train->add_option("--epochs", tr_epochs, "epoch override");
    sc_train->add_option("--batch-size", tr_batch, "batch size override");
    sc_train->add_option("--steps", tr_steps, "max optimizer steps (0 = unlimited)");
    sc_train->add_option("--lr", tr_lr, "learning rate override");
    sc_train->add_option("--overfit-target", tr_overfit, "pin training to one stack of volume 0");
    sc_train->callback([&] {
        vamos::RunConfig rc = resolve();
        if (tr_epochs > 0) rc.train.epochs = tr_epochs;
        if (tr_batch > 0) rc.train.batch_size = tr_batch;
        if (tr_steps >= 0) rc.train.max_steps = tr_steps;
        if (tr_lr > 0) rc.train.learning_rate = tr_lr;
        if (tr_overfit >= -1) rc.train.overfit_target = tr_overfit;
        std::string subset = tr_subset;
        if (!tr_split.empty() && sc_train->count("--subset") == 0) subset = "train";
        cmd_train(rc, tr_manifest, tr_split, subset, tr_out, tr_log);
    });

    // infer
    auto* sc_infer = app.add_subcommand("infer", "restore the invalid slices of a volume");
    std::string in_ckpt, in_vol, in_mask, in_out;
    int in_threads = 1;
    sc_infer->add_option("--checkpoint", in_ckpt, "trained checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    sc_infer->add_option("--in", in_vol, "corrupted volume")->required()->check(CLI::ExistingFile);
    sc_infer->add_option("--mask", in_mask, "mask JSON (default <in>.mask.json)");
    sc_infer->add_option("--out", in_out, "output restored volume")->required();
    sc_infer->add_option("--threads", in_threads, "worker threads for per-slice inference");
    sc_infer->callback([&] {
        cmd_infer(resolve(), in_ckpt, in_vol, in_mask, in_out, in_threads);
    });

    // project
    auto* sc_project = app.add_subcommand("project", "export the en face MIP as PGM");
    std::string pr_in, pr_out;
    sc_project->add_option("--in", pr_in, "input volume")->required()->check(CLI::ExistingFile);
    sc_project->add_option("--out", pr_out, "output PGM path")->required();
    sc_project->callback([&] { cmd_project(resolve(), pr_in, pr_out); });

    // eval
    auto* sc_eval = app.add_subcommand("eval", "compute the evaluation report for a restoration");
    std::string ev_restored, ev_gt, ev_mask, ev_out, ev_id;
    sc_eval->add_option("--restored", ev_restored, "restored volume")
        ->required()
        ->check(CLI::ExistingFile);
    sc_eval->add_option("--gt", ev_gt, "ground-truth volume")->required()->check(CLI::ExistingFile);
    sc_eval->add_option("--mask", ev_mask, "mask JSON used for corruption")
        ->required()
        ->check(CLI::ExistingFile);
    sc_eval->add_option("--out", ev_out, "output report JSON")->required();
    sc_eval->add_option("--volume-id", ev_id, "identifier recorded in the report");
    sc_eval->callback(
        [&] { cmd_eval(resolve(), ev_restored, ev_gt, ev_mask, ev_out, ev_id); });

    // sweep
    auto* sc_sweep = app.add_subcommand("sweep", "corruption-severity sweep (MIE vs block length)");
    std::string sw_ckpt, sw_gt, sw_out;
    std::vector<int> sw_lengths = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int sw_threads = 1;
    sc_sweep->add_option("--checkpoint", sw_ckpt, "trained checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    sc_sweep->add_option("--gt", sw_gt, "ground-truth volume")->required()->check(CLI::ExistingFile);
    sc_sweep->add_option("--lengths", sw_lengths, "block lengths (default 1..10)")
        ->delimiter(',');
    sc_sweep->add_option("--out", sw_out, "output CSV path")->required();
    sc_sweep->add_option("--threads", sw_threads, "worker threads for inference");
    sc_sweep->callback([&] {
        cmd_sweep(resolve(), sw_ckpt, sw_gt, sw_lengths, sw_out, sw_threads);
    });

    // losscheck
    auto* sc_loss = app.add_subcommand("losscheck", "finite-difference gradient verification");
    std::string lc_op = "all";
    int lc_trials = 100;
    double lc_step = 1e-4, lc_threshold = 1e-4;
    sc_loss->add_option("--op", lc_op, "op id or 'all'");
    sc_loss->add_option("--trials", lc_trials, "random trials per op");
    sc_loss->add_option("--step", lc_step, "finite-difference step");
    sc_loss->add_option("--threshold", lc_threshold, "relative-error pass threshold");
    sc_loss->callback([&] {
        exit_code = cmd_losscheck(resolve(), lc_op, lc_trials, lc_step, lc_threshold);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help/error text
        return code == 0 ? 0 : 2;
    } catch (const vamos::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const vamos::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return exit_code.value_or(0);
}
