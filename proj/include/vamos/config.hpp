#pragma once

#include <string>

#include <json.hpp>

#include "vamos/common.hpp"
#include "vamos/corruption.hpp"
#include "vamos/loss.hpp"
#include "vamos/net.hpp"
#include "vamos/phantom.hpp"
#include "vamos/rng.hpp"
#include "vamos/train.hpp"
#include "vamos/volume.hpp"

// JSON (de)serialization for every config struct and the merged run config
// consumed by the command-line tool. Parsing is strict: unknown keys are
// config errors, so typos fail loudly instead of silently using defaults.

namespace vamos {

using ordered_json = nlohmann::ordered_json;

struct EvalConfig {
    int n_events = 2; // disjoint corruption blocks per fixed evaluation mask

    void validate() const {
        if (n_events < 1) throw config_error("EvalConfig: n_events must be >= 1");
    }
};

namespace detail {

inline void require_known_keys(const ordered_json& j, std::initializer_list<const char*> known,
                               const std::string& section) {
    if (!j.is_object()) throw config_error("config section '" + section + "' must be an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw config_error("unknown key '" + item.key() + "' in config section '" + section
                               + "'");
    }
}

template <class T>
void read_key(const ordered_json& j, const char* key, T& out, const std::string& section) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error("bad value for '" + std::string(key) + "' in section '" + section
                           + "': " + e.what());
    }
}

} // namespace detail

// ---- per-section serializers ------------------------------------------------

inline ordered_json to_json(const PhantomConfig& c) {
    ordered_json j;
    j["n_slices"] = c.n_slices;
    j["height"] = c.height;
    j["width"] = c.width;
    j["vessels"] = c.vessels;
    j["radius_min"] = c.radius_min;
    j["radius_max"] = c.radius_max;
    j["background_level"] = c.background_level;
    j["peak_min"] = c.peak_min;
    j["peak_max"] = c.peak_max;
    return j;
}

inline PhantomConfig phantom_from_json(const ordered_json& j, PhantomConfig c = {}) {
    detail::require_known_keys(j,
                               {"n_slices", "height", "width", "vessels", "radius_min",
                                "radius_max", "background_level", "peak_min", "peak_max", "count"},
                               "phantom");
    detail::read_key(j, "n_slices", c.n_slices, "phantom");
    detail::read_key(j, "height", c.height, "phantom");
    detail::read_key(j, "width", c.width, "phantom");
    detail::read_key(j, "vessels", c.vessels, "phantom");
    detail::read_key(j, "radius_min", c.radius_min, "phantom");
    detail::read_key(j, "radius_max", c.radius_max, "phantom");
    detail::read_key(j, "background_level", c.background_level, "phantom");
    detail::read_key(j, "peak_min", c.peak_min, "phantom");
    detail::read_key(j, "peak_max", c.peak_max, "phantom");
    return c;
}

inline const char* to_string(CorruptionMode m) {
    return m == CorruptionMode::dynamic ? "dynamic" : "fixed";
}

inline const char* to_string(TruncationPolicy t) {
    return t == TruncationPolicy::renormalize ? "renormalize" : "clamp";
}

inline CorruptionMode corruption_mode_from_string(const std::string& s) {
    if (s == "dynamic") return CorruptionMode::dynamic;
    if (s == "fixed") return CorruptionMode::fixed;
    throw config_error("corruption mode must be 'dynamic' or 'fixed', got '" + s + "'");
}

inline TruncationPolicy truncation_from_string(const std::string& s) {
    if (s == "renormalize") return TruncationPolicy::renormalize;
    if (s == "clamp") return TruncationPolicy::clamp;
    throw config_error("truncation must be 'renormalize' or 'clamp', got '" + s + "'");
}

inline ordered_json to_json(const CorruptionConfig& c) {
    ordered_json j;
    j["p"] = c.p;
    j["max_block"] = c.max_block;
    j["mode"] = to_string(c.mode);
    j["truncation"] = to_string(c.truncation);
    j["seed"] = c.seed;
    return j;
}

inline CorruptionConfig corruption_from_json(const ordered_json& j, CorruptionConfig c = {}) {
    detail::require_known_keys(j, {"p", "max_block", "mode", "truncation", "seed"}, "corruption");
    detail::read_key(j, "p", c.p, "corruption");
    detail::read_key(j, "max_block", c.max_block, "corruption");
    if (j.contains("mode")) c.mode = corruption_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("truncation"))
        c.truncation = truncation_from_string(j.at("truncation").get<std::string>());
    detail::read_key(j, "seed", c.seed, "corruption");
    return c;
}

inline ordered_json to_json(const ModelConfig& c) {
    ordered_json j;
    j["s_in"] = c.s_in;
    j["depth"] = c.depth;
    j["base_channels"] = c.base_channels;
    j["seed"] = c.seed;
    return j;
}

inline ModelConfig model_from_json(const ordered_json& j, ModelConfig c = {}) {
    detail::require_known_keys(j, {"s_in", "depth", "base_channels", "seed"}, "model");
    detail::read_key(j, "s_in", c.s_in, "model");
    detail::read_key(j, "depth", c.depth, "model");
    detail::read_key(j, "base_channels", c.base_channels, "model");
    detail::read_key(j, "seed", c.seed, "model");
    return c;
}

inline ordered_json to_json(const LossConfig& c) {
    ordered_json j;
    j["alpha_w"] = c.alpha_w;
    j["gamma_w"] = c.gamma_w;
    j["c"] = c.c;
    j["lambda_proj"] = c.lambda_proj;
    j["detach_pred_weight"] = c.detach_pred_weight;
    j["epsilon_pow"] = c.epsilon_pow;
    j["use_axial_proj"] = c.use_axial_proj;
    j["use_lateral_proj"] = c.use_lateral_proj;
    return j;
}

inline LossConfig loss_from_json(const ordered_json& j, LossConfig c = {}) {
    detail::require_known_keys(j,
                               {"alpha_w", "gamma_w", "c", "lambda_proj", "detach_pred_weight",
                                "epsilon_pow", "use_axial_proj", "use_lateral_proj"},
                               "loss");
    detail::read_key(j, "alpha_w", c.alpha_w, "loss");
    detail::read_key(j, "gamma_w", c.gamma_w, "loss");
    detail::read_key(j, "c", c.c, "loss");
    detail::read_key(j, "lambda_proj", c.lambda_proj, "loss");
    detail::read_key(j, "detach_pred_weight", c.detach_pred_weight, "loss");
    detail::read_key(j, "epsilon_pow", c.epsilon_pow, "loss");
    detail::read_key(j, "use_axial_proj", c.use_axial_proj, "loss");
    detail::read_key(j, "use_lateral_proj", c.use_lateral_proj, "loss");
    return c;
}

// include_corruption=false is used for the merged run config, where corruption
// lives in its own sibling section.
inline ordered_json to_json(const TrainConfig& c, bool include_corruption = true) {
    ordered_json j;
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["learning_rate"] = c.learning_rate;
    if (include_corruption) j["corruption"] = to_json(c.corruption);
    j["seed"] = c.seed;
    j["checkpoint_every"] = c.checkpoint_every;
    j["max_steps"] = c.max_steps;
    j["overfit_target"] = c.overfit_target;
    j["deterministic"] = c.deterministic;
    j["threads"] = c.threads;
    return j;
}

inline TrainConfig train_from_json(const ordered_json& j, TrainConfig c = {}) {
    detail::require_known_keys(j,
                               {"epochs", "batch_size", "learning_rate", "corruption", "seed",
                                "checkpoint_every", "max_steps", "overfit_target", "deterministic",
                                "threads"},
                               "train");
    detail::read_key(j, "epochs", c.epochs, "train");
    detail::read_key(j, "batch_size", c.batch_size, "train");
    detail::read_key(j, "learning_rate", c.learning_rate, "train");
    if (j.contains("corruption")) c.corruption = corruption_from_json(j.at("corruption"));
    detail::read_key(j, "seed", c.seed, "train");
    detail::read_key(j, "checkpoint_every", c.checkpoint_every, "train");
    detail::read_key(j, "max_steps", c.max_steps, "train");
    detail::read_key(j, "overfit_target", c.overfit_target, "train");
    detail::read_key(j, "deterministic", c.deterministic, "train");
    detail::read_key(j, "threads", c.threads, "train");
    return c;
}

inline ordered_json to_json(const EvalConfig& c) {
    ordered_json j;
    j["n_events"] = c.n_events;
    return j;
}

inline EvalConfig eval_from_json(const ordered_json& j, EvalConfig c = {}) {
    detail::require_known_keys(j, {"n_events"}, "eval");
    detail::read_key(j, "n_events", c.n_events, "eval");
    return c;
}

// ---- merged run config ------------------------------------------------------

// Single configuration surface for the CLI. `seed` is the base seed: section
// seeds left at 0 are derived from it (stable per-section tags), so one seed
// flag reproduces a whole pipeline while explicit section seeds still win.
struct RunConfig {
    std::uint64_t seed = 0;
    bool deterministic = true;
    int phantom_count = 7;
    PhantomConfig phantom;
    CorruptionConfig corruption;
    ModelConfig model;
    TrainConfig train;
    LossConfig loss;
    EvalConfig eval;
};

inline void resolve_seeds(RunConfig& rc) {
    if (rc.corruption.seed == 0) rc.corruption.seed = mix_seed(rc.seed, 0x636f7272ull);
    if (rc.model.seed == 0) rc.model.seed = mix_seed(rc.seed, 0x6d6f646cull);
    if (rc.train.seed == 0) rc.train.seed = mix_seed(rc.seed, 0x74726169ull);
    rc.train.corruption = rc.corruption;
}

inline ordered_json to_json(const RunConfig& rc) {
    ordered_json j;
    j["seed"] = rc.seed;
    j["deterministic"] = rc.deterministic;
    ordered_json ph = to_json(rc.phantom);
    ph["count"] = rc.phantom_count;
    j["phantom"] = ph;
    j["corruption"] = to_json(rc.corruption);
    j["model"] = to_json(rc.model);
    j["train"] = to_json(rc.train, /*include_corruption=*/false);
    j["loss"] = to_json(rc.loss);
    j["eval"] = to_json(rc.eval);
    return j;
}

inline RunConfig run_config_from_json(const ordered_json& j, RunConfig rc = {}) {
    detail::require_known_keys(
        j, {"seed", "deterministic", "phantom", "corruption", "model", "train", "loss", "eval"},
        "(top level)");
    detail::read_key(j, "seed", rc.seed, "(top level)");
    detail::read_key(j, "deterministic", rc.deterministic, "(top level)");
    if (j.contains("phantom")) {
        rc.phantom = phantom_from_json(j.at("phantom"), rc.phantom);
        detail::read_key(j.at("phantom"), "count", rc.phantom_count, "phantom");
    }
    if (j.contains("corruption")) rc.corruption = corruption_from_json(j.at("corruption"), rc.corruption);
    if (j.contains("model")) rc.model = model_from_json(j.at("model"), rc.model);
    if (j.contains("train")) rc.train = train_from_json(j.at("train"), rc.train);
    if (j.contains("loss")) rc.loss = loss_from_json(j.at("loss"), rc.loss);
    if (j.contains("eval")) rc.eval = eval_from_json(j.at("eval"), rc.eval);
    rc.train.corruption = rc.corruption;
    return rc;
}

inline ordered_json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error("failed to parse " + what + ": " + e.what());
    }
}

inline RunConfig load_run_config(const std::string& path, RunConfig base = {}) {
    std::string text;
    try {
        text = detail::read_file_bytes(path);
    } catch (const io_error& e) {
        throw config_error(e.what()); // unreadable config is a configuration problem
    }
    return run_config_from_json(parse_json_text(text, "config file " + path), base);
}

} // namespace vamos
