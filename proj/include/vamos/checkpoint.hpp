#pragma once

#include <cmath>
#include <string>

#include "vamos/config.hpp"
#include "vamos/net.hpp"
#include "vamos/volume.hpp"

// Self-describing checkpoint file:
//   8-byte magic "VAMOSCK1"
//   u32 little-endian JSON length
//   JSON {"model", "train", "loss", "epoch", "step"}
//   raw little-endian f32 parameter blob, declaration order
// Round-trips bit-exactly: parameters via raw f32 bits, configs via JSON with
// shortest-round-trip number formatting.

namespace vamos {

namespace detail {
inline constexpr char checkpoint_magic[8] = {'V', 'A', 'M', 'O', 'S', 'C', 'K', '1'};
}

struct LoadedCheckpoint {
    Model model;
    TrainConfig train;
    LossConfig loss;
    int epoch = 0;
    long step = 0;
};

inline void save_checkpoint(const std::string& path, const Model& m, const TrainConfig& tc,
                            const LossConfig& lc, int epoch, long step) {
    ordered_json j;
    j["model"] = to_json(m.cfg);
    j["train"] = to_json(tc);
    j["loss"] = to_json(lc);
    j["epoch"] = epoch;
    j["step"] = step;
    const std::string hj = j.dump();

    std::string out;
    out.reserve(8 + 4 + hj.size() + m.parameter_count() * 4);
    out.append(detail::checkpoint_magic, 8);
    detail::append_u32_le(out, static_cast<std::uint32_t>(hj.size()));
    out += hj;
    for (const Conv& c : m.convs) {
        for (float f : c.w) detail::append_f32_le(out, f);
        for (float f : c.b) detail::append_f32_le(out, f);
    }
    detail::write_file_bytes(path, out);
}

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    const std::string bytes = detail::read_file_bytes(path);
    if (bytes.size() < 12 || std::memcmp(bytes.data(), detail::checkpoint_magic, 8) != 0)
        throw data_error("load_checkpoint: '" + path + "' is not a checkpoint file");
    const std::uint32_t jlen =
        detail::read_u32_le(reinterpret_cast<const unsigned char*>(bytes.data()) + 8);
    if (bytes.size() < 12 + static_cast<std::size_t>(jlen))
        throw data_error("load_checkpoint: truncated header in '" + path + "'");

    const ordered_json j = parse_json_text(bytes.substr(12, jlen), "checkpoint header");
    LoadedCheckpoint ck;
    if (!j.contains("model") || !j.contains("train") || !j.contains("loss"))
        throw data_error("load_checkpoint: header missing a config section");
    const ModelConfig mc = model_from_json(j.at("model"));
    ck.train = train_from_json(j.at("train"));
    ck.loss = loss_from_json(j.at("loss"));
    if (j.contains("epoch")) ck.epoch = j.at("epoch").get<int>();
    if (j.contains("step")) ck.step = j.at("step").get<long>();

    ck.model = build_model(mc);
    const std::size_t n_params = ck.model.parameter_count();
    const std::size_t payload_off = 12 + jlen;
    if (bytes.size() - payload_off != n_params * 4)
        throw data_error("load_checkpoint: parameter blob size mismatch in '" + path + "'");

    std::vector<float> flat(n_params);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data()) + payload_off;
    for (std::size_t i = 0; i < n_params; ++i) {
        flat[i] = detail::bits_f32(detail::read_u32_le(p + i * 4));
        if (!std::isfinite(flat[i]))
            throw data_error("load_checkpoint: non-finite parameter in '" + path + "'");
    }
    load_parameters(ck.model, flat);
    return ck;
}

} // namespace vamos
