#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "vamos/common.hpp"
#include "vamos/image.hpp"
#include "vamos/rng.hpp"
#include "vamos/volume.hpp"

// 2.5D encoder-decoder: the S slices of a stack enter as input channels and
// the center B-scan comes out of a single sigmoid-squashed channel.
//
// Layout for depth D, base channels F = base_channels:
//   encoder level i (0..D-1): two 3x3 convs at F<<i channels, then 2x2 maxpool
//   bottleneck: two 3x3 convs at F<<D
//   decoder level i (D-1..0): nearest 2x upsample, 3x3 conv to F<<i, concat
//     with the level-i encoder skip, then two 3x3 convs at F<<i
//   head: 1x1 conv to one channel, logistic squashing
// All activations are leaky ReLU (slope 0.1) except the sigmoid head.
//
// Inputs whose H or W are not multiples of 2^D are reflect-padded (bottom/
// right) up to the next multiple and cropped back after the head, so output
// spatial dims always equal input dims. Forward/backward are hand-written
// with fixed loop order, so every run of the same binary is bit-identical.

namespace vamos {

struct ModelConfig {
    int s_in = 9;
    int depth = 3;
    int base_channels = 16;
    std::uint64_t seed = 0;

    void validate() const {
        if (s_in < 1 || s_in % 2 == 0) throw config_error("ModelConfig: s_in must be odd");
        if (depth < 1) throw config_error("ModelConfig: depth must be >= 1");
        if (base_channels < 1) throw config_error("ModelConfig: base_channels must be >= 1");
    }
};

struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<float> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_) { resize(c_, h_, w_); }

    void resize(int c_, int h_, int w_) {
        c = c_;
        h = h_;
        w = w_;
        v.assign(static_cast<std::size_t>(c) * h * w, 0.0f);
    }

    std::size_t plane_size() const { return static_cast<std::size_t>(h) * w; }
    float* plane(int ci) { return v.data() + plane_size() * ci; }
    const float* plane(int ci) const { return v.data() + plane_size() * ci; }
    float& at(int ci, int y, int x) { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
    float at(int ci, int y, int x) const {
        return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
    }
};

struct Conv {
    int cin = 0, cout = 0, k = 3; // zero padding k/2, stride 1
    std::vector<float> w;         // [cout][cin][k][k]
    std::vector<float> b;         // [cout]

    std::size_t weight_count() const { return w.size() + b.size(); }
};

constexpr float kLeakySlope = 0.1f;

// ---- primitive ops --------------------------------------------------------

inline void conv_forward(const Conv& c, const Tensor& in, Tensor& out) {
    const int hh = in.h, ww = in.w, k = c.k, pad = k / 2;
    out.resize(c.cout, hh, ww);
    for (int co = 0; co < c.cout; ++co) {
        float* __restrict op = out.plane(co);
        std::fill_n(op, out.plane_size(), c.b[static_cast<std::size_t>(co)]);
        for (int ci = 0; ci < c.cin; ++ci) {
            const float* __restrict ip = in.plane(ci);
            const float* wp =
                c.w.data() + (static_cast<std::size_t>(co) * c.cin + ci) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - pad;
                const int y0 = std::max(0, -dy), y1 = std::min(hh, hh - dy);
                for (int kx = 0; kx < k; ++kx) {
                    const float wgt = wp[ky * k + kx];
                    const int dx = kx - pad;
                    const int x0 = std::max(0, -dx), x1 = std::min(ww, ww - dx);
                    for (int y = y0; y < y1; ++y) {
                        const float* __restrict src =
                            ip + static_cast<std::size_t>(y + dy) * ww + dx;
                        float* __restrict dst = op + static_cast<std::size_t>(y) * ww;
                        for (int x = x0; x < x1; ++x) dst[x] += wgt * src[x];
                    }
                }
            }
        }
    }
}

// Accumulates weight/bias gradients; optionally produces the input gradient.
// The weight-gradient reduction uses four fixed partial sums per row so the
// loop vectorizes without reassociation flags; the summation order is part of
// the deterministic contract.
inline void conv_backward(const Conv& c, const Tensor& in, const Tensor& dout, Tensor* din,
                          std::vector<float>& gw, std::vector<float>& gb) {
    const int hh = in.h, ww = in.w, k = c.k, pad = k / 2;
    if (din) din->resize(c.cin, hh, ww);
    for (int co = 0; co < c.cout; ++co) {
        const float* __restrict dp = dout.plane(co);
        double bsum = 0.0;
        for (std::size_t i = 0; i < dout.plane_size(); ++i) bsum += dp[i];
        gb[static_cast<std::size_t>(co)] += static_cast<float>(bsum);

        for (int ci = 0; ci < c.cin; ++ci) {
            const float* __restrict ip = in.plane(ci);
            float* __restrict dip = din ? din->plane(ci) : nullptr;
            const std::size_t wbase = (static_cast<std::size_t>(co) * c.cin + ci) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - pad;
                const int y0 = std::max(0, -dy), y1 = std::min(hh, hh - dy);
                for (int kx = 0; kx < k; ++kx) {
                    const int dx = kx - pad;
                    const int x0 = std::max(0, -dx), x1 = std::min(ww, ww - dx);
                    const float wgt = c.w[wbase + static_cast<std::size_t>(ky) * k + kx];
                    float acc0 = 0.0f, acc1 = 0.0f, acc2 = 0.0f, acc3 = 0.0f;
                    for (int y = y0; y < y1; ++y) {
                        const float* __restrict src =
                            ip + static_cast<std::size_t>(y + dy) * ww + dx;
                        const float* __restrict d = dp + static_cast<std::size_t>(y) * ww;
                        if (dip) {
                            float* __restrict dst =
                                dip + static_cast<std::size_t>(y + dy) * ww + dx;
                            for (int x = x0; x < x1; ++x) dst[x] += wgt * d[x];
                        }
                        int x = x0;
                        for (; x + 4 <= x1; x += 4) {
                            acc0 += d[x] * src[x];
                            acc1 += d[x + 1] * src[x + 1];
                            acc2 += d[x + 2] * src[x + 2];
                            acc3 += d[x + 3] * src[x + 3];
                        }
                        for (; x < x1; ++x) acc0 += d[x] * src[x];
                    }
                    gw[wbase + static_cast<std::size_t>(ky) * k + kx] +=
                        (acc0 + acc1) + (acc2 + acc3);
                }
            }
        }
    }
}

inline void leaky_relu_forward(const Tensor& pre, Tensor& post) {
    post.resize(pre.c, pre.h, pre.w);
    for (std::size_t i = 0; i < pre.v.size(); ++i) {
        const float x = pre.v[i];
        post.v[i] = x > 0.0f ? x : kLeakySlope * x;
    }
}

inline void leaky_relu_backward(const Tensor& pre, Tensor& d) {
    for (std::size_t i = 0; i < d.v.size(); ++i)
        if (pre.v[i] <= 0.0f) d.v[i] *= kLeakySlope;
}

// 2x2 max pooling, stride 2; records the 0..3 offset of the first maximum in
// scan order so backward routing is deterministic.
inline void maxpool2_forward(const Tensor& in, Tensor& out, std::vector<std::uint8_t>& arg) {
    const int oh = in.h / 2, ow = in.w / 2;
    out.resize(in.c, oh, ow);
    arg.assign(out.v.size(), 0);
    for (int ci = 0; ci < in.c; ++ci) {
        const float* ip = in.plane(ci);
        float* op = out.plane(ci);
        std::uint8_t* ap = arg.data() + out.plane_size() * ci;
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                const std::size_t base = static_cast<std::size_t>(2 * y) * in.w + 2 * x;
                float best = ip[base];
                std::uint8_t bi = 0;
                const float cand1 = ip[base + 1];
                if (cand1 > best) { best = cand1; bi = 1; }
                const float cand2 = ip[base + in.w];
                if (cand2 > best) { best = cand2; bi = 2; }
                const float cand3 = ip[base + in.w + 1];
                if (cand3 > best) { best = cand3; bi = 3; }
                op[static_cast<std::size_t>(y) * ow + x] = best;
                ap[static_cast<std::size_t>(y) * ow + x] = bi;
            }
        }
    }
}

inline void maxpool2_backward(const Tensor& dout, const std::vector<std::uint8_t>& arg, int in_h,
                              int in_w, Tensor& din) {
    din.resize(dout.c, in_h, in_w);
    for (int ci = 0; ci < dout.c; ++ci) {
        const float* dp = dout.plane(ci);
        const std::uint8_t* ap = arg.data() + dout.plane_size() * ci;
        float* ip = din.plane(ci);
        for (int y = 0; y < dout.h; ++y) {
            for (int x = 0; x < dout.w; ++x) {
                const std::size_t oi = static_cast<std::size_t>(y) * dout.w + x;
                const std::uint8_t a = ap[oi];
                const std::size_t base =
                    static_cast<std::size_t>(2 * y + (a >> 1)) * in_w + 2 * x + (a & 1);
                ip[base] += dp[oi];
            }
        }
    }
}

inline void upsample2_forward(const Tensor& in, Tensor& out) {
    out.resize(in.c, in.h * 2, in.w * 2);
    for (int ci = 0; ci < in.c; ++ci) {
        const float* ip = in.plane(ci);
        float* op = out.plane(ci);
        for (int y = 0; y < in.h; ++y) {
            const float* src = ip + static_cast<std::size_t>(y) * in.w;
            float* d0 = op + static_cast<std::size_t>(2 * y) * out.w;
            float* d1 = d0 + out.w;
            for (int x = 0; x < in.w; ++x) {
                const float v = src[x];
                d0[2 * x] = v;
                d0[2 * x + 1] = v;
                d1[2 * x] = v;
                d1[2 * x + 1] = v;
            }
        }
    }
}

inline void upsample2_backward(const Tensor& dout, Tensor& din) {
    din.resize(dout.c, dout.h / 2, dout.w / 2);
    for (int ci = 0; ci < dout.c; ++ci) {
        const float* dp = dout.plane(ci);
        float* ip = din.plane(ci);
        for (int y = 0; y < din.h; ++y) {
            const float* s0 = dp + static_cast<std::size_t>(2 * y) * dout.w;
            const float* s1 = s0 + dout.w;
            float* dst = ip + static_cast<std::size_t>(y) * din.w;
            for (int x = 0; x < din.w; ++x)
                dst[x] = s0[2 * x] + s0[2 * x + 1] + s1[2 * x] + s1[2 * x + 1];
        }
    }
}

inline void concat_forward(const Tensor& a, const Tensor& b, Tensor& out) {
    out.resize(a.c + b.c, a.h, a.w);
    std::memcpy(out.v.data(), a.v.data(), a.v.size() * sizeof(float));
    std::memcpy(out.v.data() + a.v.size(), b.v.data(), b.v.size() * sizeof(float));
}

inline void concat_backward(const Tensor& dout, int c_first, Tensor& da, Tensor& db) {
    da.resize(c_first, dout.h, dout.w);
    db.resize(dout.c - c_first, dout.h, dout.w);
    std::memcpy(da.v.data(), dout.v.data(), da.v.size() * sizeof(float));
    std::memcpy(db.v.data(), dout.v.data() + da.v.size(), db.v.size() * sizeof(float));
}

// ---- model ----------------------------------------------------------------

struct Model {
    ModelConfig cfg;
    std::vector<Conv> convs; // declaration order == checkpoint blob order

    // conv index helpers
    int enc_conv(int level, int j) const { return 2 * level + j; }
    int bott_conv(int j) const { return 2 * cfg.depth + j; }
    int dec_base(int level) const { return 2 * cfg.depth + 2 + 3 * (cfg.depth - 1 - level); }
    int dec_up(int level) const { return dec_base(level); }
    int dec_conv(int level, int j) const { return dec_base(level) + 1 + j; }
    int head_conv() const { return static_cast<int>(convs.size()) - 1; }

    int level_channels(int level) const { return cfg.base_channels << level; }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const Conv& c : convs) n += c.weight_count();
        return n;
    }
};

inline Model build_model(const ModelConfig& cfg) {
    cfg.validate();
    Model m;
    m.cfg = cfg;

    const auto add_conv = [&m](int cin, int cout, int k) {
        Conv c;
        c.cin = cin;
        c.cout = cout;
        c.k = k;
        c.w.assign(static_cast<std::size_t>(cout) * cin * k * k, 0.0f);
        c.b.assign(static_cast<std::size_t>(cout), 0.0f);
        m.convs.push_back(std::move(c));
    };

    const int d = cfg.depth;
    for (int i = 0; i < d; ++i) {
        const int cin = i == 0 ? cfg.s_in : m.level_channels(i - 1);
        add_conv(cin, m.level_channels(i), 3);
        add_conv(m.level_channels(i), m.level_channels(i), 3);
    }
    add_conv(m.level_channels(d - 1), m.level_channels(d), 3);
    add_conv(m.level_channels(d), m.level_channels(d), 3);
    for (int i = d - 1; i >= 0; --i) {
        const int cin_up = i == d - 1 ? m.level_channels(d) : m.level_channels(i + 1);
        add_conv(cin_up, m.level_channels(i), 3);               // post-upsample conv
        add_conv(2 * m.level_channels(i), m.level_channels(i), 3);
        add_conv(m.level_channels(i), m.level_channels(i), 3);
    }
    add_conv(m.level_channels(0), 1, 1);

    // He-uniform init, biases zero, deterministic in the seed.
    Rng rng(mix_seed(cfg.seed, 0x696e6974ull));
    for (Conv& c : m.convs) {
        const double fan_in = static_cast<double>(c.cin) * c.k * c.k;
        const double bound = std::sqrt(6.0 / fan_in);
        for (float& w : c.w) w = static_cast<float>(rng.uniform(-bound, bound));
    }
    return m;
}

struct FwdCache {
    int in_h = 0, in_w = 0;   // original dims
    int pad_h = 0, pad_w = 0; // padded dims
    Tensor input_padded;
    std::vector<Tensor> conv_in;   // operand of each conv
    std::vector<Tensor> conv_pre;  // pre-activation output of each conv
    std::vector<Tensor> conv_post; // post-activation (lrelu) output
    std::vector<std::vector<std::uint8_t>> pool_arg;
    std::vector<std::array<int, 2>> pool_in_dims;
    Tensor sigmoid_out; // 1 x pad_h x pad_w
};

namespace detail {

// Reflect (mirror-without-edge) index for bottom/right padding.
inline int reflect_index(int i, int n) {
    if (i < n) return i;
    const int r = 2 * n - 2 - i;
    return r < 0 ? 0 : r;
}

inline void pad_input(const Tensor& in, int ph, int pw, Tensor& out) {
    out.resize(in.c, ph, pw);
    for (int ci = 0; ci < in.c; ++ci) {
        const float* ip = in.plane(ci);
        float* op = out.plane(ci);
        for (int y = 0; y < ph; ++y) {
            const int sy = reflect_index(y, in.h);
            const float* src = ip + static_cast<std::size_t>(sy) * in.w;
            float* dst = op + static_cast<std::size_t>(y) * pw;
            for (int x = 0; x < pw; ++x) dst[x] = src[reflect_index(x, in.w)];
        }
    }
}

} // namespace detail

// Forward pass on an S x H x W input tensor; returns the squashed center-slice
// prediction as an H x W image. `cache` is required for a later backward pass
// and is reused across calls without reallocation churn.
inline ImageF model_forward(const Model& m, const Tensor& input, FwdCache& cache) {
    if (input.c != m.cfg.s_in) throw shape_error("model_forward: channel count != s_in");
    const int div = 1 << m.cfg.depth;
    if (input.h < div || input.w < div)
        throw shape_error("model_forward: H and W must be >= 2^depth");

    const int d = m.cfg.depth;
    cache.in_h = input.h;
    cache.in_w = input.w;
    cache.pad_h = (input.h + div - 1) / div * div;
    cache.pad_w = (input.w + div - 1) / div * div;
    cache.conv_in.resize(m.convs.size());
    cache.conv_pre.resize(m.convs.size());
    cache.conv_post.resize(m.convs.size());
    cache.pool_arg.resize(static_cast<std::size_t>(d));
    cache.pool_in_dims.resize(static_cast<std::size_t>(d));

    detail::pad_input(input, cache.pad_h, cache.pad_w, cache.input_padded);

    const auto run_conv = [&](int idx, const Tensor& in) -> const Tensor& {
        cache.conv_in[static_cast<std::size_t>(idx)] = in;
        conv_forward(m.convs[static_cast<std::size_t>(idx)],
                     cache.conv_in[static_cast<std::size_t>(idx)],
                     cache.conv_pre[static_cast<std::size_t>(idx)]);
        leaky_relu_forward(cache.conv_pre[static_cast<std::size_t>(idx)],
                           cache.conv_post[static_cast<std::size_t>(idx)]);
        return cache.conv_post[static_cast<std::size_t>(idx)];
    };

    Tensor x = cache.input_padded;
    for (int i = 0; i < d; ++i) {
        run_conv(m.enc_conv(i, 0), x);
        x = run_conv(m.enc_conv(i, 1), cache.conv_post[static_cast<std::size_t>(m.enc_conv(i, 0))]);
        cache.pool_in_dims[static_cast<std::size_t>(i)] = {x.h, x.w};
        Tensor pooled;
        maxpool2_forward(x, pooled, cache.pool_arg[static_cast<std::size_t>(i)]);
        x = std::move(pooled);
    }
    run_conv(m.bott_conv(0), x);
    x = run_conv(m.bott_conv(1), cache.conv_post[static_cast<std::size_t>(m.bott_conv(0))]);

    for (int i = d - 1; i >= 0; --i) {
        Tensor up;
        upsample2_forward(x, up);
        const Tensor& upc = run_conv(m.dec_up(i), up);
        Tensor cat;
        concat_forward(upc, cache.conv_post[static_cast<std::size_t>(m.enc_conv(i, 1))], cat);
        run_conv(m.dec_conv(i, 0), cat);
        x = run_conv(m.dec_conv(i, 1),
                     cache.conv_post[static_cast<std::size_t>(m.dec_conv(i, 0))]);
    }

    // head: 1x1 conv + sigmoid, then crop the padding back off
    const int hidx = m.head_conv();
    cache.conv_in[static_cast<std::size_t>(hidx)] = x;
    conv_forward(m.convs[static_cast<std::size_t>(hidx)], x,
                 cache.conv_pre[static_cast<std::size_t>(hidx)]);
    const Tensor& z = cache.conv_pre[static_cast<std::size_t>(hidx)];
    cache.sigmoid_out.resize(1, z.h, z.w);
    for (std::size_t i = 0; i < z.v.size(); ++i)
        cache.sigmoid_out.v[i] = 1.0f / (1.0f + std::exp(-z.v[i]));

    ImageF out(cache.in_h, cache.in_w);
    for (int y = 0; y < cache.in_h; ++y)
        for (int x2 = 0; x2 < cache.in_w; ++x2)
            out.at(y, x2) = cache.sigmoid_out.at(0, y, x2);
    return out;
}

struct Gradients {
    std::vector<std::vector<float>> gw;
    std::vector<std::vector<float>> gb;

    void init_like(const Model& m) {
        gw.resize(m.convs.size());
        gb.resize(m.convs.size());
        for (std::size_t i = 0; i < m.convs.size(); ++i) {
            gw[i].assign(m.convs[i].w.size(), 0.0f);
            gb[i].assign(m.convs[i].b.size(), 0.0f);
        }
    }

    void zero() {
        for (auto& g : gw) std::fill(g.begin(), g.end(), 0.0f);
        for (auto& g : gb) std::fill(g.begin(), g.end(), 0.0f);
    }

    void add(const Gradients& o) {
        for (std::size_t i = 0; i < gw.size(); ++i) {
            for (std::size_t j = 0; j < gw[i].size(); ++j) gw[i][j] += o.gw[i][j];
            for (std::size_t j = 0; j < gb[i].size(); ++j) gb[i][j] += o.gb[i][j];
        }
    }

    void scale(float s) {
        for (auto& g : gw)
            for (float& x : g) x *= s;
        for (auto& g : gb)
            for (float& x : g) x *= s;
    }
};

// Backpropagates dL/d(squashed output), an in_h x in_w field, accumulating
// parameter gradients into `grads` (which must be init_like'd).
inline void model_backward(const Model& m, const FwdCache& cache, const ImageD& dloss_dout,
                           Gradients& grads) {
    if (dloss_dout.height != cache.in_h || dloss_dout.width != cache.in_w)
        throw shape_error("model_backward: gradient shape mismatch");
    const int d = m.cfg.depth;

    // embed into padded frame and chain through the sigmoid
    Tensor dz(1, cache.pad_h, cache.pad_w);
    for (int y = 0; y < cache.in_h; ++y)
        for (int x = 0; x < cache.in_w; ++x) {
            const float s = cache.sigmoid_out.at(0, y, x);
            dz.at(0, y, x) = static_cast<float>(dloss_dout.at(y, x)) * s * (1.0f - s);
        }

    const auto back_conv = [&](int idx, const Tensor& dout, Tensor* din) {
        conv_backward(m.convs[static_cast<std::size_t>(idx)],
                      cache.conv_in[static_cast<std::size_t>(idx)], dout, din,
                      grads.gw[static_cast<std::size_t>(idx)],
                      grads.gb[static_cast<std::size_t>(idx)]);
    };

    Tensor dcur;
    back_conv(m.head_conv(), dz, &dcur);

    std::vector<Tensor> dskip(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        leaky_relu_backward(cache.conv_pre[static_cast<std::size_t>(m.dec_conv(i, 1))], dcur);
        Tensor dprev;
        back_conv(m.dec_conv(i, 1), dcur, &dprev);
        leaky_relu_backward(cache.conv_pre[static_cast<std::size_t>(m.dec_conv(i, 0))], dprev);
        Tensor dcat;
        back_conv(m.dec_conv(i, 0), dprev, &dcat);

        Tensor dup;
        concat_backward(dcat, m.level_channels(i), dup, dskip[static_cast<std::size_t>(i)]);
        leaky_relu_backward(cache.conv_pre[static_cast<std::size_t>(m.dec_up(i))], dup);
        Tensor dup_in;
        back_conv(m.dec_up(i), dup, &dup_in);
        upsample2_backward(dup_in, dcur);
    }

    leaky_relu_backward(cache.conv_pre[static_cast<std::size_t>(m.bott_conv(1))], dcur);
    Tensor dtmp;
    back_conv(m.bott_conv(1), dcur, &dtmp);
    leaky_relu_backward(cache.conv_pre[static_cast<std::size_t>(m.bott_conv(0))], dtmp);
    back_conv(m.bott_conv(0), dtmp, &dcur);

    for (int i = d - 1; i >= 0; --i) {
        Tensor dpool;
        maxpool2_backward(dcur, cache.pool_arg[static_cast<std::size_t>(i)],
                          cache.pool_in_dims[static_cast<std::size_t>(i)][0],
                          cache.pool_in_dims[static_cast<std::size_t>(i)][1], dpool);
        for (std::size_t j = 0; j < dpool.v.size(); ++j)
            dpool.v[j] += dskip[static_cast<std::size_t>(i)].v[j];

        leaky_relu_backward(cache.conv_pre[static_cast<std::size_t>(m.enc_conv(i, 1))], dpool);
        back_conv(m.enc_conv(i, 1), dpool, &dtmp);
        leaky_relu_backward(cache.conv_pre[static_cast<std::size_t>(m.enc_conv(i, 0))], dtmp);
        // for i > 0 the input gradient feeds the next (shallower) pool backward
        back_conv(m.enc_conv(i, 0), dtmp, i > 0 ? &dcur : nullptr);
    }
}

// ---- optimizer -------------------------------------------------------------

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<std::vector<float>> mw, vw, mb, vb;
    long t = 0;

    void init_like(const Model& m) {
        mw.resize(m.convs.size());
        vw.resize(m.convs.size());
        mb.resize(m.convs.size());
        vb.resize(m.convs.size());
        for (std::size_t i = 0; i < m.convs.size(); ++i) {
            mw[i].assign(m.convs[i].w.size(), 0.0f);
            vw[i].assign(m.convs[i].w.size(), 0.0f);
            mb[i].assign(m.convs[i].b.size(), 0.0f);
            vb[i].assign(m.convs[i].b.size(), 0.0f);
        }
    }
};

inline void adam_step(Model& m, const Gradients& g, AdamState& st, const AdamConfig& cfg) {
    st.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
    const auto update = [&](std::vector<float>& p, const std::vector<float>& grad,
                            std::vector<float>& mm, std::vector<float>& vv) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = grad[i];
            const double mi = cfg.beta1 * mm[i] + (1.0 - cfg.beta1) * gi;
            const double vi = cfg.beta2 * vv[i] + (1.0 - cfg.beta2) * gi * gi;
            mm[i] = static_cast<float>(mi);
            vv[i] = static_cast<float>(vi);
            p[i] -= static_cast<float>(cfg.lr * (mi / bc1) / (std::sqrt(vi / bc2) + cfg.eps));
        }
    };
    for (std::size_t i = 0; i < m.convs.size(); ++i) {
        update(m.convs[i].w, g.gw[i], st.mw[i], st.vw[i]);
        update(m.convs[i].b, g.gb[i], st.mb[i], st.vb[i]);
    }
}

// ---- parameter blob ---------------------------------------------------------

inline std::vector<float> flatten_parameters(const Model& m) {
    std::vector<float> out;
    out.reserve(m.parameter_count());
    for (const Conv& c : m.convs) {
        out.insert(out.end(), c.w.begin(), c.w.end());
        out.insert(out.end(), c.b.begin(), c.b.end());
    }
    return out;
}

inline void load_parameters(Model& m, const std::vector<float>& flat) {
    if (flat.size() != m.parameter_count())
        throw data_error("load_parameters: blob size does not match architecture");
    std::size_t off = 0;
    for (Conv& c : m.convs) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), c.w.size(), c.w.begin());
        off += c.w.size();
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), c.b.size(), c.b.begin());
        off += c.b.size();
    }
}

inline Tensor tensor_from_stack(const SliceStack& st) {
    Tensor t(st.s_count, st.height, st.width);
    std::memcpy(t.v.data(), st.data.data(), st.data.size() * sizeof(float));
    return t;
}

} // namespace vamos
