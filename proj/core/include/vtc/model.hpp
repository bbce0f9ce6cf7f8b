// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vtc/compressor.hpp"
#include "vtc/nn.hpp"
#include "vtc/tensor.hpp"

// Assembly of the compressor/decoder graph from nn primitives, with
// explicit forward traces and hand-written reverse-mode backward passes.
// Templated on the scalar type so training runs in float32 while gradient
// verification runs an identical float64 shadow.
namespace vtc::model {

inline void check_stride(std::int64_t s) {
    if (s != 1 && s != 2) throw ConfigError("block strides must be 1 or 2");
}

/// dst += src, elementwise; dims must match.
template <typename T>
void accumulate(Tensor4<T>& dst, const Tensor4<T>& src) {
    if (!dst.same_dims(src)) throw ShapeError("gradient accumulation dimension mismatch");
    for (std::int64_t i = 0; i < dst.numel(); ++i) dst.data()[i] += src.data()[i];
}

/// Enumerate parameter (name, shape) pairs in canonical architecture order:
/// encoder blocks, encoder head, decoder blocks, then VAE heads when the
/// constraint is vae. Initialization draws in exactly this order, so trunk
/// parameters are identical across constraint variants at equal seeds.
inline void for_each_param(
    const CompressorConfig& cfg,
    const std::function<void(const std::string&, const std::array<std::int64_t, 4>&)>& fn) {
    const std::int64_t d = cfg.channels_d;
    const std::int64_t q = d / cfg.bottleneck_div;
    const std::int64_t ks = cfg.spatial_kernel;
    const std::int64_t kt = cfg.temporal_kernel;
    const auto conv_block = [&](const std::string& prefix) {
        fn(prefix + ".spatial.weight", {ks, ks, d, q});
        fn(prefix + ".spatial.bias", {1, 1, 1, q});
        fn(prefix + ".temporal.weight", {kt, 1, q, d});
        fn(prefix + ".temporal.bias", {1, 1, 1, d});
    };
    const auto res_block = [&](const std::string& prefix, const Stride3& s) {
        conv_block(prefix + ".conv0");
        conv_block(prefix + ".conv1");
        if (s.t != 1 || s.h != 1 || s.w != 1) {
            fn(prefix + ".shortcut.weight", {1, 1, d, d});
            fn(prefix + ".shortcut.bias", {1, 1, 1, d});
        }
    };
    for (std::size_t i = 0; i < cfg.strides.size(); ++i)
        res_block("enc.block" + std::to_string(i), cfg.strides[i]);
    fn("enc.head.weight", {1, 1, d, d});
    fn("enc.head.bias", {1, 1, 1, d});
    for (std::size_t j = 0; j < cfg.strides.size(); ++j)
        res_block("dec.block" + std::to_string(j), Stride3{1, 1, 1});
    if (cfg.latent_constraint == LatentConstraint::vae) {
        fn("vae.mean.weight", {1, 1, d, d});
        fn("vae.mean.bias", {1, 1, 1, d});
        fn("vae.logvar.weight", {1, 1, d, d});
        fn("vae.logvar.bias", {1, 1, 1, d});
    }
}

template <typename T>
struct ConvBlockTrace {
    Tensor4<T> x;  // block input
    Tensor4<T> s;  // spatial conv output
    Tensor4<T> u;  // temporal conv output (pre-activation)
};

template <typename T>
struct ResBlockTrace {
    ConvBlockTrace<T> cb0, cb1;
    Tensor4<T> pooled;  // strided shortcut: pooled input (empty when identity)
    Tensor4<T> y;       // block output
};

/// spatial conv -> temporal conv -> SiLU. The spatial conv carries the
/// (s_h, s_w) stride and maps d -> d/div; the temporal conv carries s_t and
/// restores d channels.
template <typename T>
Tensor4<T> conv_block_forward(const ParamSet<T>& p, const std::string& prefix,
                              const Tensor4<T>& x, const Stride3& s, ConvBlockTrace<T>* tr) {
    const Tensor4<T> sp = nn::conv2d_spatial(x, p.at(prefix + ".spatial.weight"),
                                             p.at(prefix + ".spatial.bias"), s.h, s.w);
    const Tensor4<T> u = nn::conv1d_temporal(sp, p.at(prefix + ".temporal.weight"),
                                             p.at(prefix + ".temporal.bias"), s.t);
    Tensor4<T> y = nn::silu(u);
    if (tr) {
        tr->x = x;
        tr->s = sp;
        tr->u = u;
    }
    return y;
}

/// Accumulating backward of conv_block_forward; returns grad w.r.t. x.
template <typename T>
Tensor4<T> conv_block_backward(const ParamSet<T>& p, const std::string& prefix,
                               const ConvBlockTrace<T>& tr, const Stride3& s,
                               const Tensor4<T>& gy, ParamSet<T>& grads) {
    const Tensor4<T> gu = nn::silu_backward(tr.u, gy);
    Tensor4<T> gs, gwt, gbt;
    nn::conv1d_temporal_backward(tr.s, p.at(prefix + ".temporal.weight"), gu, s.t, gs, gwt, gbt);
    Tensor4<T> gx, gws, gbs;
    nn::conv2d_spatial_backward(tr.x, p.at(prefix + ".spatial.weight"), gs, s.h, s.w, gx, gws,
                                gbs);
    accumulate(grads.at(prefix + ".temporal.weight"), gwt);
    accumulate(grads.at(prefix + ".temporal.bias"), gbt);
    accumulate(grads.at(prefix + ".spatial.weight"), gws);
    accumulate(grads.at(prefix + ".spatial.bias"), gbs);
    return gx;
}

/// y = shortcut(x) + cb1(cb0(x)); cb0 carries the stride. Identity shortcut
/// at stride 1, else strided average pool + learned 1x1x1 projection.
template <typename T>
Tensor4<T> residual_block_forward(const ParamSet<T>& p, const std::string& prefix,
                             const Tensor4<T>& x, const Stride3& s, ResBlockTrace<T>* tr) {
    const Tensor4<T> mid =
        conv_block_forward(p, prefix + ".conv0", x, s, tr ? &tr->cb0 : nullptr);
    const Tensor4<T> branch =
        conv_block_forward(p, prefix + ".conv1", mid, Stride3{1, 1, 1}, tr ? &tr->cb1 : nullptr);
    Tensor4<T> y;
    const bool strided = (s.t != 1 || s.h != 1 || s.w != 1);
    if (strided) {
        const Tensor4<T> pooled = nn::avgpool3d_t(x, s.t, s.h, s.w);
        y = nn::pointwise(pooled, p.at(prefix + ".shortcut.weight"),
                          p.at(prefix + ".shortcut.bias"));
        if (tr) tr->pooled = pooled;
    } else {
        y = x;
    }
    if (!y.same_dims(branch)) throw ShapeError("residual block shortcut/branch shape mismatch");
    for (std::int64_t i = 0; i < y.numel(); ++i) y.data()[i] += branch.data()[i];
    if (tr) tr->y = y;
    return y;
}

/// Accumulating backward of residual_block_forward; returns grad w.r.t. x.
template <typename T>
Tensor4<T> residual_block_backward(const ParamSet<T>& p, const std::string& prefix,
                              const ResBlockTrace<T>& tr, const Stride3& s, const Tensor4<T>& gy,
                              ParamSet<T>& grads) {
    const Tensor4<T> gmid = conv_block_backward(p, prefix + ".conv1", tr.cb1, Stride3{1, 1, 1},
                                                gy, grads);
    Tensor4<T> gx = conv_block_backward(p, prefix + ".conv0", tr.cb0, s, gmid, grads);
    const bool strided = (s.t != 1 || s.h != 1 || s.w != 1);
    if (strided) {
        Tensor4<T> gpooled, gw, gb;
        nn::pointwise_backward(tr.pooled, p.at(prefix + ".shortcut.weight"), gy, gpooled, gw, gb);
        accumulate(grads.at(prefix + ".shortcut.weight"), gw);
        accumulate(grads.at(prefix + ".shortcut.bias"), gb);
        const Tensor4<T> gsc =
            nn::avgpool3d_backward(gpooled, tr.cb0.x.dims(), s.t, s.h, s.w);
        accumulate(gx, gsc);
    } else {
        accumulate(gx, gy);
    }
    return gx;
}

template <typename T>
struct EncoderTrace {
    std::vector<ResBlockTrace<T>> blocks;
    Tensor4<T> trunk;  // input to the head
};

/// Encoder stack + head: C(f).
template <typename T>
Tensor4<T> encoder_forward(const ParamSet<T>& p, const CompressorConfig& cfg,
                           const Tensor4<T>& f, EncoderTrace<T>* tr) {
    Tensor4<T> x = f;
    if (tr) tr->blocks.resize(cfg.strides.size());
    for (std::size_t i = 0; i < cfg.strides.size(); ++i)
        x = residual_block_forward(p, "enc.block" + std::to_string(i), x, cfg.strides[i],
                              tr ? &tr->blocks[i] : nullptr);
    if (tr) tr->trunk = x;
    return nn::pointwise(x, p.at("enc.head.weight"), p.at("enc.head.bias"));
}

/// Backward through head + encoder stack; returns grad w.r.t. f.
template <typename T>
Tensor4<T> encoder_backward(const ParamSet<T>& p, const CompressorConfig& cfg,
                            const EncoderTrace<T>& tr, const Tensor4<T>& g_c,
                            ParamSet<T>& grads) {
    Tensor4<T> gtrunk, gw, gb;
    nn::pointwise_backward(tr.trunk, p.at("enc.head.weight"), g_c, gtrunk, gw, gb);
    accumulate(grads.at("enc.head.weight"), gw);
    accumulate(grads.at("enc.head.bias"), gb);
    Tensor4<T> g = gtrunk;
    for (std::size_t i = cfg.strides.size(); i-- > 0;)
        g = residual_block_backward(p, "enc.block" + std::to_string(i), tr.blocks[i], cfg.strides[i],
                               g, grads);
    return g;
}

template <typename T>
struct DecoderTrace {
    std::vector<Tensor4<T>> upsampled;  // per block, post-upsample input
    std::vector<ResBlockTrace<T>> blocks;
};

/// Decoder D(h): per block (mirroring encoder block order reversed),
/// nearest-neighbor upsample by that block's stride, then a stride-1
/// residual block.
template <typename T>
Tensor4<T> decoder_forward(const ParamSet<T>& p, const CompressorConfig& cfg,
                           const Tensor4<T>& h, DecoderTrace<T>* tr) {
    Tensor4<T> x = h;
    const std::size_t nb = cfg.strides.size();
    if (tr) {
        tr->upsampled.resize(nb);
        tr->blocks.resize(nb);
    }
    for (std::size_t j = 0; j < nb; ++j) {
        const Stride3& s = cfg.strides[nb - 1 - j];
        x = nn::upsample_nn(x, s.t, s.h, s.w);
        if (tr) tr->upsampled[j] = x;
        x = residual_block_forward(p, "dec.block" + std::to_string(j), x, Stride3{1, 1, 1},
                              tr ? &tr->blocks[j] : nullptr);
    }
    return x;
}

/// Backward through the decoder; returns grad w.r.t. h.
template <typename T>
Tensor4<T> decoder_backward(const ParamSet<T>& p, const CompressorConfig& cfg,
                            const DecoderTrace<T>& tr, const Tensor4<T>& g_out,
                            ParamSet<T>& grads) {
    Tensor4<T> g = g_out;
    const std::size_t nb = cfg.strides.size();
    for (std::size_t j = nb; j-- > 0;) {
        const Stride3& s = cfg.strides[nb - 1 - j];
        g = residual_block_backward(p, "dec.block" + std::to_string(j), tr.blocks[j],
                               Stride3{1, 1, 1}, g, grads);
        g = nn::upsample_nn_backward(g, s.t, s.h, s.w);
    }
    return g;
}

template <typename T>
struct ModelTrace {
    Tensor4<T> f;  // input sample
    EncoderTrace<T> enc;
    Tensor4<T> c_out;                // C(f)
    Tensor4<T> mu, logvar, eps, z;   // vae pieces (empty otherwise)
    Tensor4<T> latent;               // decoder input h
    DecoderTrace<T> dec;
    Tensor4<T> recon;                // f_hat
    double kl = 0;                   // vae only
    double loss = 0;                 // MAE (+ kl_weight * kl)
};

/// Standard-normal tensor from a seeded generator (doubles drawn, then cast,
/// so float and double shadows see identical noise).
template <typename T>
Tensor4<T> seeded_normal(const std::array<std::int64_t, 4>& dims, std::uint64_t seed) {
    Tensor4<T> out(dims);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::int64_t i = 0; i < out.numel(); ++i) out.data()[i] = static_cast<T>(nd(rng));
    return out;
}

/// Single-sample training loss under the config's latent constraint. The
/// scalar reduction runs in double regardless of T, so the reported loss
/// agrees with reconstruction_loss bit-for-bit on identical tensors.
template <typename T>
double model_loss_forward(const ParamSet<T>& p, const CompressorConfig& cfg, const Tensor4<T>& f,
                          double kl_weight, std::uint64_t noise_seed, ModelTrace<T>* tr) {
    ModelTrace<T> local;
    ModelTrace<T>& m = tr ? *tr : local;
    m.f = f;
    m.c_out = encoder_forward(p, cfg, f, &m.enc);
    switch (cfg.latent_constraint) {
        case LatentConstraint::none:
            m.latent = m.c_out;
            break;
        case LatentConstraint::avgpool_residual: {
            Stride3 r{1, 1, 1};
            for (const Stride3& s : cfg.strides) {
                r.t *= s.t;
                r.h *= s.h;
                r.w *= s.w;
            }
            const Tensor4<T> pooled = nn::avgpool3d_t(f, r.t, r.h, r.w);
            m.latent = m.c_out;
            for (std::int64_t i = 0; i < m.latent.numel(); ++i)
                m.latent.data()[i] += pooled.data()[i];
            break;
        }
        case LatentConstraint::vae: {
            m.mu = nn::pointwise(m.c_out, p.at("vae.mean.weight"), p.at("vae.mean.bias"));
            m.logvar =
                nn::pointwise(m.c_out, p.at("vae.logvar.weight"), p.at("vae.logvar.bias"));
            m.eps = seeded_normal<T>(m.mu.dims(), noise_seed);
            m.z = Tensor4<T>(m.mu.dims());
            double kl_sum = 0;
            for (std::int64_t i = 0; i < m.mu.numel(); ++i) {
                const T mu = m.mu.data()[i];
                const T lv = m.logvar.data()[i];
                m.z.data()[i] = mu + std::exp(lv / T(2)) * m.eps.data()[i];
                kl_sum += 0.5 * (static_cast<double>(mu) * mu + std::exp(static_cast<double>(lv)) -
                                 1.0 - lv);
            }
            m.kl = kl_sum / static_cast<double>(m.mu.numel());
            m.latent = m.z;
            break;
        }
    }
    m.recon = decoder_forward(p, cfg, m.latent, &m.dec);
    if (!m.recon.same_dims(f)) throw ShapeError("reconstruction shape mismatch");
    // Accumulate in double so the reported loss matches reconstruction_loss
    // regardless of T; the backward pass only needs signs.
    double abs_sum = 0;
    for (std::int64_t i = 0; i < f.numel(); ++i)
        abs_sum += std::abs(static_cast<double>(m.recon.data()[i]) -
                            static_cast<double>(f.data()[i]));
    m.loss = abs_sum / static_cast<double>(f.numel());
    if (cfg.latent_constraint == LatentConstraint::vae) m.loss += kl_weight * m.kl;
    return m.loss;
}

/// Reverse pass matching model_loss_forward; parameter gradients scaled by
/// loss_scale accumulate into `grads` (names/shapes must match `p`).
template <typename T>
void model_loss_backward(const ParamSet<T>& p, const CompressorConfig& cfg,
                         const ModelTrace<T>& m, double kl_weight, T loss_scale,
                         ParamSet<T>& grads) {
    // d(MAE)/d(recon) = sign(recon - f) / numel
    Tensor4<T> g_recon(m.recon.dims());
    const T inv_n = loss_scale / T(m.recon.numel());
    for (std::int64_t i = 0; i < m.recon.numel(); ++i) {
        const T d = m.recon.data()[i] - m.f.data()[i];
        g_recon.data()[i] = d > 0 ? inv_n : (d < 0 ? -inv_n : T(0));
    }
    Tensor4<T> g_latent = decoder_backward(p, cfg, m.dec, g_recon, grads);
    Tensor4<T> g_c;
    switch (cfg.latent_constraint) {
        case LatentConstraint::none:
        case LatentConstraint::avgpool_residual:
            // The pooled branch feeds the frozen input only; C(f) sees g_latent.
            g_c = g_latent;
            break;
        case LatentConstraint::vae: {
            const std::int64_t nl = m.mu.numel();
            Tensor4<T> g_mu(m.mu.dims());
            Tensor4<T> g_lv(m.mu.dims());
            const T kw = static_cast<T>(kl_weight) * loss_scale;
            for (std::int64_t i = 0; i < nl; ++i) {
                const T lv = m.logvar.data()[i];
                const T gz = g_latent.data()[i];
                g_mu.data()[i] = gz + kw * m.mu.data()[i] / T(nl);
                g_lv.data()[i] = gz * m.eps.data()[i] * std::exp(lv / T(2)) / T(2) +
                                 kw * (std::exp(lv) - T(1)) / (T(2) * T(nl));
            }
            Tensor4<T> g_c_mu, gw, gb;
            nn::pointwise_backward(m.c_out, p.at("vae.mean.weight"), g_mu, g_c_mu, gw, gb);
            accumulate(grads.at("vae.mean.weight"), gw);
            accumulate(grads.at("vae.mean.bias"), gb);
            Tensor4<T> g_c_lv;
            nn::pointwise_backward(m.c_out, p.at("vae.logvar.weight"), g_lv, g_c_lv, gw, gb);
            accumulate(grads.at("vae.logvar.weight"), gw);
            accumulate(grads.at("vae.logvar.bias"), gb);
            g_c = g_c_mu;
            accumulate(g_c, g_c_lv);
            break;
        }
    }
    encoder_backward(p, cfg, m.enc, g_c, grads);
}

/// Zeroed gradient set matching a parameter set.
template <typename T>
ParamSet<T> zero_like(const ParamSet<T>& p) {
    ParamSet<T> g;
    for (std::size_t i = 0; i < p.size(); ++i) g.add(p.name(i), Tensor4<T>(p.tensor(i).dims()));
    return g;
}

}  // namespace vtc::model
