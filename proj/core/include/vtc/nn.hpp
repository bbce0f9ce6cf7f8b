// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "vtc/errors.hpp"
#include "vtc/tensor.hpp"

// Hand-rolled CPU kernels for the small factorized conv stacks used here.
// All tensors are (T, H, W, C) row-major. Weight layouts:
//   spatial conv  (kh, kw, ci, co)   bias (1, 1, 1, co)
//   temporal conv (kt, 1,  ci, co)   bias (1, 1, 1, co)
//   pointwise     (1,  1,  ci, co)   bias (1, 1, 1, co)
// Convolutions use "same" padding: out = ceil(in / stride), zero padding
// split with the smaller half in front.
namespace vtc::nn {

struct SamePad {
    std::int64_t out = 0;
    std::int64_t before = 0;
};

inline SamePad same_pad(std::int64_t in, std::int64_t kernel, std::int64_t stride) {
    SamePad p;
    p.out = (in + stride - 1) / stride;
    const std::int64_t total = std::max<std::int64_t>((p.out - 1) * stride + kernel - in, 0);
    p.before = total / 2;
    return p;
}

template <typename T>
inline T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

/// 2D spatial convolution applied independently per frame.
template <typename T>
Tensor4<T> conv2d_spatial(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>& b,
                          std::int64_t sh, std::int64_t sw) {
    const std::int64_t tt = x.dim(0), hh = x.dim(1), ww = x.dim(2), ci = x.dim(3);
    const std::int64_t kh = w.dim(0), kw = w.dim(1), co = w.dim(3);
    if (w.dim(2) != ci) throw ShapeError("conv2d_spatial: weight in-channels mismatch");
    if (b.dim(3) != co) throw ShapeError("conv2d_spatial: bias channel mismatch");
    const SamePad ph = same_pad(hh, kh, sh);
    const SamePad pw = same_pad(ww, kw, sw);
    Tensor4<T> y({tt, ph.out, pw.out, co});
    for (std::int64_t t = 0; t < tt; ++t)
        for (std::int64_t oh = 0; oh < ph.out; ++oh)
            for (std::int64_t ow = 0; ow < pw.out; ++ow) {
                T* out = &y(t, oh, ow, 0);
                for (std::int64_t c = 0; c < co; ++c) out[c] = b(0, 0, 0, c);
                for (std::int64_t ikh = 0; ikh < kh; ++ikh) {
                    const std::int64_t ih = oh * sh - ph.before + ikh;
                    if (ih < 0 || ih >= hh) continue;
                    for (std::int64_t ikw = 0; ikw < kw; ++ikw) {
                        const std::int64_t iw = ow * sw - pw.before + ikw;
                        if (iw < 0 || iw >= ww) continue;
                        const T* xin = &x(t, ih, iw, 0);
                        for (std::int64_t c = 0; c < ci; ++c) {
                            const T xv = xin[c];
                            const T* wrow = &w(ikh, ikw, c, 0);
                            for (std::int64_t o = 0; o < co; ++o) out[o] += xv * wrow[o];
                        }
                    }
                }
            }
    return y;
}

/// Gradients of conv2d_spatial w.r.t. input, weight and bias.
template <typename T>
void conv2d_spatial_backward(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>& gy,
                             std::int64_t sh, std::int64_t sw, Tensor4<T>& gx, Tensor4<T>& gw,
                             Tensor4<T>& gb) {
    const std::int64_t tt = x.dim(0), hh = x.dim(1), ww = x.dim(2), ci = x.dim(3);
    const std::int64_t kh = w.dim(0), kw = w.dim(1), co = w.dim(3);
    const SamePad ph = same_pad(hh, kh, sh);
    const SamePad pw = same_pad(ww, kw, sw);
    gx = Tensor4<T>(x.dims());
    gw = Tensor4<T>(w.dims());
    gb = Tensor4<T>({1, 1, 1, co});
    for (std::int64_t t = 0; t < tt; ++t)
        for (std::int64_t oh = 0; oh < ph.out; ++oh)
            for (std::int64_t ow = 0; ow < pw.out; ++ow) {
                const T* g = &gy(t, oh, ow, 0);
                for (std::int64_t o = 0; o < co; ++o) gb(0, 0, 0, o) += g[o];
                for (std::int64_t ikh = 0; ikh < kh; ++ikh) {
                    const std::int64_t ih = oh * sh - ph.before + ikh;
                    if (ih < 0 || ih >= hh) continue;
                    for (std::int64_t ikw = 0; ikw < kw; ++ikw) {
                        const std::int64_t iw = ow * sw - pw.before + ikw;
                        if (iw < 0 || iw >= ww) continue;
                        const T* xin = &x(t, ih, iw, 0);
                        T* gxin = &gx(t, ih, iw, 0);
                        for (std::int64_t c = 0; c < ci; ++c) {
                            const T* wrow = &w(ikh, ikw, c, 0);
                            T* gwrow = &gw(ikh, ikw, c, 0);
                            T acc = 0;
                            const T xv = xin[c];
                            for (std::int64_t o = 0; o < co; ++o) {
                                acc += g[o] * wrow[o];
                                gwrow[o] += g[o] * xv;
                            }
                            gxin[c] += acc;
                        }
                    }
                }
            }
}

/// 1D temporal convolution applied independently per spatial site.
template <typename T>
Tensor4<T> conv1d_temporal(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>& b,
                           std::int64_t st) {
    const std::int64_t tt = x.dim(0), hh = x.dim(1), ww = x.dim(2), ci = x.dim(3);
    const std::int64_t kt = w.dim(0), co = w.dim(3);
    if (w.dim(2) != ci) throw ShapeError("conv1d_temporal: weight in-channels mismatch");
    if (b.dim(3) != co) throw ShapeError("conv1d_temporal: bias channel mismatch");
    const SamePad pt = same_pad(tt, kt, st);
    Tensor4<T> y({pt.out, hh, ww, co});
    for (std::int64_t ot = 0; ot < pt.out; ++ot)
        for (std::int64_t h = 0; h < hh; ++h)
            for (std::int64_t iw = 0; iw < ww; ++iw) {
                T* out = &y(ot, h, iw, 0);
                for (std::int64_t c = 0; c < co; ++c) out[c] = b(0, 0, 0, c);
                for (std::int64_t ikt = 0; ikt < kt; ++ikt) {
                    const std::int64_t it = ot * st - pt.before + ikt;
                    if (it < 0 || it >= tt) continue;
                    const T* xin = &x(it, h, iw, 0);
                    for (std::int64_t c = 0; c < ci; ++c) {
                        const T xv = xin[c];
                        const T* wrow = &w(ikt, 0, c, 0);
                        for (std::int64_t o = 0; o < co; ++o) out[o] += xv * wrow[o];
                    }
                }
            }
    return y;
}

/// Gradients of conv1d_temporal w.r.t. input, weight and bias.
template <typename T>
void conv1d_temporal_backward(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>& gy,
                              std::int64_t st, Tensor4<T>& gx, Tensor4<T>& gw, Tensor4<T>& gb) {
    const std::int64_t tt = x.dim(0), hh = x.dim(1), ww = x.dim(2), ci = x.dim(3);
    const std::int64_t kt = w.dim(0), co = w.dim(3);
    const SamePad pt = same_pad(tt, kt, st);
    gx = Tensor4<T>(x.dims());
    gw = Tensor4<T>(w.dims());
    gb = Tensor4<T>({1, 1, 1, co});
    for (std::int64_t ot = 0; ot < pt.out; ++ot)
        for (std::int64_t h = 0; h < hh; ++h)
            for (std::int64_t iw = 0; iw < ww; ++iw) {
                const T* g = &gy(ot, h, iw, 0);
                for (std::int64_t o = 0; o < co; ++o) gb(0, 0, 0, o) += g[o];
                for (std::int64_t ikt = 0; ikt < kt; ++ikt) {
                    const std::int64_t it = ot * st - pt.before + ikt;
                    if (it < 0 || it >= tt) continue;
                    const T* xin = &x(it, h, iw, 0);
                    T* gxin = &gx(it, h, iw, 0);
                    for (std::int64_t c = 0; c < ci; ++c) {
                        const T* wrow = &w(ikt, 0, c, 0);
                        T* gwrow = &gw(ikt, 0, c, 0);
                        T acc = 0;
                        const T xv = xin[c];
                        for (std::int64_t o = 0; o < co; ++o) {
                            acc += g[o] * wrow[o];
                            gwrow[o] += g[o] * xv;
                        }
                        gxin[c] += acc;
                    }
                }
            }
}

/// 1x1x1 channel projection.
template <typename T>
Tensor4<T> pointwise(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>& b) {
    const std::int64_t ci = x.dim(3), co = w.dim(3);
    if (w.dim(2) != ci) throw ShapeError("pointwise: weight in-channels mismatch");
    Tensor4<T> y({x.dim(0), x.dim(1), x.dim(2), co});
    const std::int64_t sites = x.numel() / std::max<std::int64_t>(ci, 1);
    for (std::int64_t s = 0; s < sites; ++s) {
        const T* xin = x.data() + s * ci;
        T* out = y.data() + s * co;
        for (std::int64_t o = 0; o < co; ++o) out[o] = b(0, 0, 0, o);
        for (std::int64_t c = 0; c < ci; ++c) {
            const T xv = xin[c];
            const T* wrow = &w(0, 0, c, 0);
            for (std::int64_t o = 0; o < co; ++o) out[o] += xv * wrow[o];
        }
    }
    return y;
}

template <typename T>
void pointwise_backward(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>& gy,
                        Tensor4<T>& gx, Tensor4<T>& gw, Tensor4<T>& gb) {
    const std::int64_t ci = x.dim(3), co = w.dim(3);
    gx = Tensor4<T>(x.dims());
    gw = Tensor4<T>(w.dims());
    gb = Tensor4<T>({1, 1, 1, co});
    const std::int64_t sites = x.numel() / std::max<std::int64_t>(ci, 1);
    for (std::int64_t s = 0; s < sites; ++s) {
        const T* xin = x.data() + s * ci;
        const T* g = gy.data() + s * co;
        T* gxin = gx.data() + s * ci;
        for (std::int64_t o = 0; o < co; ++o) gb(0, 0, 0, o) += g[o];
        for (std::int64_t c = 0; c < ci; ++c) {
            const T* wrow = &w(0, 0, c, 0);
            T* gwrow = &gw(0, 0, c, 0);
            T acc = 0;
            const T xv = xin[c];
            for (std::int64_t o = 0; o < co; ++o) {
                acc += g[o] * wrow[o];
                gwrow[o] += g[o] * xv;
            }
            gxin[c] += acc;
        }
    }
}

/// SiLU activation x * sigmoid(x), elementwise.
template <typename T>
Tensor4<T> silu(const Tensor4<T>& x) {
    Tensor4<T> y(x.dims());
    for (std::int64_t i = 0; i < x.numel(); ++i) {
        const T v = x.data()[i];
        y.data()[i] = v * sigmoid(v);
    }
    return y;
}

template <typename T>
Tensor4<T> silu_backward(const Tensor4<T>& x, const Tensor4<T>& gy) {
    Tensor4<T> gx(x.dims());
    for (std::int64_t i = 0; i < x.numel(); ++i) {
        const T v = x.data()[i];
        const T s = sigmoid(v);
        gx.data()[i] = gy.data()[i] * s * (T(1) + v * (T(1) - s));
    }
    return gx;
}

/// Non-overlapping box mean over rt x rh x rw windows, per channel.
/// Throws ShapeError unless every pooled dim divides exactly.
template <typename T>
Tensor4<T> avgpool3d_t(const Tensor4<T>& x, std::int64_t rt, std::int64_t rh, std::int64_t rw) {
    if (rt < 1 || rh < 1 || rw < 1) throw ShapeError("avgpool3d: ratios must be >= 1");
    if (x.dim(0) % rt || x.dim(1) % rh || x.dim(2) % rw)
        throw ShapeError("avgpool3d: dims not divisible by pooling ratios");
    const std::int64_t ot = x.dim(0) / rt, oh = x.dim(1) / rh, ow = x.dim(2) / rw, cc = x.dim(3);
    Tensor4<T> y({ot, oh, ow, cc});
    const T inv = T(1) / T(rt * rh * rw);
    for (std::int64_t t = 0; t < ot; ++t)
        for (std::int64_t h = 0; h < oh; ++h)
            for (std::int64_t w = 0; w < ow; ++w) {
                T* out = &y(t, h, w, 0);
                for (std::int64_t it = 0; it < rt; ++it)
                    for (std::int64_t ih = 0; ih < rh; ++ih)
                        for (std::int64_t iw = 0; iw < rw; ++iw) {
                            const T* xin = &x(t * rt + it, h * rh + ih, w * rw + iw, 0);
                            for (std::int64_t c = 0; c < cc; ++c) out[c] += xin[c];
                        }
                for (std::int64_t c = 0; c < cc; ++c) out[c] *= inv;
            }
    return y;
}

/// Gradient of avgpool3d: each input site receives gy / window volume.
template <typename T>
Tensor4<T> avgpool3d_backward(const Tensor4<T>& gy, const std::array<std::int64_t, 4>& in_dims,
                              std::int64_t rt, std::int64_t rh, std::int64_t rw) {
    Tensor4<T> gx(in_dims);
    const T inv = T(1) / T(rt * rh * rw);
    for (std::int64_t t = 0; t < in_dims[0]; ++t)
        for (std::int64_t h = 0; h < in_dims[1]; ++h)
            for (std::int64_t w = 0; w < in_dims[2]; ++w) {
                const T* g = &gy(t / rt, h / rh, w / rw, 0);
                T* out = &gx(t, h, w, 0);
                for (std::int64_t c = 0; c < in_dims[3]; ++c) out[c] = g[c] * inv;
            }
    return gx;
}

/// Nearest-neighbor upsampling: each value replicated over ft x fh x fw.
template <typename T>
Tensor4<T> upsample_nn(const Tensor4<T>& x, std::int64_t ft, std::int64_t fh, std::int64_t fw) {
    if (ft < 1 || fh < 1 || fw < 1) throw ShapeError("upsample_nn: factors must be >= 1");
    Tensor4<T> y({x.dim(0) * ft, x.dim(1) * fh, x.dim(2) * fw, x.dim(3)});
    for (std::int64_t t = 0; t < y.dim(0); ++t)
        for (std::int64_t h = 0; h < y.dim(1); ++h)
            for (std::int64_t w = 0; w < y.dim(2); ++w) {
                const T* xin = &x(t / ft, h / fh, w / fw, 0);
                T* out = &y(t, h, w, 0);
                for (std::int64_t c = 0; c < x.dim(3); ++c) out[c] = xin[c];
            }
    return y;
}

/// Gradient of upsample_nn: sum gy over each replication window.
template <typename T>
Tensor4<T> upsample_nn_backward(const Tensor4<T>& gy, std::int64_t ft, std::int64_t fh,
                                std::int64_t fw) {
    if (gy.dim(0) % ft || gy.dim(1) % fh || gy.dim(2) % fw)
        throw ShapeError("upsample_nn_backward: dims not divisible by factors");
    Tensor4<T> gx({gy.dim(0) / ft, gy.dim(1) / fh, gy.dim(2) / fw, gy.dim(3)});
    for (std::int64_t t = 0; t < gy.dim(0); ++t)
        for (std::int64_t h = 0; h < gy.dim(1); ++h)
            for (std::int64_t w = 0; w < gy.dim(2); ++w) {
                const T* g = &gy(t, h, w, 0);
                T* out = &gx(t / ft, h / fh, w / fw, 0);
                for (std::int64_t c = 0; c < gy.dim(3); ++c) out[c] += g[c];
            }
    return gx;
}

}  // namespace vtc::nn
