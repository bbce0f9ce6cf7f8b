// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include "vtc/encoder.hpp"

#include <cmath>
#include <random>

#include "vtc/errors.hpp"

namespace vtc {

std::vector<float> projection_matrix(const EncoderConfig& cfg) {
    if (cfg.patch_px < 1 || cfg.channels < 1)
        throw ConfigError("encoder: patch_px and channels must be >= 1");
    const std::int64_t in_dim = static_cast<std::int64_t>(cfg.patch_px) * cfg.patch_px * 3;
    std::vector<float> m(static_cast<std::size_t>(in_dim * cfg.channels));
    std::mt19937_64 rng(cfg.projection_seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
    for (float& v : m) v = static_cast<float>(nd(rng) * scale);
    return m;
}

Tensor4f extract_features(const FrameSequence& frames, const EncoderConfig& cfg) {
    if (frames.frames.empty()) throw EmptyInputError("extract_features: empty frame sequence");
    const int fh = frames.frames[0].height;
    const int fw = frames.frames[0].width;
    if (cfg.patch_px < 1 || fh % cfg.patch_px != 0 || fw % cfg.patch_px != 0)
        throw ConfigError("extract_features: patch size must divide frame dimensions");
    for (const Image& im : frames.frames)
        if (im.height != fh || im.width != fw)
            throw ConfigError("extract_features: frames differ in pixel dimensions");

    const std::int64_t grid_h = fh / cfg.patch_px;
    const std::int64_t grid_w = fw / cfg.patch_px;
    const std::int64_t in_dim = static_cast<std::int64_t>(cfg.patch_px) * cfg.patch_px * 3;
    const std::vector<float> m = projection_matrix(cfg);

    Tensor4f out({static_cast<std::int64_t>(frames.frames.size()), grid_h, grid_w,
                  cfg.channels});
    for (std::size_t t = 0; t < frames.frames.size(); ++t) {
        const Image& im = frames.frames[t];
        for (std::int64_t gh = 0; gh < grid_h; ++gh)
            for (std::int64_t gw = 0; gw < grid_w; ++gw) {
                float* feat = &out(static_cast<std::int64_t>(t), gh, gw, 0);
                // Patch pixels flattened row-major as (py, px, channel).
                for (int py = 0; py < cfg.patch_px; ++py)
                    for (int px = 0; px < cfg.patch_px; ++px) {
                        const int h = static_cast<int>(gh) * cfg.patch_px + py;
                        const int w = static_cast<int>(gw) * cfg.patch_px + px;
                        for (int ch = 0; ch < 3; ++ch) {
                            const float v = static_cast<float>(im.at(h, w, ch)) / 255.0f;
                            if (v == 0.0f) continue;
                            const std::int64_t row = ((static_cast<std::int64_t>(py) *
                                                       cfg.patch_px + px) * 3 + ch);
                            const float* mrow = &m[static_cast<std::size_t>(row * cfg.channels)];
                            for (std::int64_t c = 0; c < cfg.channels; ++c) feat[c] += v * mrow[c];
                        }
                    }
            }
    }
    return out;
}

}  // namespace vtc
