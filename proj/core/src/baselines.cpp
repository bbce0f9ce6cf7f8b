// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include "vtc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vtc/nn.hpp"

namespace vtc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Tensor4f avgpool_baseline(const Tensor4f& f, std::int64_t rt, std::int64_t rh, std::int64_t rw) {
    return nn::avgpool3d_t(f, rt, rh, rw);
}

Tensor4f upsample_reconstruction(const Tensor4f& h, std::int64_t rt, std::int64_t rh,
                                 std::int64_t rw) {
    return nn::upsample_nn(h, rt, rh, rw);
}

double boundary_recall(const std::vector<std::int64_t>& selected,
                       const std::vector<std::int64_t>& truth_cuts, std::int64_t tol_frames) {
    if (truth_cuts.empty()) throw EmptyInputError("boundary_recall: no ground-truth cuts");
    if (tol_frames < 0) throw ConfigError("boundary_recall: tolerance must be >= 0");
    std::int64_t hits = 0;
    for (const std::int64_t cut : truth_cuts) {
        bool hit = false;
        for (const std::int64_t s : selected) {
            if (std::abs(s - cut) <= tol_frames) {
                hit = true;
                break;
            }
        }
        if (hit) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(truth_cuts.size());
}

ShotVideo synth_shot_video(std::int64_t n_shots, double shot_len_s, double fps,
                           std::uint64_t seed, double shot_len_jitter, int height, int width) {
    if (n_shots < 1) throw ConfigError("synth_shot_video: n_shots must be >= 1");
    if (shot_len_s <= 0 || fps <= 0)
        throw ConfigError("synth_shot_video: shot length and fps must be positive");
    if (shot_len_jitter < 0 || shot_len_jitter >= 1)
        throw ConfigError("synth_shot_video: jitter must be in [0, 1)");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> color_dist(0, 255);
    std::uniform_real_distribution<double> jitter_dist(1.0 - shot_len_jitter,
                                                       1.0 + shot_len_jitter);
    std::uniform_int_distribution<int> noise_dist(-8, 8);

    const std::int64_t base_len = std::max<std::int64_t>(1, std::llround(shot_len_s * fps));
    ShotVideo out;
    out.seq.fps = fps;
    out.seq.source_id = "synth:shots:" + std::to_string(seed);

    int prev_bin[3] = {-1, -1, -1};
    std::int64_t frame_idx = 0;
    for (std::int64_t shot = 0; shot < n_shots; ++shot) {
        // A color whose 8x8x8 histogram bin differs from the previous shot's,
        // so every cut scores 1 under the histogram differencer.
        int color[3];
        for (;;) {
            for (int& c : color) c = color_dist(rng);
            const int bin[3] = {color[0] >> 5, color[1] >> 5, color[2] >> 5};
            if (bin[0] != prev_bin[0] || bin[1] != prev_bin[1] || bin[2] != prev_bin[2]) {
                prev_bin[0] = bin[0];
                prev_bin[1] = bin[1];
                prev_bin[2] = bin[2];
                break;
            }
        }
        std::int64_t len = base_len;
        if (shot_len_jitter > 0)
            len = std::max<std::int64_t>(1, std::llround(base_len * jitter_dist(rng)));
        if (shot > 0) out.cuts.push_back(frame_idx);
        for (std::int64_t i = 0; i < len; ++i, ++frame_idx) {
            Image im(height, width);
            for (std::size_t px = 0; px < im.data.size(); px += 3)
                for (int c = 0; c < 3; ++c) {
                    const int v = color[c] + noise_dist(rng);
                    im.data[px + static_cast<std::size_t>(c)] =
                        static_cast<std::uint8_t>(std::clamp(v, 0, 255));
                }
            out.seq.frames.push_back(std::move(im));
            out.seq.timestamps.push_back(static_cast<double>(out.seq.timestamps.size()) / fps);
        }
    }
    out.seq.source_indices.resize(out.seq.frames.size());
    for (std::size_t i = 0; i < out.seq.source_indices.size(); ++i)
        out.seq.source_indices[i] = static_cast<std::int64_t>(i);
    return out;
}

std::vector<Tensor4f> synth_feature_dataset(std::int64_t n,
                                            const std::array<std::int64_t, 4>& dims,
                                            std::uint64_t seed) {
    if (n < 1) throw ConfigError("synth_feature_dataset: n must be >= 1");
    for (const std::int64_t d : dims)
        if (d < 1) throw ConfigError("synth_feature_dataset: dims must be >= 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.2, 0.9);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    constexpr int kComponents = 3;
    std::vector<Tensor4f> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t s = 0; s < n; ++s) {
        // Per-tensor mixture of low-frequency sinusoids; amplitudes sum to 1
        // so values stay in [-1, 1].
        double amp[kComponents], wt[kComponents], wh[kComponents], ww[kComponents],
            ph[kComponents], chshift[kComponents], jump_shift[kComponents];
        double amp_sum = 0.0;
        for (int m = 0; m < kComponents; ++m) {
            amp[m] = 0.25 + unit(rng);
            amp_sum += amp[m];
            wt[m] = freq(rng);
            wh[m] = freq(rng);
            ww[m] = freq(rng);
            ph[m] = phase(rng);
            chshift[m] = phase(rng) / 4.0;
            jump_shift[m] = 0.0;
        }
        for (int m = 0; m < kComponents; ++m) amp[m] /= amp_sum;
        // Half the tensors get a mid-sequence regime jump: a phase shock at
        // a random frame, the discontinuity pooling cannot represent.
        std::int64_t jump_t = -1;
        if (unit(rng) < 0.5 && dims[0] > 1) {
            jump_t = 1 + static_cast<std::int64_t>(unit(rng) * static_cast<double>(dims[0] - 1));
            jump_t = std::min(jump_t, dims[0] - 1);
            for (int m = 0; m < kComponents; ++m)
                jump_shift[m] = kPi * (0.5 + unit(rng));
        }

        Tensor4f t(dims);
        for (std::int64_t tt = 0; tt < dims[0]; ++tt)
            for (std::int64_t hh = 0; hh < dims[1]; ++hh)
                for (std::int64_t ws = 0; ws < dims[2]; ++ws)
                    for (std::int64_t c = 0; c < dims[3]; ++c) {
                        double v = 0.0;
                        for (int m = 0; m < kComponents; ++m) {
                            double arg = wt[m] * static_cast<double>(tt) +
                                         wh[m] * static_cast<double>(hh) +
                                         ww[m] * static_cast<double>(ws) + ph[m] +
                                         chshift[m] * static_cast<double>(c);
                            if (jump_t >= 0 && tt >= jump_t) arg += jump_shift[m];
                            v += amp[m] * std::sin(arg);
                        }
                        t(tt, hh, ws, c) = static_cast<float>(v);
                    }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace vtc
