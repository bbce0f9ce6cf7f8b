// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vtc/compressor.hpp"
#include "vtc/frame.hpp"
#include "vtc/tensor.hpp"

namespace vtc {

/// One row of an evaluation table: a method at a config, with whichever
/// metrics apply (MAE for compression evals, recall for sampling evals).
struct EvalResult {
    std::string method;
    std::string config_label;
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;
    std::optional<double> reconstruction_mae;
    std::optional<double> boundary_recall;
    double runtime_seconds = 0.0;
};

/// Average-pooling compression baseline; same arithmetic as avgpool3d,
/// reported under its own method id.
Tensor4f avgpool_baseline(const Tensor4f& f, std::int64_t rt, std::int64_t rh, std::int64_t rw);

/// Reference decoder for pooled latents: nearest-neighbor replication of
/// each latent value over its (rt, rh, rw) window. A learned decoder that
/// beats MAE(f, upsample(pool(f))) demonstrably retains residual structure.
Tensor4f upsample_reconstruction(const Tensor4f& h, std::int64_t rt, std::int64_t rh,
                                 std::int64_t rw);

/// Fraction of true cut indices having a selected index within +-tol_frames.
/// Throws EmptyInputError when truth is empty (recall undefined).
double boundary_recall(const std::vector<std::int64_t>& selected,
                       const std::vector<std::int64_t>& truth_cuts, std::int64_t tol_frames);

/// Synthetic shot video plus ground-truth cut indices. Each shot renders a
/// distinct random solid color with per-pixel noise; cuts are the first
/// frame of each shot after the first. shot_len_jitter scales each shot's
/// length by a uniform factor in [1 - jitter, 1 + jitter] (0 keeps every
/// shot at exactly shot_len_s).
struct ShotVideo {
    FrameSequence seq;
    std::vector<std::int64_t> cuts;
};
ShotVideo synth_shot_video(std::int64_t n_shots, double shot_len_s, double fps,
                           std::uint64_t seed, double shot_len_jitter = 0.0, int height = 48,
                           int width = 64);

/// Deterministic synthetic feature tensors for desk-scale pretraining:
/// smooth mixtures of low-frequency spatiotemporal sinusoids, with a
/// mid-sequence regime jump in roughly half the tensors so pooling loses
/// recoverable structure. Values lie in [-1, 1].
std::vector<Tensor4f> synth_feature_dataset(std::int64_t n,
                                            const std::array<std::int64_t, 4>& dims,
                                            std::uint64_t seed);

}  // namespace vtc
