// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "vtc/frame.hpp"
#include "vtc/tensor.hpp"

namespace vtc {

/// Frozen toy visual encoder: a fixed seeded random linear projection of
/// normalized patch pixels. Stands in for a large pretrained ViT; real
/// features can enter the pipeline through load_features instead.
struct EncoderConfig {
    int patch_px = 16;                 // square patch edge; must divide frame dims
    std::int64_t channels = 64;        // feature channels per patch (C)
    std::uint64_t projection_seed = 0; // seeds the frozen projection matrix
};

/// Map frames to a T x H x W x C feature tensor. Each frame is split into an
/// (height/patch_px) x (width/patch_px) grid; each patch's pixels, scaled to
/// [0, 1], are flattened and multiplied by a projection matrix drawn once
/// from a unit normal scaled by 1/sqrt(patch_px^2 * 3). No bias, so the map
/// is linear in the pixels and deterministic given the seed. Throws
/// ConfigError when patch_px does not divide the frame dimensions, and
/// EmptyInputError on an empty sequence.
Tensor4f extract_features(const FrameSequence& frames, const EncoderConfig& cfg);

/// The projection matrix itself (patch_px^2*3 rows, channels columns),
/// exposed so tests can cross-check extract_features by direct multiply.
std::vector<float> projection_matrix(const EncoderConfig& cfg);

}  // namespace vtc
