// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vtc {

/// One decoded frame: packed H x W x 3 RGB, 8 bits per channel.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;  // height * width * 3, row-major

    Image() = default;
    Image(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0) {}

    std::uint8_t& at(int h, int w, int c) {
        return data[(static_cast<std::size_t>(h) * width + w) * 3 + c];
    }
    std::uint8_t at(int h, int w, int c) const {
        return data[(static_cast<std::size_t>(h) * width + w) * 3 + c];
    }
};

/// Frames decoded from a video at a fixed sampling rate.
/// Invariants: timestamps strictly increasing, one per frame; all frames
/// share identical pixel dimensions.
struct FrameSequence {
    std::vector<Image> frames;
    double fps = 0.0;                          // effective sampling rate used
    std::vector<double> timestamps;            // seconds, one per frame
    std::vector<std::int64_t> source_indices;  // frame index in the source stream
    std::string source_id;                     // opaque origin tag (e.g. file stem)
};

/// Pick source frames for resampling to `target_fps`.
///
/// Sample ticks are laid at j / target_fps for j = 0, 1, ... while the tick
/// falls inside the source duration (last timestamp plus one source frame
/// period). Each tick takes the nearest source timestamp, ties resolving to
/// the earlier frame, and runs of consecutive ticks that land on the same
/// source frame are collapsed to one. A one-frame source therefore yields
/// exactly one pick for any target rate.
std::vector<std::int64_t> resample_nearest(const std::vector<double>& source_timestamps,
                                           double source_fps, double target_fps);

}  // namespace vtc
