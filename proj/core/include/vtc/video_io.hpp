// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vtc/frame.hpp"

namespace vtc {

/// Container-level metadata for a video file.
struct VideoInfo {
    std::int64_t frame_count = 0;
    double fps = 0.0;
    int height = 0;
    int width = 0;
};

/// Probe a video without decoding frames. Throws DecodeError if the file
/// cannot be opened as a video.
VideoInfo probe_video(const std::string& path);

/// Decode a video resampled to `target_fps` (nearest source frame per tick,
/// see resample_nearest). target_fps <= 0 keeps the native rate. Throws
/// DecodeError on unreadable files and EmptyInputError on zero-frame videos.
FrameSequence decode_video(const std::string& path, double target_fps);

/// Encode RGB frames to a video file (MJPG in an .avi container). Used by
/// fixtures and round-trip tests. Throws DecodeError if the writer cannot
/// be opened or frames are empty/mismatched.
void write_video(const std::string& path, const std::vector<Image>& frames, double fps);

}  // namespace vtc
