// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include "vtc/frame.hpp"

#include <algorithm>
#include <cmath>

#include "vtc/errors.hpp"

namespace vtc {

std::vector<std::int64_t> resample_nearest(const std::vector<double>& source_timestamps,
                                           double source_fps, double target_fps) {
    if (source_timestamps.empty()) throw EmptyInputError("resample_nearest: no source frames");
    if (source_fps <= 0 || target_fps <= 0)
        throw ConfigError("resample_nearest: frame rates must be positive");
    const double first = source_timestamps.front();
    const double duration = source_timestamps.back() - first + 1.0 / source_fps;
    std::vector<std::int64_t> picks;
    const double end = first + duration - 1e-9;
    for (std::int64_t j = 0;; ++j) {
        const double tick = first + static_cast<double>(j) / target_fps;
        if (tick >= end) break;
        auto it = std::lower_bound(source_timestamps.begin(), source_timestamps.end(), tick);
        std::int64_t idx;
        if (it == source_timestamps.end()) {
            idx = static_cast<std::int64_t>(source_timestamps.size()) - 1;
        } else {
            idx = it - source_timestamps.begin();
            if (idx > 0) {
                const double d_here = *it - tick;
                const double d_prev = tick - source_timestamps[static_cast<std::size_t>(idx - 1)];
                if (d_prev <= d_here) idx -= 1;  // ties resolve to the earlier frame
            }
        }
        if (picks.empty() || picks.back() != idx) picks.push_back(idx);
    }
    return picks;
}

}  // namespace vtc
