// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vtc/frame.hpp"

namespace vtc {

/// Which boundary scorer feeds the sampler.
enum class ScorerId {
    histogram,  // built-in color-histogram differencer
    external,   // precomputed per-frame scores loaded from a file
};

/// What to do when fewer than k peaks survive suppression.
enum class FillPolicy {
    uniform_fill,  // pad with evenly spaced indices (default)
    truncate,      // return only the surviving peaks
};

/// Information-density adaptive sampler settings.
struct SamplerConfig {
    double detector_fps = 10.0;       // decode rate fed to the boundary scorer
    double nms_window_seconds = 3.0;  // suppression window around each kept peak
    std::int64_t budget = 32;         // number of frames to select (k)
    ScorerId scorer = ScorerId::histogram;
    FillPolicy fill = FillPolicy::uniform_fill;
};

/// Joint 8x8x8 RGB color histogram, normalized to sum to 1 over 512 cells.
std::array<double, 512> color_histogram(const Image& image);

/// Half the L1 distance between two normalized histograms; in [0, 1], and
/// exactly 1 for images with disjoint color occupancy.
double histogram_distance(const std::array<double, 512>& a, const std::array<double, 512>& b);

/// Built-in boundary scorer: score[0] = 0, score[i] = histogram distance
/// between frame i-1 and frame i. Scores lie in [0, 1].
std::vector<double> histogram_diff_scorer(const FrameSequence& seq);

/// Boundary score per frame via the built-in histogram scorer (external
/// scores are injected at the sampling stage instead).
std::vector<double> score_boundaries(const FrameSequence& seq);

/// Suppression radius in frames for a time window at a sampling rate:
/// round-half-up of window_seconds * fps, never negative.
std::int64_t nms_radius(double window_seconds, double fps);

/// Greedy 1-D non-maximum suppression. Repeatedly keeps the highest
/// remaining score (ties to the lower index) and zeroes every other entry
/// within `radius` of it. Returns the suppressed score vector: kept peaks
/// retain their score, everything else is 0.
std::vector<double> nms_1d(const std::vector<double>& scores, std::int64_t radius);

/// Indices of the k highest strictly-positive scores (ties to the lower
/// index), returned in ascending index order. Fewer than k positive scores
/// yield a shorter vector.
std::vector<std::int64_t> select_top_k(const std::vector<double>& scores, std::int64_t k);

/// Pad `selected` (ascending, unique, values in [0, n)) up to min(k, n)
/// indices by covering a uniform grid g_i = floor(i * n / k). Each already
/// selected index claims the nearest uncovered grid slot (ties to the lower
/// slot); remaining slots are filled at their grid position, displaced to
/// the nearest unused index when taken. Result is ascending and unique.
std::vector<std::int64_t> uniform_fill(const std::vector<std::int64_t>& selected, std::int64_t k,
                                       std::int64_t n);

/// Uniform-grid baseline selection: floor(i * n / k) for i in [0, k),
/// deduplicated (so at most n indices).
std::vector<std::int64_t> uniform_sample(std::int64_t n, std::int64_t k);

/// Same baseline over decoded frames (always includes index 0).
std::vector<std::int64_t> uniform_sample(const FrameSequence& seq, std::int64_t k);

/// Full selection on precomputed scores: NMS at `radius`, top-k, then the
/// fill policy up to min(k, n). Throws EmptyInputError when scores is empty.
std::vector<std::int64_t> select_indices(const std::vector<double>& scores, std::int64_t radius,
                                         std::int64_t k, FillPolicy fill = FillPolicy::uniform_fill);

/// Selection plus the evidence behind it, for manifests.
struct SampleOutcome {
    std::vector<std::int64_t> indices;  // source-video frame indices, ascending
    std::vector<double> peak_scores;    // suppressed score per index (0 for fills)
};

/// Full sampling stage: resample `seq` to cfg.detector_fps, score (built-in
/// histogram scorer, or `external_scores` at detector rate when given),
/// suppress, select, fill, then map detector positions back to source-video
/// frame indices via the sequence's source mapping.
SampleOutcome sample_video_frames(const FrameSequence& seq, const SamplerConfig& cfg,
                                  const std::vector<double>* external_scores = nullptr);

/// Score + select on decoded frames using the config (radius derived from
/// nms_window_seconds at seq.fps). Positions are mapped back to source-video
/// frame indices through seq.source_indices when present.
std::vector<std::int64_t> adaptive_sample(const FrameSequence& seq, const SamplerConfig& cfg,
                                          const std::vector<double>* external_scores = nullptr);

/// Read one score per line ([0,1], UTF-8 text). Throws FormatError on
/// unparsable lines or out-of-range values.
std::vector<double> load_scores(const std::string& path);

}  // namespace vtc
