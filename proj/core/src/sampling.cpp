// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include "vtc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vtc/errors.hpp"

namespace vtc {

std::array<double, 512> color_histogram(const Image& image) {
    std::array<double, 512> hist{};
    const std::size_t n_px = image.data.size() / 3;
    if (n_px == 0) return hist;
    for (std::size_t i = 0; i < n_px; ++i) {
        const int r = image.data[i * 3 + 0] >> 5;
        const int g = image.data[i * 3 + 1] >> 5;
        const int b = image.data[i * 3 + 2] >> 5;
        hist[static_cast<std::size_t>((r * 8 + g) * 8 + b)] += 1.0;
    }
    for (double& v : hist) v /= static_cast<double>(n_px);
    return hist;
}

double histogram_distance(const std::array<double, 512>& a, const std::array<double, 512>& b) {
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
    return l1 / 2.0;
}

std::vector<double> histogram_diff_scorer(const FrameSequence& seq) {
    if (seq.frames.empty()) throw EmptyInputError("score_boundaries: empty frame sequence");
    std::vector<double> scores(seq.frames.size(), 0.0);
    std::array<double, 512> prev = color_histogram(seq.frames[0]);
    for (std::size_t i = 1; i < seq.frames.size(); ++i) {
        std::array<double, 512> cur = color_histogram(seq.frames[i]);
        scores[i] = histogram_distance(prev, cur);
        prev = cur;
    }
    return scores;
}

std::vector<double> score_boundaries(const FrameSequence& seq) {
    return histogram_diff_scorer(seq);
}

std::int64_t nms_radius(double window_seconds, double fps) {
    if (window_seconds < 0 || fps <= 0)
        throw ConfigError("nms_radius: window must be >= 0 and fps > 0");
    return std::llround(window_seconds * fps);
}

std::vector<double> nms_1d(const std::vector<double>& scores, std::int64_t radius) {
    if (radius < 0) throw ConfigError("nms_1d: radius must be >= 0");
    std::vector<double> remaining = scores;
    std::vector<double> kept(scores.size(), 0.0);
    const std::int64_t n = static_cast<std::int64_t>(scores.size());
    for (;;) {
        std::int64_t best = -1;
        double best_score = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            if (remaining[static_cast<std::size_t>(i)] > best_score) {
                best_score = remaining[static_cast<std::size_t>(i)];
                best = i;
            }
        }
        if (best < 0) break;  // only zeros (or nothing) left
        kept[static_cast<std::size_t>(best)] = best_score;
        const std::int64_t lo = std::max<std::int64_t>(0, best - radius);
        const std::int64_t hi = std::min<std::int64_t>(n - 1, best + radius);
        for (std::int64_t i = lo; i <= hi; ++i) remaining[static_cast<std::size_t>(i)] = 0.0;
    }
    return kept;
}

std::vector<std::int64_t> select_top_k(const std::vector<double>& scores, std::int64_t k) {
    if (k < 1) throw ConfigError("select_top_k: k must be >= 1");
    std::vector<std::int64_t> order;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] > 0.0) order.push_back(static_cast<std::int64_t>(i));
    std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        const double sa = scores[static_cast<std::size_t>(a)];
        const double sb = scores[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;  // ties resolve to the lower index
    });
    if (static_cast<std::int64_t>(order.size()) > k) order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<std::int64_t> uniform_sample(const FrameSequence& seq, std::int64_t k) {
    return uniform_sample(static_cast<std::int64_t>(seq.frames.size()), k);
}

std::vector<std::int64_t> uniform_sample(std::int64_t n, std::int64_t k) {
    if (n < 1) throw EmptyInputError("uniform_sample: n must be >= 1");
    if (k < 1) throw ConfigError("uniform_sample: k must be >= 1");
    std::vector<std::int64_t> out;
    for (std::int64_t i = 0; i < k; ++i) {
        const std::int64_t idx = i * n / k;
        if (out.empty() || out.back() != idx) out.push_back(idx);
    }
    return out;
}

std::vector<std::int64_t> uniform_fill(const std::vector<std::int64_t>& selected, std::int64_t k,
                                       std::int64_t n) {
    if (n < 1) throw EmptyInputError("uniform_fill: n must be >= 1");
    if (k < 1) throw ConfigError("uniform_fill: k must be >= 1");
    const std::int64_t target = std::min(k, n);
    if (static_cast<std::int64_t>(selected.size()) >= target) return selected;

    std::vector<std::int64_t> grid;
    for (std::int64_t i = 0; i < k; ++i) {
        const std::int64_t g = i * n / k;
        if (grid.empty() || grid.back() != g) grid.push_back(g);
    }
    // Each selected index claims its nearest uncovered grid slot (ties to
    // the lower slot), so fills go where the selection left real gaps.
    std::vector<bool> covered(grid.size(), false);
    for (const std::int64_t s : selected) {
        std::int64_t best_slot = -1;
        std::int64_t best_dist = std::numeric_limits<std::int64_t>::max();
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            if (covered[gi]) continue;
            const std::int64_t d = std::abs(grid[gi] - s);
            if (d < best_dist) {
                best_dist = d;
                best_slot = static_cast<std::int64_t>(gi);
            }
        }
        if (best_slot >= 0) covered[static_cast<std::size_t>(best_slot)] = true;
    }

    std::vector<std::int64_t> result = selected;
    std::sort(result.begin(), result.end());
    const auto in_result = [&result](std::int64_t v) {
        return std::binary_search(result.begin(), result.end(), v);
    };
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        if (static_cast<std::int64_t>(result.size()) >= target) break;
        if (covered[gi]) continue;
        std::int64_t pick = -1;
        // Nearest unselected index to the slot, preferring the lower one.
        for (std::int64_t off = 0; off < n; ++off) {
            const std::int64_t lo = grid[gi] - off;
            const std::int64_t hi = grid[gi] + off;
            if (lo >= 0 && !in_result(lo)) {
                pick = lo;
                break;
            }
            if (hi < n && !in_result(hi)) {
                pick = hi;
                break;
            }
        }
        if (pick >= 0) {
            result.insert(std::upper_bound(result.begin(), result.end(), pick), pick);
        }
    }
    return result;
}

std::vector<std::int64_t> select_indices(const std::vector<double>& scores, std::int64_t radius,
                                         std::int64_t k, FillPolicy fill) {
    if (scores.empty()) throw EmptyInputError("select_indices: empty score array");
    const std::vector<double> peaks = nms_1d(scores, radius);
    std::vector<std::int64_t> chosen = select_top_k(peaks, k);
    if (fill == FillPolicy::uniform_fill)
        chosen = uniform_fill(chosen, k, static_cast<std::int64_t>(scores.size()));
    return chosen;
}

SampleOutcome sample_video_frames(const FrameSequence& seq, const SamplerConfig& cfg,
                                  const std::vector<double>* external_scores) {
    if (seq.frames.empty()) throw EmptyInputError("sample_video_frames: empty frame sequence");
    if (cfg.budget < 1) throw ConfigError("sample_video_frames: budget must be >= 1");
    if (seq.fps <= 0) throw ConfigError("sample_video_frames: sequence fps must be positive");

    // Detector-rate view of the sequence (identity when rates already match).
    const std::vector<std::int64_t> view =
        resample_nearest(seq.timestamps, seq.fps, cfg.detector_fps);

    std::vector<double> scores;
    if (external_scores) {
        if (external_scores->size() != view.size())
            throw FormatError("external scores: expected " + std::to_string(view.size()) +
                              " entries at detector rate, got " +
                              std::to_string(external_scores->size()));
        scores = *external_scores;
        for (std::size_t i = 0; i < scores.size(); ++i)
            if (!std::isfinite(scores[i]) || scores[i] < 0.0 || scores[i] > 1.0)
                throw FormatError("external score out of [0,1] at frame " + std::to_string(i));
    } else {
        FrameSequence det;
        det.fps = cfg.detector_fps;
        det.frames.reserve(view.size());
        for (const std::int64_t v : view)
            det.frames.push_back(seq.frames[static_cast<std::size_t>(v)]);
        scores = score_boundaries(det);
    }

    const std::int64_t radius = nms_radius(cfg.nms_window_seconds, cfg.detector_fps);
    const std::vector<double> peaks = nms_1d(scores, radius);
    std::vector<std::int64_t> chosen = select_top_k(peaks, cfg.budget);
    if (cfg.fill == FillPolicy::uniform_fill)
        chosen = uniform_fill(chosen, cfg.budget, static_cast<std::int64_t>(scores.size()));

    SampleOutcome out;
    out.indices.reserve(chosen.size());
    out.peak_scores.reserve(chosen.size());
    for (const std::int64_t det_idx : chosen) {
        std::int64_t native = view[static_cast<std::size_t>(det_idx)];
        if (!seq.source_indices.empty())
            native = seq.source_indices[static_cast<std::size_t>(native)];
        out.indices.push_back(native);
        out.peak_scores.push_back(peaks[static_cast<std::size_t>(det_idx)]);
    }
    return out;
}

std::vector<std::int64_t> adaptive_sample(const FrameSequence& seq, const SamplerConfig& cfg,
                                          const std::vector<double>* external_scores) {
    return sample_video_frames(seq, cfg, external_scores).indices;
}

std::vector<double> load_scores(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open score file: " + path);
    std::vector<double> scores;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        double v = 0.0;
        if (!(ls >> v))
            throw FormatError("score file " + path + ": unparsable line " +
                              std::to_string(line_no));
        std::string rest;
        if (ls >> rest)
            throw FormatError("score file " + path + ": trailing content on line " +
                              std::to_string(line_no));
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw FormatError("score file " + path + ": value out of [0,1] on line " +
                              std::to_string(line_no));
        scores.push_back(v);
    }
    return scores;
}

}  // namespace vtc
