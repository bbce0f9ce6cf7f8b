// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include "vtc/video_io.hpp"

#include <algorithm>
#include <filesystem>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>

#include "vtc/errors.hpp"

namespace vtc {

namespace {

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

Image to_image(const cv::Mat& bgr) {
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    Image im(rgb.rows, rgb.cols);
    for (int r = 0; r < rgb.rows; ++r) {
        const unsigned char* row = rgb.ptr<unsigned char>(r);
        std::copy(row, row + static_cast<std::size_t>(rgb.cols) * 3,
                  im.data.begin() + static_cast<std::ptrdiff_t>(r) * rgb.cols * 3);
    }
    return im;
}

}  // namespace

VideoInfo probe_video(const std::string& path) {
    cv::VideoCapture cap(path);
    if (!cap.isOpened()) throw DecodeError("cannot open video: " + path);
    VideoInfo info;
    info.frame_count = static_cast<std::int64_t>(cap.get(cv::CAP_PROP_FRAME_COUNT));
    info.fps = cap.get(cv::CAP_PROP_FPS);
    info.height = static_cast<int>(cap.get(cv::CAP_PROP_FRAME_HEIGHT));
    info.width = static_cast<int>(cap.get(cv::CAP_PROP_FRAME_WIDTH));
    return info;
}

FrameSequence decode_video(const std::string& path, double target_fps) {
    cv::VideoCapture cap(path);
    if (!cap.isOpened()) throw DecodeError("cannot open video: " + path);
    const double native_fps = cap.get(cv::CAP_PROP_FPS);
    if (native_fps <= 0) throw DecodeError("video reports no frame rate: " + path);

    std::vector<Image> native;
    cv::Mat frame;
    while (cap.read(frame)) native.push_back(to_image(frame));
    if (native.empty()) throw EmptyInputError("video has no frames: " + path);

    std::vector<double> native_ts(native.size());
    for (std::size_t i = 0; i < native.size(); ++i)
        native_ts[i] = static_cast<double>(i) / native_fps;

    FrameSequence seq;
    seq.source_id = file_stem(path);
    if (target_fps <= 0) {
        seq.fps = native_fps;
        seq.frames = std::move(native);
        seq.timestamps = std::move(native_ts);
        seq.source_indices.resize(seq.frames.size());
        for (std::size_t i = 0; i < seq.frames.size(); ++i)
            seq.source_indices[i] = static_cast<std::int64_t>(i);
        return seq;
    }

    const std::vector<std::int64_t> picks = resample_nearest(native_ts, native_fps, target_fps);
    seq.fps = target_fps;
    for (const std::int64_t p : picks) {
        seq.frames.push_back(native[static_cast<std::size_t>(p)]);
        seq.timestamps.push_back(native_ts[static_cast<std::size_t>(p)]);
        seq.source_indices.push_back(p);
    }
    return seq;
}

void write_video(const std::string& path, const std::vector<Image>& frames, double fps) {
    if (frames.empty()) throw DecodeError("write_video: no frames");
    if (fps <= 0) throw DecodeError("write_video: fps must be positive");
    const int h = frames[0].height;
    const int w = frames[0].width;
    cv::VideoWriter writer(path, cv::VideoWriter::fourcc('M', 'J', 'P', 'G'), fps,
                           cv::Size(w, h));
    if (!writer.isOpened()) throw DecodeError("cannot open video writer: " + path);
    cv::Mat rgb(h, w, CV_8UC3);
    for (const Image& im : frames) {
        if (im.height != h || im.width != w)
            throw DecodeError("write_video: frames differ in pixel dimensions");
        std::copy(im.data.begin(), im.data.end(), rgb.data);
        cv::Mat bgr;
        cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
        writer.write(bgr);
    }
}

}  // namespace vtc
