// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: boundary scoring, NMS, pooling, and
// the factorized convolution stack.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "vtc/baselines.hpp"
#include "vtc/compressor.hpp"
#include "vtc/frame.hpp"
#include "vtc/nn.hpp"
#include "vtc/sampling.hpp"
#include "vtc/tensor.hpp"

namespace {

using vtc::Tensor4f;

Tensor4f random_tensor(std::int64_t t, std::int64_t h, std::int64_t w, std::int64_t c,
                       std::uint64_t seed) {
    Tensor4f x({t, h, w, c});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (std::int64_t i = 0; i < x.numel(); ++i) x.data()[i] = dist(rng);
    return x;
}

void bm_histogram_scorer(benchmark::State& state) {
    const auto sv = vtc::synth_shot_video(8, 5.0, 10.0, 0);
    for (auto _ : state) {
        auto scores = vtc::histogram_diff_scorer(sv.seq);
        benchmark::DoNotOptimize(scores.data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(sv.seq.frames.size()));
}
BENCHMARK(bm_histogram_scorer)->Unit(benchmark::kMillisecond);

void bm_nms_1d(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    std::mt19937_64 rng(1);
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (double& v : scores) v = 0.1 * static_cast<double>(rng() % 11);
    for (auto _ : state) {
        auto kept = vtc::nms_1d(scores, 30);
        benchmark::DoNotOptimize(kept.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_nms_1d)->Arg(400)->Arg(4000)->Arg(40000);

void bm_avgpool3d(benchmark::State& state) {
    const Tensor4f f = random_tensor(16, 16, 16, 64, 2);
    for (auto _ : state) {
        auto h = vtc::avgpool3d(f, 4, 4, 4);
        benchmark::DoNotOptimize(h.data());
    }
    state.SetItemsProcessed(state.iterations() * f.numel());
}
BENCHMARK(bm_avgpool3d);

void bm_conv2d_spatial(benchmark::State& state) {
    const Tensor4f x = random_tensor(8, 16, 16, 64, 3);
    Tensor4f w({3, 3, 64, 16});
    Tensor4f b({1, 1, 1, 16});
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<float> dist(-0.05f, 0.05f);
    for (std::int64_t i = 0; i < w.numel(); ++i) w.data()[i] = dist(rng);
    for (std::int64_t i = 0; i < b.numel(); ++i) b.data()[i] = dist(rng);
    for (auto _ : state) {
        auto y = vtc::nn::conv2d_spatial(x, w, b, 2, 2);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(bm_conv2d_spatial)->Unit(benchmark::kMillisecond);

void bm_compress_forward(benchmark::State& state) {
    vtc::CompressorConfig cfg;
    cfg.channels_d = 64;
    const auto params = vtc::init_params(cfg, 0);
    const Tensor4f f = random_tensor(8, 16, 16, 64, 5);
    for (auto _ : state) {
        auto h = vtc::residual_compress(f, params);
        benchmark::DoNotOptimize(h.data());
    }
}
BENCHMARK(bm_compress_forward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
