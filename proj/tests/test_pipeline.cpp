// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vtc/baselines.hpp"
#include "vtc/errors.hpp"
#include "vtc/nn.hpp"
#include "vtc/pipeline.hpp"
#include "vtc/tensor_io.hpp"
#include "vtc/video_io.hpp"

using vtc::Tensor4f;

namespace {

std::string make_fixture_video(const testutil::TempDir& tmp, std::uint64_t seed) {
    const auto sv = vtc::synth_shot_video(4, 2.0, 10.0, seed);
    const std::string path = tmp.file("clip.avi");
    vtc::write_video(path, sv.seq.frames, sv.seq.fps);
    return path;
}

}  // namespace

TEST_CASE("video io: write, probe, decode round-trip") {
    testutil::TempDir tmp;
    const auto sv = vtc::synth_shot_video(3, 1.0, 10.0, 1);
    const std::string path = tmp.file("v.avi");
    vtc::write_video(path, sv.seq.frames, 10.0);

    const vtc::VideoInfo info = vtc::probe_video(path);
    CHECK(info.frame_count == static_cast<std::int64_t>(sv.seq.frames.size()));
    CHECK(info.fps == doctest::Approx(10.0));
    CHECK(info.height == 48);
    CHECK(info.width == 64);

    const vtc::FrameSequence native = vtc::decode_video(path, 0.0);
    CHECK(native.frames.size() == sv.seq.frames.size());
    CHECK(native.fps == doctest::Approx(10.0));
    CHECK(native.frames[0].height == 48);
    CHECK(!native.source_id.empty());
    // Decoding is deterministic even though the codec is lossy.
    const vtc::FrameSequence again = vtc::decode_video(path, 0.0);
    for (std::size_t i = 0; i < native.frames.size(); ++i)
        CHECK(native.frames[i].data == again.frames[i].data);
    // Lossy, but solid-color shots survive roughly: mean error stays small.
    double err = 0.0;
    for (std::size_t i = 0; i < native.frames[0].data.size(); ++i)
        err += std::abs(int(native.frames[0].data[i]) - int(sv.seq.frames[0].data[i]));
    CHECK(err / double(native.frames[0].data.size()) < 16.0);

    const vtc::FrameSequence half = vtc::decode_video(path, 5.0);
    CHECK(half.frames.size() == native.frames.size() / 2);
    CHECK(half.fps == doctest::Approx(5.0));

    CHECK_THROWS_AS(vtc::decode_video(tmp.file("missing.avi"), 0.0), vtc::DecodeError);
}

TEST_CASE("projector_stub: shapes, determinism, token flattening") {
    vtc::ProjectorConfig cfg;
    cfg.llm_dim = 7;
    cfg.seed = 3;
    const auto proj = vtc::projector_stub(5, cfg);
    CHECK(proj.w1.dims() == std::array<std::int64_t, 4>{1, 1, 5, 7});
    CHECK(proj.w2.dims() == std::array<std::int64_t, 4>{1, 1, 7, 7});

    const auto latent = oracle::random_tensor<float>({2, 2, 3, 5}, 4);
    const auto tokens = vtc::project_tokens(latent, proj);
    CHECK(tokens.dims() == std::array<std::int64_t, 4>{1, 1, 12, 7});

    // Tokens are each latent channel vector through linear-silu-linear.
    Tensor4f flat({1, 1, 12, 5});
    std::copy(latent.data(), latent.data() + latent.numel(), flat.data());
    const Tensor4f want =
        vtc::nn::pointwise(vtc::nn::silu(vtc::nn::pointwise(flat, proj.w1, proj.b1)), proj.w2,
                           proj.b2);
    CHECK(vtc::max_abs_diff(tokens, want) == 0.0f);

    const auto proj2 = vtc::projector_stub(5, cfg);
    CHECK(vtc::max_abs_diff(proj.w1, proj2.w1) == 0.0f);
    CHECK_THROWS_AS(vtc::project_tokens(oracle::random_tensor<float>({1, 1, 1, 4}, 0), proj),
                    vtc::ShapeError);
}

TEST_CASE("run_pipeline: files written, manifest self-consistent, deterministic") {
    testutil::TempDir tmp;
    const std::string video = make_fixture_video(tmp, 6);

    vtc::PipelineInputs in;
    in.video_path = video;
    in.sampler.budget = 8;
    in.encoder.patch_px = 8;
    in.encoder.channels = 16;
    in.compressor.channels_d = 16;
    in.compressor.strides = vtc::strides_for_ratio(2, 2, 2);
    in.projector.llm_dim = 32;

    const std::string out1 = (tmp.path / "run1").string();
    const nlohmann::json m1 = vtc::run_pipeline(in, out1);

    namespace fs = std::filesystem;
    for (const char* name : {"manifest.json", "sample_manifest.json", "features.bin",
                             "latent.bin", "tokens.bin", "checkpoint.ckpt"})
        CHECK(fs::exists(fs::path(out1) / name));

    // Token accounting: 8 frames, 6x8 patch grid, ratio 2*2*2.
    CHECK(m1.at("tokens_in") == 8 * 6 * 8);
    CHECK(m1.at("compression_ratio") == 8);
    CHECK(m1.at("tokens_out") == 8 * 6 * 8 / 8);
    CHECK(m1.at("sampling").at("indices").size() == 8);
    CHECK(m1.at("projector_dims") == nlohmann::json({48, 32}));
    const Tensor4f latent = vtc::load_features((fs::path(out1) / "latent.bin").string());
    CHECK(latent.dim(0) * latent.dim(1) * latent.dim(2) == 48);
    const Tensor4f tokens = vtc::load_features((fs::path(out1) / "tokens.bin").string());
    CHECK(tokens.dims() == std::array<std::int64_t, 4>{1, 1, 48, 32});

    const std::string out2 = (tmp.path / "run2").string();
    vtc::run_pipeline(in, out2);
    CHECK(testutil::slurp((fs::path(out1) / "manifest.json").string()) ==
          testutil::slurp((fs::path(out2) / "manifest.json").string()));
    CHECK(testutil::slurp((fs::path(out1) / "features.bin").string()) ==
          testutil::slurp((fs::path(out2) / "features.bin").string()));

    // A supplied checkpoint is used instead of fresh init.
    vtc::PipelineInputs in2 = in;
    in2.checkpoint_path = (fs::path(out1) / "checkpoint.ckpt").string();
    const std::string out3 = (tmp.path / "run3").string();
    const nlohmann::json m3 = vtc::run_pipeline(in2, out3);
    CHECK(m3.at("checkpoint_id") == m1.at("checkpoint_id"));
    CHECK(!fs::exists(fs::path(out3) / "checkpoint.ckpt"));
}

TEST_CASE("run_pipeline: stage tags on failure") {
    testutil::TempDir tmp;
    vtc::PipelineInputs in;
    in.video_path = tmp.file("absent.avi");
    try {
        vtc::run_pipeline(in, (tmp.path / "out").string());
        FAIL("expected DecodeError");
    } catch (const vtc::Error& e) {
        CHECK(std::string(e.what()).rfind("[decode]", 0) == 0);
    }
}

TEST_CASE("eval results: json and csv round-trips") {
    vtc::EvalResult a;
    a.method = "residual_compressor";
    a.config_label = "4x4x4";
    a.tokens_in = 18432;
    a.tokens_out = 288;
    a.reconstruction_mae = 0.125;
    a.runtime_seconds = 1.5;
    vtc::EvalResult b;
    b.method = "adaptive_sampler";
    b.config_label = "k=8";
    b.tokens_in = 400;
    b.tokens_out = 8;
    b.boundary_recall = 1.0;
    b.runtime_seconds = 0.25;

    const vtc::EvalResult a2 = vtc::eval_result_from_json(vtc::eval_result_to_json(a));
    CHECK(a2.method == a.method);
    CHECK(a2.reconstruction_mae == a.reconstruction_mae);
    CHECK(!a2.boundary_recall.has_value());

    const std::string csv = vtc::render_csv({a, b});
    const auto rows = vtc::parse_eval_csv(csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].method == "residual_compressor");
    CHECK(rows[0].reconstruction_mae == 0.125);
    CHECK(!rows[0].boundary_recall.has_value());
    CHECK(rows[1].boundary_recall == 1.0);
    CHECK(rows[1].tokens_in == 400);
    CHECK(vtc::render_csv(rows) == csv);

    CHECK_THROWS_AS(vtc::parse_eval_csv("not,a,header\n"), vtc::FormatError);
}

TEST_CASE("render_markdown: one section per populated table") {
    vtc::EvalResult a;
    a.method = "avgpool_baseline";
    a.config_label = "2x2x2";
    a.reconstruction_mae = 0.5;
    nlohmann::json run = {
        {"config", {{"compressor", {{"latent_constraint", "avgpool_residual"}}}}},
        {"losses", {1.0, 0.9, 0.8}},
        {"diverged", false},
    };
    const std::string md = vtc::render_markdown({a}, {run});
    CHECK(md.find("## Compression") != std::string::npos);
    CHECK(md.find("avgpool_baseline") != std::string::npos);
    CHECK(md.find("## Pretraining runs") != std::string::npos);
    CHECK(md.find("avgpool_residual") != std::string::npos);
    CHECK(md.find("## Frame sampling") == std::string::npos);
}
