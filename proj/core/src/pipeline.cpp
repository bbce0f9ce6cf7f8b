// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include "vtc/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include "vtc/nn.hpp"
#include "vtc/tensor_io.hpp"
#include "vtc/video_io.hpp"

namespace vtc {

namespace {

/// Run one pipeline stage, tagging any error with the stage name.
template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(std::string("[") + stage + "] " + e.what());
    }
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
}

}  // namespace

ProjectorParams projector_stub(std::int64_t in_dim, const ProjectorConfig& cfg) {
    if (in_dim < 1 || cfg.llm_dim < 1)
        throw ConfigError("projector: dimensions must be >= 1");
    ProjectorParams p;
    p.in_dim = in_dim;
    p.llm_dim = cfg.llm_dim;
    std::mt19937_64 rng(cfg.seed);
    const auto init = [&rng](Tensor4f& t, std::int64_t fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> ud(-bound, bound);
        for (std::int64_t i = 0; i < t.numel(); ++i)
            t.data()[i] = static_cast<float>(ud(rng));
    };
    p.w1 = Tensor4f({1, 1, in_dim, cfg.llm_dim});
    p.b1 = Tensor4f({1, 1, 1, cfg.llm_dim});
    p.w2 = Tensor4f({1, 1, cfg.llm_dim, cfg.llm_dim});
    p.b2 = Tensor4f({1, 1, 1, cfg.llm_dim});
    init(p.w1, in_dim);
    init(p.b1, in_dim);
    init(p.w2, cfg.llm_dim);
    init(p.b2, cfg.llm_dim);
    return p;
}

Tensor4f project_tokens(const Tensor4f& latent, const ProjectorParams& proj) {
    if (latent.dim(3) != proj.in_dim)
        throw ShapeError("projector: latent channels do not match projector input dim");
    const std::int64_t n_tokens = latent.dim(0) * latent.dim(1) * latent.dim(2);
    // (t, h, w, c) flattens to (tokens, c) without copying semantics: the
    // storage layout is identical.
    Tensor4f flat({1, 1, n_tokens, latent.dim(3)});
    std::copy(latent.data(), latent.data() + latent.numel(), flat.data());
    const Tensor4f hidden = nn::silu(nn::pointwise(flat, proj.w1, proj.b1));
    return nn::pointwise(hidden, proj.w2, proj.b2);
}

nlohmann::json build_sample_manifest(const FrameSequence& native, const SamplerConfig& cfg,
                                     const std::vector<std::int64_t>& indices,
                                     const std::vector<double>& index_scores) {
    if (indices.size() != index_scores.size())
        throw ConfigError("sample manifest: indices and scores length mismatch");
    nlohmann::json j;
    j["source_id"] = native.source_id;
    j["native_fps"] = native.fps;
    j["indices"] = indices;
    nlohmann::json ts = nlohmann::json::array();
    for (const std::int64_t idx : indices) {
        if (idx < 0 || idx >= static_cast<std::int64_t>(native.timestamps.size()))
            throw ConfigError("sample manifest: index out of range");
        ts.push_back(native.timestamps[static_cast<std::size_t>(idx)]);
    }
    j["timestamps"] = ts;
    j["peak_scores"] = index_scores;
    j["config"] = {
        {"detector_fps", cfg.detector_fps},
        {"nms_window_s", cfg.nms_window_seconds},
        {"budget_k", cfg.budget},
        {"scorer", cfg.scorer == ScorerId::histogram ? "histogram" : "external"},
        {"fill_policy", cfg.fill == FillPolicy::uniform_fill ? "uniform_fill" : "truncate"},
    };
    return j;
}

nlohmann::json run_pipeline(const PipelineInputs& in, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto outpath = [&out_dir](const std::string& name) {
        return (fs::path(out_dir) / name).string();
    };

    // Decode once at native rate; the sampler builds its detector-rate view.
    const FrameSequence native =
        run_stage("decode", [&] { return decode_video(in.video_path, 0.0); });

    const SampleOutcome sampled =
        run_stage("sample", [&] { return sample_video_frames(native, in.sampler); });

    FrameSequence chosen;
    chosen.fps = native.fps;
    chosen.source_id = native.source_id;
    for (const std::int64_t idx : sampled.indices) {
        chosen.frames.push_back(native.frames[static_cast<std::size_t>(idx)]);
        chosen.timestamps.push_back(native.timestamps[static_cast<std::size_t>(idx)]);
        chosen.source_indices.push_back(idx);
    }

    const Tensor4f features =
        run_stage("encode", [&] { return extract_features(chosen, in.encoder); });

    CompressorParams params = run_stage("compress", [&] {
        if (!in.checkpoint_path.empty()) return load_checkpoint(in.checkpoint_path);
        return init_params(in.compressor, in.seed);
    });
    std::string ckpt_file = in.checkpoint_path;
    if (ckpt_file.empty()) {
        ckpt_file = outpath("checkpoint.ckpt");
        run_stage("compress", [&] {
            save_checkpoint(ckpt_file, params);
            return 0;
        });
    }

    const Tensor4f latent =
        run_stage("compress", [&] { return compress_latent(features, params); });

    const ProjectorParams proj = projector_stub(latent.dim(3), in.projector);
    const Tensor4f tokens = run_stage("project", [&] { return project_tokens(latent, proj); });

    const nlohmann::json sample_manifest =
        build_sample_manifest(native, in.sampler, sampled.indices, sampled.peak_scores);
    run_stage("write", [&] {
        write_json(outpath("sample_manifest.json"), sample_manifest);
        nlohmann::json encoder_cfg = {{"patch_px", in.encoder.patch_px},
                                      {"channels", in.encoder.channels},
                                      {"projection_seed", in.encoder.projection_seed}};
        save_features(outpath("features.bin"), features, native.source_id, encoder_cfg);
        save_features(outpath("latent.bin"), latent, native.source_id,
                      config_to_json(params.cfg));
        nlohmann::json proj_cfg = {{"llm_dim", in.projector.llm_dim},
                                   {"seed", in.projector.seed}};
        save_features(outpath("tokens.bin"), tokens, native.source_id, proj_cfg);
        return 0;
    });

    const std::int64_t tokens_in = features.dim(0) * features.dim(1) * features.dim(2);
    const std::int64_t tokens_out = latent.dim(0) * latent.dim(1) * latent.dim(2);
    const std::int64_t ratio = compression_ratio(params.cfg);
    if (ratio * tokens_out != tokens_in)
        throw ShapeError("pipeline: token accounting violates the compression-ratio law");

    nlohmann::json manifest;
    manifest["sampling"] = sample_manifest;
    manifest["features_file"] = "features.bin";
    manifest["latent_file"] = "latent.bin";
    manifest["tokens_file"] = "tokens.bin";
    manifest["checkpoint_file"] =
        in.checkpoint_path.empty() ? "checkpoint.ckpt" : in.checkpoint_path;
    manifest["checkpoint_id"] = run_stage("write", [&] { return file_hash_id(ckpt_file); });
    manifest["tokens_in"] = tokens_in;
    manifest["tokens_out"] = tokens_out;
    manifest["compression_ratio"] = ratio;
    manifest["projector_dims"] = {tokens.dim(2), tokens.dim(3)};
    manifest["config"] = {
        {"seed", in.seed},
        {"encoder",
         {{"patch_px", in.encoder.patch_px},
          {"channels", in.encoder.channels},
          {"projection_seed", in.encoder.projection_seed}}},
        {"compressor", config_to_json(params.cfg)},
        {"projector", {{"llm_dim", in.projector.llm_dim}, {"seed", in.projector.seed}}},
    };
    run_stage("write", [&] {
        write_json(outpath("manifest.json"), manifest);
        return 0;
    });
    return manifest;
}

}  // namespace vtc
