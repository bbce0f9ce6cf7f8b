// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0
//
// vtc: frame sampling, feature encoding, compressor pretraining, constrained
// compression, evaluation and end-to-end pipeline runs from one binary.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vtc/baselines.hpp"
#include "vtc/compressor.hpp"
#include "vtc/encoder.hpp"
#include "vtc/errors.hpp"
#include "vtc/pipeline.hpp"
#include "vtc/sampling.hpp"
#include "vtc/tensor_io.hpp"
#include "vtc/training.hpp"
#include "vtc/video_io.hpp"

namespace {

namespace fs = std::filesystem;

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw vtc::FormatError("cannot open for writing: " + path);
    os << text;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw vtc::FormatError("cannot open: " + path);
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw vtc::FormatError(path + ": " + e.what());
    }
}

vtc::Stride3 parse_ratio(const std::string& text) {
    vtc::Stride3 r;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%ld" "x" "%ld" "x" "%ld" "%c", &r.t, &r.h, &r.w, &extra) != 3)
        throw vtc::ConfigError("ratio must look like TxHxW (e.g. 4x4x4): " + text);
    return r;
}

std::string ratio_label(const vtc::CompressorConfig& cfg) {
    const vtc::Stride3 r = vtc::ratio_components(cfg);
    return std::to_string(r.t) + "x" + std::to_string(r.h) + "x" + std::to_string(r.w);
}

std::vector<vtc::Tensor4f> load_feature_dir(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".bin")
            paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw vtc::EmptyInputError("no .bin feature tensors under " + dir);
    std::vector<vtc::Tensor4f> tensors;
    tensors.reserve(paths.size());
    for (const std::string& p : paths) tensors.push_back(vtc::load_tensor(p));
    return tensors;
}

std::vector<std::int64_t> load_index_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw vtc::FormatError("cannot open: " + path);
    std::vector<std::int64_t> out;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            const long long v = std::stoll(line, &used);
            if (used != line.size()) throw std::invalid_argument("trailing");
            out.push_back(v);
        } catch (const std::exception&) {
            throw vtc::FormatError(path + ": line " + std::to_string(line_no) +
                                   " is not an integer index");
        }
    }
    return out;
}

// Per-verb option bundles. CLI11 binds pointers, so these outlive parsing.
struct SampleArgs {
    std::string video, mode = "adaptive", scores, fill = "uniform_fill";
    std::string out = "manifest.json";
    std::int64_t k = 32;
    double detector_fps = 10.0;
    double nms_window = 3.0;
};

struct EncodeArgs {
    std::string video, manifest, out = "features.bin";
    std::int64_t patch = 16;
    std::int64_t channels = 64;
};

struct PretrainArgs {
    std::string data, constraint = "avgpool_residual", ratio, out = "ckpt", report;
    double lr = 2e-5;
    std::int64_t epochs = 1;
    std::int64_t batch_size = 8;
    double kl_weight = 1e-4;
    double weight_decay = 0.01;
    std::int64_t channels_d = 64;
    std::int64_t bottleneck_div = 4;
    bool no_zero_init = false;
};

struct CompressArgs {
    std::string features, ckpt, constraint, out = "latent.bin";
};

struct EvalArgs {
    std::string mode, features, ckpt, video, cuts, out = "results.json";
    std::int64_t k = 32;
    double detector_fps = 10.0;
    double nms_window = 3.0;
    std::int64_t tol = 1;
};

struct PipelineArgs {
    std::string video, ckpt, ratio, out = "pipeline_out";
    std::int64_t k = 32;
    std::int64_t patch = 16;
    std::int64_t channels = 64;
    std::int64_t llm_dim = 512;
    double detector_fps = 10.0;
    double nms_window = 3.0;
};

struct ReportArgs {
    std::string results, out = "report";
    std::vector<std::string> runs;
};

int run_sample(const SampleArgs& a, std::uint64_t /*seed*/) {
    const vtc::FrameSequence native = vtc::decode_video(a.video, 0.0);
    vtc::SamplerConfig cfg;
    cfg.detector_fps = a.detector_fps;
    cfg.nms_window_seconds = a.nms_window;
    cfg.budget = a.k;
    cfg.fill = a.fill == "truncate" ? vtc::FillPolicy::truncate : vtc::FillPolicy::uniform_fill;
    vtc::SampleOutcome outcome;
    if (a.mode == "uniform") {
        outcome.indices =
            vtc::uniform_sample(static_cast<std::int64_t>(native.frames.size()), a.k);
        outcome.peak_scores.assign(outcome.indices.size(), 0.0);
    } else if (a.mode == "adaptive") {
        if (!a.scores.empty()) {
            cfg.scorer = vtc::ScorerId::external;
            const std::vector<double> scores = vtc::load_scores(a.scores);
            outcome = vtc::sample_video_frames(native, cfg, &scores);
        } else {
            outcome = vtc::sample_video_frames(native, cfg);
        }
    } else {
        throw vtc::ConfigError("unknown mode (want adaptive or uniform): " + a.mode);
    }
    const nlohmann::json manifest =
        vtc::build_sample_manifest(native, cfg, outcome.indices, outcome.peak_scores);
    write_json_file(a.out, manifest);
    std::cout << a.out << ": " << outcome.indices.size() << " frames selected\n";
    return 0;
}

int run_encode(const EncodeArgs& a, std::uint64_t seed) {
    const vtc::FrameSequence native = vtc::decode_video(a.video, 0.0);
    vtc::FrameSequence chosen = native;
    if (!a.manifest.empty()) {
        const nlohmann::json manifest = read_json_file(a.manifest);
        chosen.frames.clear();
        chosen.timestamps.clear();
        chosen.source_indices.clear();
        for (const auto& jidx : manifest.at("indices")) {
            const auto idx = jidx.get<std::int64_t>();
            if (idx < 0 || idx >= static_cast<std::int64_t>(native.frames.size()))
                throw vtc::ConfigError("manifest index out of range: " + std::to_string(idx));
            chosen.frames.push_back(native.frames[static_cast<std::size_t>(idx)]);
            chosen.timestamps.push_back(native.timestamps[static_cast<std::size_t>(idx)]);
            chosen.source_indices.push_back(idx);
        }
    }
    vtc::EncoderConfig cfg;
    cfg.patch_px = a.patch;
    cfg.channels = a.channels;
    cfg.projection_seed = seed;
    const vtc::Tensor4f features = vtc::extract_features(chosen, cfg);
    const nlohmann::json cfg_echo = {{"patch_px", cfg.patch_px},
                                     {"channels", cfg.channels},
                                     {"projection_seed", cfg.projection_seed}};
    vtc::save_features(a.out, features, native.source_id, cfg_echo);
    std::cout << a.out << ": " << features.dim(0) << "x" << features.dim(1) << "x"
              << features.dim(2) << "x" << features.dim(3) << " features\n";
    return 0;
}

int run_pretrain(const PretrainArgs& a, std::uint64_t seed) {
    const std::vector<vtc::Tensor4f> dataset = load_feature_dir(a.data);
    vtc::CompressorConfig ccfg;
    ccfg.channels_d = a.channels_d;
    ccfg.bottleneck_div = a.bottleneck_div;
    ccfg.latent_constraint = vtc::latent_constraint_from_string(a.constraint);
    ccfg.init_seed = seed;
    ccfg.zero_init_residual = !a.no_zero_init;
    if (!a.ratio.empty()) {
        const vtc::Stride3 r = parse_ratio(a.ratio);
        ccfg.strides = vtc::strides_for_ratio(r.t, r.h, r.w);
    }
    vtc::validate_config(ccfg);
    vtc::TrainConfig tcfg;
    tcfg.lr = a.lr;
    tcfg.epochs = a.epochs;
    tcfg.batch_size = a.batch_size;
    tcfg.kl_weight = a.kl_weight;
    tcfg.weight_decay = a.weight_decay;
    tcfg.seed = seed;
    fs::create_directories(a.out);
    const std::string ckpt_path = (fs::path(a.out) / "compressor.ckpt").string();
    const vtc::CompressorParams params = vtc::init_params(ccfg, seed);
    const vtc::TrainReport report = vtc::pretrain(dataset, params, tcfg, ckpt_path);
    if (!a.report.empty())
        write_json_file(a.report, vtc::train_report_to_json(report, ccfg, tcfg));
    const double final_loss = report.losses.empty() ? 0.0 : report.losses.back();
    std::cout << ckpt_path << ": " << report.losses.size() << " steps, final loss "
              << final_loss << (report.diverged ? " (diverged)" : "") << "\n";
    return report.diverged ? 1 : 0;
}

int run_compress(const CompressArgs& a) {
    const vtc::CompressorParams params = vtc::load_checkpoint(a.ckpt);
    if (!a.constraint.empty() &&
        vtc::latent_constraint_from_string(a.constraint) != params.cfg.latent_constraint)
        throw vtc::ConfigError("checkpoint was trained with constraint " +
                               vtc::to_string(params.cfg.latent_constraint) +
                               ", not " + a.constraint);
    const vtc::Tensor4f f = vtc::load_features(a.features);
    const vtc::Tensor4f h = vtc::compress_latent(f, params);
    vtc::save_features(a.out, h, a.features, vtc::config_to_json(params.cfg));
    std::cout << a.out << ": " << h.dim(0) << "x" << h.dim(1) << "x" << h.dim(2) << "x"
              << h.dim(3) << " latent (ratio " << vtc::compression_ratio(params.cfg) << ")\n";
    return 0;
}

int run_eval(const EvalArgs& a, std::uint64_t seed) {
    std::vector<vtc::EvalResult> rows;
    if (a.mode == "compression") {
        const vtc::Tensor4f f = vtc::load_features(a.features);
        const vtc::CompressorParams params = vtc::load_checkpoint(a.ckpt);
        const vtc::Stride3 r = vtc::ratio_components(params.cfg);
        const std::int64_t tokens_in = f.dim(0) * f.dim(1) * f.dim(2);

        vtc::EvalResult learned;
        learned.method = "residual_compressor";
        learned.config_label = ratio_label(params.cfg);
        learned.tokens_in = tokens_in;
        learned.tokens_out = tokens_in / vtc::compression_ratio(params.cfg);
        auto t0 = std::chrono::steady_clock::now();
        const vtc::Tensor4f h = vtc::compress_latent(f, params);
        const vtc::Tensor4f recon = vtc::decompress(h, params);
        learned.reconstruction_mae = vtc::reconstruction_loss(f, recon);
        learned.runtime_seconds = elapsed_s(t0);
        rows.push_back(learned);

        vtc::EvalResult baseline;
        baseline.method = "avgpool_baseline";
        baseline.config_label = learned.config_label;
        baseline.tokens_in = tokens_in;
        baseline.tokens_out = learned.tokens_out;
        t0 = std::chrono::steady_clock::now();
        const vtc::Tensor4f pooled = vtc::avgpool_baseline(f, r.t, r.h, r.w);
        const vtc::Tensor4f up = vtc::upsample_reconstruction(pooled, r.t, r.h, r.w);
        baseline.reconstruction_mae = vtc::reconstruction_loss(f, up);
        baseline.runtime_seconds = elapsed_s(t0);
        rows.push_back(baseline);
    } else if (a.mode == "sampling") {
        if (a.cuts.empty())
            throw vtc::ConfigError("sampling eval needs --cuts (ground-truth cut indices)");
        const vtc::FrameSequence native = vtc::decode_video(a.video, 0.0);
        const std::vector<std::int64_t> truth = load_index_file(a.cuts);
        const std::int64_t n = static_cast<std::int64_t>(native.frames.size());
        vtc::SamplerConfig cfg;
        cfg.detector_fps = a.detector_fps;
        cfg.nms_window_seconds = a.nms_window;
        cfg.budget = a.k;

        vtc::EvalResult adaptive;
        adaptive.method = "adaptive_sampler";
        adaptive.config_label = "k=" + std::to_string(a.k);
        adaptive.tokens_in = n;
        auto t0 = std::chrono::steady_clock::now();
        const vtc::SampleOutcome outcome = vtc::sample_video_frames(native, cfg);
        adaptive.tokens_out = static_cast<std::int64_t>(outcome.indices.size());
        adaptive.boundary_recall = vtc::boundary_recall(outcome.indices, truth, a.tol);
        adaptive.runtime_seconds = elapsed_s(t0);
        rows.push_back(adaptive);

        vtc::EvalResult uniform;
        uniform.method = "uniform_sampler";
        uniform.config_label = adaptive.config_label;
        uniform.tokens_in = n;
        t0 = std::chrono::steady_clock::now();
        const std::vector<std::int64_t> grid = vtc::uniform_sample(n, a.k);
        uniform.tokens_out = static_cast<std::int64_t>(grid.size());
        uniform.boundary_recall = vtc::boundary_recall(grid, truth, a.tol);
        uniform.runtime_seconds = elapsed_s(t0);
        rows.push_back(uniform);
    } else {
        throw vtc::ConfigError("unknown eval mode (want compression or sampling): " + a.mode);
    }
    (void)seed;
    nlohmann::json jrows = nlohmann::json::array();
    for (const vtc::EvalResult& r : rows) jrows.push_back(vtc::eval_result_to_json(r));
    write_json_file(a.out, jrows);
    std::cout << a.out << ": " << rows.size() << " result rows\n";
    return 0;
}

int run_pipeline_verb(const PipelineArgs& a, std::uint64_t seed) {
    vtc::PipelineInputs in;
    in.video_path = a.video;
    in.sampler.budget = a.k;
    in.sampler.detector_fps = a.detector_fps;
    in.sampler.nms_window_seconds = a.nms_window;
    in.encoder.patch_px = a.patch;
    in.encoder.channels = a.channels;
    in.encoder.projection_seed = seed;
    in.compressor.channels_d = a.channels;
    in.compressor.init_seed = seed;
    if (!a.ratio.empty()) {
        const vtc::Stride3 r = parse_ratio(a.ratio);
        in.compressor.strides = vtc::strides_for_ratio(r.t, r.h, r.w);
    }
    in.checkpoint_path = a.ckpt;
    in.projector.llm_dim = a.llm_dim;
    in.projector.seed = seed;
    in.seed = seed;
    const nlohmann::json manifest = vtc::run_pipeline(in, a.out);
    std::cout << (fs::path(a.out) / "manifest.json").string() << ": "
              << manifest.at("tokens_in").get<std::int64_t>() << " -> "
              << manifest.at("tokens_out").get<std::int64_t>() << " tokens (ratio "
              << manifest.at("compression_ratio").get<std::int64_t>() << ")\n";
    return 0;
}

int run_report(const ReportArgs& a) {
    std::vector<vtc::EvalResult> rows;
    if (!a.results.empty()) {
        const nlohmann::json jrows = read_json_file(a.results);
        if (!jrows.is_array()) throw vtc::FormatError(a.results + ": expected a JSON array");
        for (const auto& j : jrows) rows.push_back(vtc::eval_result_from_json(j));
    }
    std::vector<nlohmann::json> run_reports;
    for (const std::string& path : a.runs) run_reports.push_back(read_json_file(path));
    write_text(a.out + ".csv", vtc::render_csv(rows));
    write_text(a.out + ".md", vtc::render_markdown(rows, run_reports));
    std::cout << a.out << ".csv, " << a.out << ".md written\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive frame sampling + constrained spatiotemporal compression"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "global RNG seed")->capture_default_str();
    app.set_config("--config", "", "read defaults from a TOML config file");

    SampleArgs sample_args;
    CLI::App* sample = app.add_subcommand("sample", "select frames from a video");
    sample->add_option("--video", sample_args.video, "input video")->required();
    sample->add_option("--k", sample_args.k, "frame budget")->capture_default_str();
    sample->add_option("--mode", sample_args.mode, "adaptive or uniform")
        ->check(CLI::IsMember({"adaptive", "uniform"}))
        ->capture_default_str();
    sample->add_option("--detector-fps", sample_args.detector_fps, "detector sampling rate")
        ->capture_default_str();
    sample->add_option("--nms-window", sample_args.nms_window, "suppression window (seconds)")
        ->capture_default_str();
    sample->add_option("--scores", sample_args.scores,
                       "external per-frame boundary scores (detector rate, one per line)");
    sample->add_option("--fill", sample_args.fill, "uniform_fill or truncate")
        ->check(CLI::IsMember({"uniform_fill", "truncate"}))
        ->capture_default_str();
    sample->add_option("--out", sample_args.out, "output manifest path")->capture_default_str();

    EncodeArgs encode_args;
    CLI::App* encode = app.add_subcommand("encode", "extract patch features from frames");
    encode->add_option("--video", encode_args.video, "input video")->required();
    encode->add_option("--manifest", encode_args.manifest,
                       "sample manifest restricting to selected frames");
    encode->add_option("--patch", encode_args.patch, "patch size in pixels")
        ->capture_default_str();
    encode->add_option("--channels", encode_args.channels, "feature channels")
        ->capture_default_str();
    encode->add_option("--out", encode_args.out, "output feature tensor")->capture_default_str();

    PretrainArgs pretrain_args;
    CLI::App* pretrain = app.add_subcommand("pretrain", "reconstruction-pretrain a compressor");
    pretrain->add_option("--data", pretrain_args.data, "directory of .bin feature tensors")
        ->required();
    pretrain->add_option("--constraint", pretrain_args.constraint,
                         "none, vae or avgpool_residual")
        ->check(CLI::IsMember({"none", "vae", "avgpool_residual"}))
        ->capture_default_str();
    pretrain->add_option("--lr", pretrain_args.lr, "learning rate")->capture_default_str();
    pretrain->add_option("--epochs", pretrain_args.epochs, "epochs")->capture_default_str();
    pretrain->add_option("--batch-size", pretrain_args.batch_size, "batch size")
        ->capture_default_str();
    pretrain->add_option("--kl-weight", pretrain_args.kl_weight, "KL weight (vae only)")
        ->capture_default_str();
    pretrain->add_option("--weight-decay", pretrain_args.weight_decay, "AdamW weight decay")
        ->capture_default_str();
    pretrain->add_option("--ratio", pretrain_args.ratio,
                         "compression ratio TxHxW (default 4x8x8)");
    pretrain->add_option("--channels-d", pretrain_args.channels_d, "conv width d")
        ->capture_default_str();
    pretrain->add_option("--bottleneck-div", pretrain_args.bottleneck_div,
                         "bottleneck divisor (d -> d/div inside blocks)")
        ->capture_default_str();
    pretrain->add_flag("--no-zero-init", pretrain_args.no_zero_init,
                       "disable zero-init of the residual path");
    pretrain->add_option("--out", pretrain_args.out, "checkpoint directory")
        ->capture_default_str();
    pretrain->add_option("--report", pretrain_args.report, "training report JSON path");

    CompressArgs compress_args;
    CLI::App* compress = app.add_subcommand("compress", "compress features with a checkpoint");
    compress->add_option("--features", compress_args.features, "input feature tensor")
        ->required();
    compress->add_option("--ckpt", compress_args.ckpt, "compressor checkpoint")->required();
    compress->add_option("--constraint", compress_args.constraint,
                         "assert the checkpoint's latent constraint");
    compress->add_option("--out", compress_args.out, "output latent tensor")
        ->capture_default_str();

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "evaluate compression or sampling");
    eval->add_option("--mode", eval_args.mode, "compression or sampling")
        ->check(CLI::IsMember({"compression", "sampling"}))
        ->required();
    eval->add_option("--features", eval_args.features, "feature tensor (compression mode)");
    eval->add_option("--ckpt", eval_args.ckpt, "compressor checkpoint (compression mode)");
    eval->add_option("--video", eval_args.video, "input video (sampling mode)");
    eval->add_option("--cuts", eval_args.cuts,
                     "ground-truth cut indices, one per line (sampling mode)");
    eval->add_option("--k", eval_args.k, "frame budget (sampling mode)")->capture_default_str();
    eval->add_option("--detector-fps", eval_args.detector_fps, "detector sampling rate")
        ->capture_default_str();
    eval->add_option("--nms-window", eval_args.nms_window, "suppression window (seconds)")
        ->capture_default_str();
    eval->add_option("--tol", eval_args.tol, "recall tolerance in frames")
        ->capture_default_str();
    eval->add_option("--out", eval_args.out, "results JSON path")->capture_default_str();

    PipelineArgs pipeline_args;
    CLI::App* pipeline = app.add_subcommand("pipeline", "run the full video-to-tokens pipeline");
    pipeline->add_option("--video", pipeline_args.video, "input video")->required();
    pipeline->add_option("--k", pipeline_args.k, "frame budget")->capture_default_str();
    pipeline->add_option("--ckpt", pipeline_args.ckpt, "pretrained compressor checkpoint");
    pipeline->add_option("--ratio", pipeline_args.ratio, "compression ratio TxHxW");
    pipeline->add_option("--patch", pipeline_args.patch, "patch size in pixels")
        ->capture_default_str();
    pipeline->add_option("--channels", pipeline_args.channels, "feature channels / conv width")
        ->capture_default_str();
    pipeline->add_option("--llm-dim", pipeline_args.llm_dim, "projector output dimension")
        ->capture_default_str();
    pipeline->add_option("--detector-fps", pipeline_args.detector_fps, "detector sampling rate")
        ->capture_default_str();
    pipeline->add_option("--nms-window", pipeline_args.nms_window,
                         "suppression window (seconds)")
        ->capture_default_str();
    pipeline->add_option("--out", pipeline_args.out, "output directory")->capture_default_str();

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "render results to CSV and Markdown");
    report->add_option("--results", report_args.results, "results JSON from eval");
    report->add_option("--runs", report_args.runs, "pretraining report JSONs")
        ->take_all();
    report->add_option("--out", report_args.out, "output base path (writes .csv and .md)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    const std::string verb = app.get_subcommands().front()->get_name();
    try {
        if (sample->parsed()) return run_sample(sample_args, seed);
        if (encode->parsed()) return run_encode(encode_args, seed);
        if (pretrain->parsed()) return run_pretrain(pretrain_args, seed);
        if (compress->parsed()) return run_compress(compress_args);
        if (eval->parsed()) return run_eval(eval_args, seed);
        if (pipeline->parsed()) return run_pipeline_verb(pipeline_args, seed);
        if (report->parsed()) return run_report(report_args);
    } catch (const std::exception& e) {
        const std::string what = e.what();
        if (!what.empty() && what.front() == '[')
            std::cerr << "vtc " << what << "\n";
        else
            std::cerr << "vtc [" << verb << "] " << what << "\n";
        return 1;
    }
    return 0;
}
