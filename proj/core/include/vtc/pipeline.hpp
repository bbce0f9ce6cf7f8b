// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vtc/baselines.hpp"
#include "vtc/compressor.hpp"
#include "vtc/encoder.hpp"
#include "vtc/frame.hpp"
#include "vtc/sampling.hpp"
#include "vtc/tensor.hpp"

namespace vtc {

/// Two-layer MLP that maps each latent channel vector into the token
/// embedding space an LLM would consume (the LLM itself is out of scope).
struct ProjectorConfig {
    std::int64_t llm_dim = 512;
    std::uint64_t seed = 0;
};

struct ProjectorParams {
    std::int64_t in_dim = 0;
    std::int64_t llm_dim = 0;
    Tensor4f w1, b1;  // (1,1,in_dim,llm_dim), (1,1,1,llm_dim)
    Tensor4f w2, b2;  // (1,1,llm_dim,llm_dim), (1,1,1,llm_dim)
};

/// Seeded fan-in-scaled uniform init of the projector.
ProjectorParams projector_stub(std::int64_t in_dim, const ProjectorConfig& cfg);

/// Flatten a t x h x w x c latent to t*h*w tokens and map each through
/// linear -> SiLU -> linear. Returns a (1, 1, t*h*w, llm_dim) tensor.
Tensor4f project_tokens(const Tensor4f& latent, const ProjectorParams& proj);

/// Sampling manifest: source id, native fps, chosen indices with timestamps
/// and peak scores, and a config echo. Keys are sorted; content is fully
/// reproducible from inputs (no clocks, no absolute paths).
nlohmann::json build_sample_manifest(const FrameSequence& native, const SamplerConfig& cfg,
                                     const std::vector<std::int64_t>& indices,
                                     const std::vector<double>& index_scores);

struct PipelineInputs {
    std::string video_path;
    SamplerConfig sampler;
    EncoderConfig encoder;
    CompressorConfig compressor;   // used when checkpoint_path is empty
    std::string checkpoint_path;   // optional pretrained checkpoint
    ProjectorConfig projector;
    std::uint64_t seed = 0;        // seeds encoder/compressor/projector unless set
};

/// End-to-end run: decode -> adaptive sample -> encode -> constrained
/// compress -> project. Writes sample_manifest.json, features.bin,
/// latent.bin, checkpoint.ckpt (when none was supplied), tokens.bin and
/// manifest.json under out_dir, and returns the pipeline manifest. All
/// manifest content is deterministic for fixed inputs and seeds. Errors
/// from any stage propagate tagged with the stage name.
nlohmann::json run_pipeline(const PipelineInputs& in, const std::string& out_dir);

// --- Report rendering -------------------------------------------------------

nlohmann::json eval_result_to_json(const EvalResult& r);
EvalResult eval_result_from_json(const nlohmann::json& j);

/// CSV table of evaluation rows (header always present, one line per row):
/// method,config,tokens_in,tokens_out,reconstruction_mae,boundary_recall,
/// runtime_seconds. Missing metrics render as empty fields.
std::string render_csv(const std::vector<EvalResult>& rows);

/// Parse render_csv output back into rows (round-trip safe).
std::vector<EvalResult> parse_eval_csv(const std::string& csv);

/// Markdown report: a compression table (rows with MAE), a sampling table
/// (rows with recall), and a constraint-run table from pretraining report
/// JSONs (constraint, steps, final moving-average loss, diverged flag).
std::string render_markdown(const std::vector<EvalResult>& rows,
                            const std::vector<nlohmann::json>& run_reports);

}  // namespace vtc
