// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vtc/compressor.hpp"
#include "vtc/tensor.hpp"

namespace vtc {

/// Reconstruction-pretraining settings. The encoder is frozen throughout;
/// only compressor/decoder (and VAE head) parameters are updated.
struct TrainConfig {
    double lr = 2e-5;
    std::int64_t batch_size = 8;
    std::int64_t epochs = 1;
    // AdamW: adaptive moments with decoupled weight decay.
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double weight_decay = 0.01;
    double kl_weight = 1e-4;  // VAE constraint only
    std::uint64_t seed = 0;
    // Divergence rule: loss non-finite, or the sliding moving average
    // exceeding divergence_factor times the initial moving average.
    std::int64_t ma_window = 50;
    double divergence_factor = 10.0;
};

/// Outcome of a pretraining run.
struct TrainReport {
    std::vector<double> losses;  // one per optimizer step, order of execution
    std::string checkpoint_path;
    double wall_seconds = 0.0;
    bool diverged = false;
    std::int64_t divergence_step = -1;  // step at which divergence fired
};

/// Mean absolute error between two same-shaped tensors.
double reconstruction_loss(const Tensor4f& f, const Tensor4f& f_hat);

/// VAE latent: 1x1x1 mean/log-variance heads over the compressor output,
/// sampled z = mu + exp(logvar/2) * eps with seeded standard-normal noise.
/// kl is the closed-form KL to the unit Gaussian, averaged over elements:
/// mean(0.5 * (mu^2 + exp(logvar) - 1 - logvar)).
struct VaeLatent {
    Tensor4f latent;
    double kl = 0.0;
};
VaeLatent vae_latent(const Tensor4f& f, const CompressorParams& params, std::uint64_t noise_seed);

/// Training objective for one batch at fixed params: mean reconstruction
/// MAE (+ kl_weight * KL under the vae constraint). noise_seed feeds the
/// VAE sampler; unused otherwise.
double evaluate_loss(const std::vector<Tensor4f>& batch, const CompressorParams& params,
                     const TrainConfig& cfg, std::uint64_t noise_seed);

/// AdamW moment buffers, one pair per parameter tensor.
struct OptState {
    std::vector<Tensor4f> m;
    std::vector<Tensor4f> v;
    std::int64_t step = 0;
};
OptState init_opt_state(const CompressorParams& params);

/// One optimizer step on the batch-mean objective. Returns the loss at the
/// pre-step parameters. A non-finite loss leaves params and opt untouched
/// and returns the non-finite value (caller records divergence).
double train_step(const std::vector<Tensor4f>& batch, CompressorParams& params, OptState& opt,
                  const TrainConfig& cfg, std::uint64_t noise_seed);

/// Full pretraining loop: seeded shuffle each epoch, train_step per batch,
/// divergence tracking, and (when checkpoint_path is nonempty) a checkpoint
/// of the final parameters. Throws EmptyInputError on an empty dataset.
TrainReport pretrain(const std::vector<Tensor4f>& dataset, CompressorParams params,
                     const TrainConfig& cfg, const std::string& checkpoint_path = "");

/// Sliding mean of the trailing `window` entries, defined from index
/// window-1 onward; shorter series yield an empty vector.
std::vector<double> moving_average(const std::vector<double>& series, std::int64_t window);

/// Run report as JSON: loss series, divergence flag, wall time, checkpoint
/// path, config echoes, and the code version (git describe).
nlohmann::json train_report_to_json(const TrainReport& report, const CompressorConfig& ccfg,
                                    const TrainConfig& tcfg);

/// Analytic-vs-numeric gradient verification on a float64 shadow of the
/// model: for n_probes randomly chosen scalar parameters, compares the
/// analytic dL/dtheta against a central finite difference (step 1e-3) of
/// the single-sample loss. Returns the max relative error; gradients with
/// both sides below 1e-6 count as exact (dead-path tolerance).
double grad_check(const CompressorParams& params, const Tensor4f& sample, int n_probes,
                  const TrainConfig& cfg);

}  // namespace vtc
