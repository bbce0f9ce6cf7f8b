// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include "vtc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "vtc/model.hpp"
#include "vtc/version.hpp"

namespace vtc {

namespace {

// splitmix64-style mix for deriving per-step noise seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGradCheckNoiseSeed = 0x517cc1b727220a95ULL;
constexpr std::uint64_t kGradCheckProbeSeed = 0x6a09e667f3bcc909ULL;

void validate_train_config(const TrainConfig& cfg) {
    if (cfg.lr <= 0) throw ConfigError("train: lr must be positive");
    if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (cfg.ma_window < 1) throw ConfigError("train: ma_window must be >= 1");
}

}  // namespace

double reconstruction_loss(const Tensor4f& f, const Tensor4f& f_hat) {
    if (!f.same_dims(f_hat)) throw ShapeError("reconstruction_loss: dimension mismatch");
    if (f.numel() == 0) throw EmptyInputError("reconstruction_loss: empty tensors");
    double sum = 0.0;
    for (std::int64_t i = 0; i < f.numel(); ++i)
        sum += std::abs(static_cast<double>(f.data()[i]) - static_cast<double>(f_hat.data()[i]));
    return sum / static_cast<double>(f.numel());
}

VaeLatent vae_latent(const Tensor4f& f, const CompressorParams& params,
                     std::uint64_t noise_seed) {
    if (params.cfg.latent_constraint != LatentConstraint::vae)
        throw ConfigError("vae_latent requires the vae constraint");
    const Tensor4f c = compress(f, params);
    const Tensor4f mu =
        nn::pointwise(c, params.tensors.at("vae.mean.weight"), params.tensors.at("vae.mean.bias"));
    const Tensor4f lv = nn::pointwise(c, params.tensors.at("vae.logvar.weight"),
                                      params.tensors.at("vae.logvar.bias"));
    const Tensor4f eps = model::seeded_normal<float>(mu.dims(), noise_seed);
    VaeLatent out;
    out.latent = Tensor4f(mu.dims());
    double kl_sum = 0.0;
    for (std::int64_t i = 0; i < mu.numel(); ++i) {
        const double m = mu.data()[i];
        const double l = lv.data()[i];
        out.latent.data()[i] =
            static_cast<float>(m + std::exp(l / 2.0) * static_cast<double>(eps.data()[i]));
        kl_sum += 0.5 * (m * m + std::exp(l) - 1.0 - l);
    }
    out.kl = kl_sum / static_cast<double>(mu.numel());
    return out;
}

double evaluate_loss(const std::vector<Tensor4f>& batch, const CompressorParams& params,
                     const TrainConfig& cfg, std::uint64_t noise_seed) {
    if (batch.empty()) throw EmptyInputError("evaluate_loss: empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::uint64_t sample_seed = mix_seed(noise_seed, i);
        total += model::model_loss_forward<float>(params.tensors, params.cfg, batch[i],
                                                  cfg.kl_weight, sample_seed, nullptr);
    }
    return total / static_cast<double>(batch.size());
}

OptState init_opt_state(const CompressorParams& params) {
    OptState s;
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
        s.m.emplace_back(params.tensors.tensor(i).dims());
        s.v.emplace_back(params.tensors.tensor(i).dims());
    }
    return s;
}

double train_step(const std::vector<Tensor4f>& batch, CompressorParams& params, OptState& opt,
                  const TrainConfig& cfg, std::uint64_t noise_seed) {
    if (batch.empty()) throw EmptyInputError("train_step: empty batch");
    validate_train_config(cfg);
    if (opt.m.size() != params.tensors.size())
        throw ConfigError("train_step: optimizer state does not match params");

    // Forward all samples first; a non-finite loss aborts before any update.
    std::vector<model::ModelTrace<float>> traces(batch.size());
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::uint64_t sample_seed = mix_seed(noise_seed, i);
        total += model::model_loss_forward<float>(params.tensors, params.cfg, batch[i],
                                                  cfg.kl_weight, sample_seed, &traces[i]);
    }
    const double loss = total / static_cast<double>(batch.size());
    if (!std::isfinite(loss)) return loss;

    ParamSet<float> grads = model::zero_like(params.tensors);
    const float scale = 1.0f / static_cast<float>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        model::model_loss_backward<float>(params.tensors, params.cfg, traces[i], cfg.kl_weight,
                                          scale, grads);

    // AdamW: adaptive moments with decoupled weight decay.
    opt.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(opt.step));
    for (std::size_t p = 0; p < params.tensors.size(); ++p) {
        Tensor4f& theta = params.tensors.tensor(p);
        Tensor4f& m = opt.m[p];
        Tensor4f& v = opt.v[p];
        const Tensor4f& g = grads.tensor(p);
        for (std::int64_t i = 0; i < theta.numel(); ++i) {
            const double gi = g.data()[i];
            const double mi = cfg.beta1 * m.data()[i] + (1.0 - cfg.beta1) * gi;
            const double vi = cfg.beta2 * v.data()[i] + (1.0 - cfg.beta2) * gi * gi;
            m.data()[i] = static_cast<float>(mi);
            v.data()[i] = static_cast<float>(vi);
            const double update = (mi / bc1) / (std::sqrt(vi / bc2) + cfg.adam_eps) +
                                  cfg.weight_decay * theta.data()[i];
            theta.data()[i] = static_cast<float>(theta.data()[i] - cfg.lr * update);
        }
    }
    return loss;
}

std::vector<double> moving_average(const std::vector<double>& series, std::int64_t window) {
    if (window < 1) throw ConfigError("moving_average: window must be >= 1");
    std::vector<double> out;
    if (static_cast<std::int64_t>(series.size()) < window) return out;
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (static_cast<std::int64_t>(i) >= window) sum -= series[i - static_cast<std::size_t>(window)];
        if (static_cast<std::int64_t>(i) >= window - 1) out.push_back(sum / static_cast<double>(window));
    }
    return out;
}

TrainReport pretrain(const std::vector<Tensor4f>& dataset, CompressorParams params,
                     const TrainConfig& cfg, const std::string& checkpoint_path) {
    if (dataset.empty()) throw EmptyInputError("pretrain: empty dataset");
    validate_train_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    TrainReport report;
    OptState opt = init_opt_state(params);
    std::mt19937_64 shuffle_rng(cfg.seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    double initial_ma = -1.0;
    double ma_sum = 0.0;
    std::uint64_t step = 0;
    bool stop = false;
    for (std::int64_t epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t pos = 0; pos < order.size() && !stop;
             pos += static_cast<std::size_t>(cfg.batch_size)) {
            std::vector<Tensor4f> batch;
            const std::size_t end =
                std::min(order.size(), pos + static_cast<std::size_t>(cfg.batch_size));
            for (std::size_t i = pos; i < end; ++i) batch.push_back(dataset[order[i]]);

            const double loss = train_step(batch, params, opt, cfg, mix_seed(cfg.seed, step));
            report.losses.push_back(loss);
            if (!std::isfinite(loss)) {
                report.diverged = true;
                report.divergence_step = static_cast<std::int64_t>(step);
                stop = true;
                break;
            }
            // Sliding moving average against its initial value.
            ma_sum += loss;
            const std::size_t n = report.losses.size();
            if (static_cast<std::int64_t>(n) > cfg.ma_window)
                ma_sum -= report.losses[n - 1 - static_cast<std::size_t>(cfg.ma_window)];
            if (static_cast<std::int64_t>(n) >= cfg.ma_window) {
                const double ma = ma_sum / static_cast<double>(cfg.ma_window);
                if (initial_ma < 0) initial_ma = ma;
                if (ma > cfg.divergence_factor * initial_ma) {
                    report.diverged = true;
                    report.divergence_step = static_cast<std::int64_t>(step);
                    stop = true;
                }
            }
            ++step;
        }
    }

    if (!checkpoint_path.empty()) {
        save_checkpoint(checkpoint_path, params);
        report.checkpoint_path = checkpoint_path;
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

nlohmann::json train_report_to_json(const TrainReport& report, const CompressorConfig& ccfg,
                                    const TrainConfig& tcfg) {
    nlohmann::json j;
    j["losses"] = report.losses;
    j["diverged"] = report.diverged;
    j["divergence_step"] = report.divergence_step;
    j["wall_seconds"] = report.wall_seconds;
    j["checkpoint_path"] = report.checkpoint_path;
    j["config"]["compressor"] = config_to_json(ccfg);
    j["config"]["train"] = {
        {"lr", tcfg.lr},
        {"batch_size", tcfg.batch_size},
        {"epochs", tcfg.epochs},
        {"beta1", tcfg.beta1},
        {"beta2", tcfg.beta2},
        {"adam_eps", tcfg.adam_eps},
        {"weight_decay", tcfg.weight_decay},
        {"kl_weight", tcfg.kl_weight},
        {"seed", tcfg.seed},
        {"ma_window", tcfg.ma_window},
        {"divergence_factor", tcfg.divergence_factor},
    };
    j["code_version"] = kCodeVersion;
    return j;
}

double grad_check(const CompressorParams& params, const Tensor4f& sample, int n_probes,
                  const TrainConfig& cfg) {
    if (n_probes < 1) throw ConfigError("grad_check: n_probes must be >= 1");
    // Everything below runs on a float64 shadow of the parameters.
    ParamSet<double> p = params_cast<double>(params.tensors);
    const Tensor4d x = tensor_cast<double>(sample);
    const CompressorConfig& ccfg = params.cfg;

    ParamSet<double> grads = model::zero_like(p);
    model::ModelTrace<double> trace;
    model::model_loss_forward<double>(p, ccfg, x, cfg.kl_weight, kGradCheckNoiseSeed, &trace);
    model::model_loss_backward<double>(p, ccfg, trace, cfg.kl_weight, 1.0, grads);

    const std::int64_t total = p.numel();
    std::mt19937_64 rng(kGradCheckProbeSeed);
    std::uniform_int_distribution<std::int64_t> pick(0, total - 1);
    const double h = 1e-3;
    double max_rel = 0.0;
    for (int probe = 0; probe < n_probes; ++probe) {
        std::int64_t flat = pick(rng);
        std::size_t ti = 0;
        while (flat >= p.tensor(ti).numel()) {
            flat -= p.tensor(ti).numel();
            ++ti;
        }
        double* slot = p.tensor(ti).data() + flat;
        const double saved = *slot;
        *slot = saved + h;
        const double up = model::model_loss_forward<double>(p, ccfg, x, cfg.kl_weight,
                                                            kGradCheckNoiseSeed, nullptr);
        *slot = saved - h;
        const double dn = model::model_loss_forward<double>(p, ccfg, x, cfg.kl_weight,
                                                            kGradCheckNoiseSeed, nullptr);
        *slot = saved;
        const double numeric = (up - dn) / (2.0 * h);
        const double analytic = grads.tensor(ti).data()[flat];
        const double mag = std::max(std::abs(numeric), std::abs(analytic));
        if (mag < 1e-6) continue;  // dead path: both effectively zero
        max_rel = std::max(max_rel, std::abs(numeric - analytic) / mag);
    }
    return max_rel;
}

}  // namespace vtc
