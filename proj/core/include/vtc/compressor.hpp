// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vtc/errors.hpp"
#include "vtc/tensor.hpp"

namespace vtc {

/// Per-block (temporal, height, width) stride factors.
struct Stride3 {
    std::int64_t t = 1;
    std::int64_t h = 1;
    std::int64_t w = 1;
    bool operator==(const Stride3&) const = default;
};

/// How the latent is regularized during training.
enum class LatentConstraint { none, vae, avgpool_residual };

std::string to_string(LatentConstraint c);
LatentConstraint latent_constraint_from_string(const std::string& s);

/// Architecture of the spatiotemporal compressor and its mirror decoder.
///
/// The compressor is a cascade of residual blocks. Each block is
/// shortcut(x) + cb1(cb0(x)) where a conv block cbN is a 3x3 spatial conv
/// (channels d -> d/bottleneck_div), a kernel-3 temporal conv
/// (d/bottleneck_div -> d), then SiLU; cb0 carries the block's stride. The
/// shortcut is identity at stride 1, else strided average pooling plus a
/// learned 1x1x1 projection. A final 1x1x1 output conv ("head") closes the
/// compressor so the zero-init toggle can pin its output to zero exactly.
/// The decoder mirrors the blocks in reverse: nearest-neighbor upsampling by
/// the block's stride factors, then a stride-1 residual block.
struct CompressorConfig {
    std::vector<Stride3> strides = {{2, 2, 2}, {2, 2, 2}, {1, 1, 1}};
    std::int64_t channels_d = 64;
    std::int64_t bottleneck_div = 4;
    std::int64_t spatial_kernel = 3;
    std::int64_t temporal_kernel = 3;
    LatentConstraint latent_constraint = LatentConstraint::avgpool_residual;
    std::uint64_t init_seed = 0;
    // When true and the constraint is avgpool_residual, the head and the
    // decoder residual branches are zeroed at init, so the model starts
    // exactly at the pool-and-replicate solution.
    bool zero_init_residual = true;

    bool operator==(const CompressorConfig&) const = default;
};

/// Throws ConfigError when strides, channels or kernels are out of contract
/// (strides in {1,2}, channels divisible by bottleneck_div, kernels >= 1).
void validate_config(const CompressorConfig& cfg);

/// JSON round-trip for configs (used in checkpoints, reports, manifests).
nlohmann::json config_to_json(const CompressorConfig& cfg);
CompressorConfig config_from_json(const nlohmann::json& j);

/// Ordered, name-addressed tensor collection. Iteration order is the
/// architecture order in which parameters were registered; lookups are by
/// name. Used for parameters and for gradients.
template <typename T>
class ParamSet {
public:
    void add(std::string name, Tensor4<T> t) {
        if (index_.count(name)) throw ConfigError("duplicate parameter name: " + name);
        index_.emplace(name, names_.size());
        names_.push_back(std::move(name));
        tensors_.push_back(std::move(t));
    }
    bool has(const std::string& name) const { return index_.count(name) != 0; }
    Tensor4<T>& at(const std::string& name) { return tensors_[checked(name)]; }
    const Tensor4<T>& at(const std::string& name) const { return tensors_[checked(name)]; }
    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    Tensor4<T>& tensor(std::size_t i) { return tensors_[i]; }
    const Tensor4<T>& tensor(std::size_t i) const { return tensors_[i]; }
    std::int64_t numel() const {
        std::int64_t n = 0;
        for (const auto& t : tensors_) n += t.numel();
        return n;
    }

private:
    std::size_t checked(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw ConfigError("unknown parameter name: " + name);
        return it->second;
    }
    std::vector<std::string> names_;
    std::vector<Tensor4<T>> tensors_;
    std::unordered_map<std::string, std::size_t> index_;
};

template <typename To, typename From>
ParamSet<To> params_cast(const ParamSet<From>& src) {
    ParamSet<To> out;
    for (std::size_t i = 0; i < src.size(); ++i)
        out.add(src.name(i), tensor_cast<To>(src.tensor(i)));
    return out;
}

/// A compressor/decoder parameter set paired with its architecture config.
struct CompressorParams {
    CompressorConfig cfg;
    ParamSet<float> tensors;
};

/// Parameter names and shapes implied by a config, in architecture order
/// (encoder blocks, head, decoder blocks, then VAE heads if enabled).
std::vector<std::pair<std::string, std::array<std::int64_t, 4>>> param_shapes(
    const CompressorConfig& cfg);

/// Deterministic fan-in-scaled uniform init: every tensor drawn from one
/// mt19937_64(seed) stream in architecture order, U(-1/sqrt(fan_in),
/// +1/sqrt(fan_in)); biases use their layer's fan-in. The zero-init toggle
/// then zeroes the head and decoder residual-branch output convs.
CompressorParams init_params(const CompressorConfig& cfg, std::uint64_t seed);

/// Total element count across all parameter tensors.
std::int64_t param_count(const CompressorConfig& cfg);

/// Elementwise (T/t, H/h, W/w) reduction factors: per-axis stride products.
Stride3 ratio_components(const CompressorConfig& cfg);

/// Total compression ratio: product of all stride factors.
std::int64_t compression_ratio(const CompressorConfig& cfg);

/// Smallest stride stack realizing an exact (rt, rh, rw) reduction with
/// per-block strides in {1,2}: powers-of-two decomposition plus a trailing
/// identity block. Throws ConfigError when a ratio is not a power of two.
std::vector<Stride3> strides_for_ratio(std::int64_t rt, std::int64_t rh, std::int64_t rw);

/// Non-overlapping 3-D box-mean over (rt, rh, rw) windows per channel.
/// Throws ShapeError unless each pooled dim divides exactly.
Tensor4f avgpool3d(const Tensor4f& f, std::int64_t rt, std::int64_t rh, std::int64_t rw);

/// Learned compression C(f). Input channel count must equal channels_d and
/// every axis must divide by the stride products (ShapeError otherwise).
Tensor4f compress(const Tensor4f& f, const CompressorParams& params);

/// Constrained latent h = C(f) + avgpool3d(f) at the config's reduction
/// factors. Requires latent_constraint == avgpool_residual (ConfigError).
Tensor4f residual_compress(const Tensor4f& f, const CompressorParams& params);

/// Latent for the config's constraint: compress for none, residual sum for
/// avgpool_residual, VAE mean head for vae (the deterministic choice).
Tensor4f compress_latent(const Tensor4f& f, const CompressorParams& params);

/// Decoder D(h): mirrored upsample + residual-block stack back to input dims.
Tensor4f decompress(const Tensor4f& h, const CompressorParams& params);

// --- Checkpoints -----------------------------------------------------------
// Layout: 8-byte magic "VTCCKPT1", little-endian uint32 header length, JSON
// header {format_version, config, tensors: [{name, dims}]}, then one tensor
// record per entry in header order (see tensor_io.hpp for the record format).

inline constexpr char kCheckpointMagic[8] = {'V', 'T', 'C', 'C', 'K', 'P', 'T', '1'};

/// Write params + config. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const CompressorParams& params);

/// Read a checkpoint; validates magic, header, and that every tensor shape
/// matches the config's expected shape (ShapeError naming the tensor).
CompressorParams load_checkpoint(const std::string& path);

/// Stable content hash of a file (FNV-1a 64), hex string; identifies
/// checkpoints in manifests.
std::string file_hash_id(const std::string& path);

}  // namespace vtc
