// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include "vtc/compressor.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include "vtc/model.hpp"
#include "vtc/nn.hpp"
#include "vtc/tensor_io.hpp"

namespace vtc {

std::string to_string(LatentConstraint c) {
    switch (c) {
        case LatentConstraint::none: return "none";
        case LatentConstraint::vae: return "vae";
        case LatentConstraint::avgpool_residual: return "avgpool_residual";
    }
    throw ConfigError("unknown latent constraint value");
}

LatentConstraint latent_constraint_from_string(const std::string& s) {
    if (s == "none") return LatentConstraint::none;
    if (s == "vae") return LatentConstraint::vae;
    if (s == "avgpool_residual") return LatentConstraint::avgpool_residual;
    throw ConfigError("unknown latent constraint: " + s);
}

void validate_config(const CompressorConfig& cfg) {
    if (cfg.strides.empty()) throw ConfigError("compressor needs at least one block");
    for (const Stride3& s : cfg.strides) {
        model::check_stride(s.t);
        model::check_stride(s.h);
        model::check_stride(s.w);
    }
    if (cfg.channels_d < 1) throw ConfigError("channels_d must be >= 1");
    if (cfg.bottleneck_div < 1) throw ConfigError("bottleneck_div must be >= 1");
    if (cfg.channels_d % cfg.bottleneck_div != 0)
        throw ConfigError("channels_d must be divisible by bottleneck_div");
    if (cfg.spatial_kernel < 1 || cfg.temporal_kernel < 1)
        throw ConfigError("kernel sizes must be >= 1");
}

nlohmann::json config_to_json(const CompressorConfig& cfg) {
    nlohmann::json j;
    nlohmann::json strides = nlohmann::json::array();
    for (const Stride3& s : cfg.strides) strides.push_back({s.t, s.h, s.w});
    j["strides"] = strides;
    j["channels_d"] = cfg.channels_d;
    j["bottleneck_div"] = cfg.bottleneck_div;
    j["spatial_kernel"] = cfg.spatial_kernel;
    j["temporal_kernel"] = cfg.temporal_kernel;
    j["latent_constraint"] = to_string(cfg.latent_constraint);
    j["init_seed"] = cfg.init_seed;
    j["zero_init_residual"] = cfg.zero_init_residual;
    return j;
}

CompressorConfig config_from_json(const nlohmann::json& j) {
    CompressorConfig cfg;
    cfg.strides.clear();
    for (const auto& s : j.at("strides"))
        cfg.strides.push_back({s.at(0).get<std::int64_t>(), s.at(1).get<std::int64_t>(),
                               s.at(2).get<std::int64_t>()});
    cfg.channels_d = j.at("channels_d").get<std::int64_t>();
    cfg.bottleneck_div = j.at("bottleneck_div").get<std::int64_t>();
    cfg.spatial_kernel = j.at("spatial_kernel").get<std::int64_t>();
    cfg.temporal_kernel = j.at("temporal_kernel").get<std::int64_t>();
    cfg.latent_constraint = latent_constraint_from_string(j.at("latent_constraint"));
    cfg.init_seed = j.at("init_seed").get<std::uint64_t>();
    cfg.zero_init_residual = j.at("zero_init_residual").get<bool>();
    validate_config(cfg);
    return cfg;
}

std::vector<std::pair<std::string, std::array<std::int64_t, 4>>> param_shapes(
    const CompressorConfig& cfg) {
    validate_config(cfg);
    std::vector<std::pair<std::string, std::array<std::int64_t, 4>>> shapes;
    model::for_each_param(cfg, [&](const std::string& name,
                                   const std::array<std::int64_t, 4>& dims) {
        shapes.emplace_back(name, dims);
    });
    return shapes;
}

CompressorParams init_params(const CompressorConfig& cfg, std::uint64_t seed) {
    validate_config(cfg);
    CompressorParams cp;
    cp.cfg = cfg;
    cp.cfg.init_seed = seed;
    std::mt19937_64 rng(seed);
    // Weight tensors are (k0, k1, ci, co): fan-in = k0*k1*ci. Biases reuse
    // their layer's fan-in (the preceding weight in canonical order).
    double bias_bound = 0.0;
    model::for_each_param(cfg, [&](const std::string& name,
                                   const std::array<std::int64_t, 4>& dims) {
        Tensor4f t(dims);
        double bound;
        if (name.ends_with(".weight")) {
            const double fan_in = static_cast<double>(dims[0] * dims[1] * dims[2]);
            bound = 1.0 / std::sqrt(fan_in);
            bias_bound = bound;
        } else {
            bound = bias_bound;
        }
        std::uniform_real_distribution<double> ud(-bound, bound);
        for (std::int64_t i = 0; i < t.numel(); ++i)
            t.data()[i] = static_cast<float>(ud(rng));
        cp.tensors.add(name, std::move(t));
    });
    if (cfg.zero_init_residual && cfg.latent_constraint == LatentConstraint::avgpool_residual) {
        // Start exactly at the pool-and-replicate solution: C(f) = 0 and the
        // decoder residual branches vanish, leaving pure nearest-neighbor
        // upsampling.
        cp.tensors.at("enc.head.weight").fill(0.0f);
        cp.tensors.at("enc.head.bias").fill(0.0f);
        for (std::size_t j = 0; j < cfg.strides.size(); ++j) {
            const std::string prefix = "dec.block" + std::to_string(j) + ".conv1.temporal";
            cp.tensors.at(prefix + ".weight").fill(0.0f);
            cp.tensors.at(prefix + ".bias").fill(0.0f);
        }
    }
    return cp;
}

std::int64_t param_count(const CompressorConfig& cfg) {
    std::int64_t n = 0;
    for (const auto& [name, dims] : param_shapes(cfg))
        n += dims[0] * dims[1] * dims[2] * dims[3];
    return n;
}

Stride3 ratio_components(const CompressorConfig& cfg) {
    Stride3 r{1, 1, 1};
    for (const Stride3& s : cfg.strides) {
        r.t *= s.t;
        r.h *= s.h;
        r.w *= s.w;
    }
    return r;
}

std::int64_t compression_ratio(const CompressorConfig& cfg) {
    const Stride3 r = ratio_components(cfg);
    return r.t * r.h * r.w;
}

std::vector<Stride3> strides_for_ratio(std::int64_t rt, std::int64_t rh, std::int64_t rw) {
    const auto log2_exact = [](std::int64_t v, const char* axis) {
        if (v < 1 || (v & (v - 1)) != 0)
            throw ConfigError(std::string("reduction ratio on ") + axis +
                              " axis must be a power of two");
        int n = 0;
        while (v > 1) {
            v >>= 1;
            ++n;
        }
        return n;
    };
    const int nt = log2_exact(rt, "temporal");
    const int nh = log2_exact(rh, "height");
    const int nw = log2_exact(rw, "width");
    const int blocks = std::max({nt, nh, nw});
    std::vector<Stride3> strides;
    for (int i = 0; i < blocks; ++i)
        strides.push_back({i < nt ? 2 : 1, i < nh ? 2 : 1, i < nw ? 2 : 1});
    strides.push_back({1, 1, 1});  // trailing non-downsampling block
    return strides;
}

Tensor4f avgpool3d(const Tensor4f& f, std::int64_t rt, std::int64_t rh, std::int64_t rw) {
    return nn::avgpool3d_t(f, rt, rh, rw);
}

namespace {

void check_compress_input(const Tensor4f& f, const CompressorConfig& cfg) {
    validate_config(cfg);
    if (f.dim(3) != cfg.channels_d)
        throw ShapeError("compress: input channels " + std::to_string(f.dim(3)) +
                         " do not match channels_d " + std::to_string(cfg.channels_d));
    const Stride3 r = ratio_components(cfg);
    if (f.dim(0) % r.t || f.dim(1) % r.h || f.dim(2) % r.w)
        throw ShapeError("compress: input dims must divide by stride products");
}

}  // namespace

Tensor4f compress(const Tensor4f& f, const CompressorParams& params) {
    check_compress_input(f, params.cfg);
    return model::encoder_forward<float>(params.tensors, params.cfg, f, nullptr);
}

Tensor4f residual_compress(const Tensor4f& f, const CompressorParams& params) {
    if (params.cfg.latent_constraint != LatentConstraint::avgpool_residual)
        throw ConfigError("residual_compress requires the avgpool_residual constraint");
    Tensor4f h = compress(f, params);
    const Stride3 r = ratio_components(params.cfg);
    const Tensor4f pooled = avgpool3d(f, r.t, r.h, r.w);
    for (std::int64_t i = 0; i < h.numel(); ++i) h.data()[i] += pooled.data()[i];
    return h;
}

Tensor4f compress_latent(const Tensor4f& f, const CompressorParams& params) {
    switch (params.cfg.latent_constraint) {
        case LatentConstraint::none:
            return compress(f, params);
        case LatentConstraint::avgpool_residual:
            return residual_compress(f, params);
        case LatentConstraint::vae: {
            // Deterministic inference choice: the mean head output.
            const Tensor4f c = compress(f, params);
            return nn::pointwise(c, params.tensors.at("vae.mean.weight"),
                                 params.tensors.at("vae.mean.bias"));
        }
    }
    throw ConfigError("unknown latent constraint value");
}

Tensor4f decompress(const Tensor4f& h, const CompressorParams& params) {
    validate_config(params.cfg);
    if (h.dim(3) != params.cfg.channels_d)
        throw ShapeError("decompress: latent channels do not match channels_d");
    return model::decoder_forward<float>(params.tensors, params.cfg, h, nullptr);
}

void save_checkpoint(const std::string& path, const CompressorParams& params) {
    validate_config(params.cfg);
    nlohmann::json header;
    header["format_version"] = 1;
    header["config"] = config_to_json(params.cfg);
    nlohmann::json tensors = nlohmann::json::array();
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
        const auto& d = params.tensors.tensor(i).dims();
        tensors.push_back({{"name", params.tensors.name(i)}, {"dims", {d[0], d[1], d[2], d[3]}}});
    }
    header["tensors"] = tensors;
    const std::string header_str = header.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open checkpoint for writing: " + path);
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    const std::uint32_t len = static_cast<std::uint32_t>(header_str.size());
    const unsigned char lb[4] = {static_cast<unsigned char>(len & 0xff),
                                 static_cast<unsigned char>((len >> 8) & 0xff),
                                 static_cast<unsigned char>((len >> 16) & 0xff),
                                 static_cast<unsigned char>((len >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(lb), 4);
    os.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    for (std::size_t i = 0; i < params.tensors.size(); ++i)
        write_tensor_record(os, params.tensors.tensor(i));
    os.flush();
    if (!os) throw FormatError("failed writing checkpoint: " + path);
}

CompressorParams load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw FormatError("bad checkpoint magic: " + path);
    unsigned char lb[4];
    is.read(reinterpret_cast<char*>(lb), 4);
    if (!is) throw FormatError("checkpoint truncated in header length");
    const std::uint32_t len = static_cast<std::uint32_t>(lb[0]) |
                              (static_cast<std::uint32_t>(lb[1]) << 8) |
                              (static_cast<std::uint32_t>(lb[2]) << 16) |
                              (static_cast<std::uint32_t>(lb[3]) << 24);
    std::string header_str(len, '\0');
    is.read(header_str.data(), static_cast<std::streamsize>(len));
    if (!is) throw FormatError("checkpoint truncated in header");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_str);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint header is not valid JSON: ") + e.what());
    }
    if (header.at("format_version").get<int>() != 1)
        throw FormatError("unsupported checkpoint format version");

    CompressorParams cp;
    cp.cfg = config_from_json(header.at("config"));
    const auto expected = param_shapes(cp.cfg);
    const auto& listed = header.at("tensors");
    if (listed.size() != expected.size())
        throw FormatError("checkpoint tensor count does not match its config");
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const std::string name = listed[i].at("name").get<std::string>();
        if (name != expected[i].first)
            throw FormatError("checkpoint tensor order mismatch: expected " +
                              expected[i].first + ", found " + name);
        Tensor4f t = read_tensor_record(is);
        const auto& want = expected[i].second;
        if (t.dims() != want)
            throw ShapeError("checkpoint tensor " + name + " has shape (" +
                             std::to_string(t.dim(0)) + "," + std::to_string(t.dim(1)) + "," +
                             std::to_string(t.dim(2)) + "," + std::to_string(t.dim(3)) +
                             "), config expects (" + std::to_string(want[0]) + "," +
                             std::to_string(want[1]) + "," + std::to_string(want[2]) + "," +
                             std::to_string(want[3]) + ")");
        cp.tensors.add(name, std::move(t));
    }
    is.peek();
    if (!is.eof()) throw FormatError("trailing bytes after checkpoint tensors: " + path);
    return cp;
}

std::string file_hash_id(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open file for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    char buf[65536];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!is) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

}  // namespace vtc
