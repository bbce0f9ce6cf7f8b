// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "vtc/tensor.hpp"

namespace vtc {

// Tensor file format, used for features, latents and checkpoint blobs:
//   8-byte magic "VTFTENS1"
//   4 little-endian uint32 dims (T, H, W, C), each >= 1
//   T*H*W*C little-endian float32 values, row-major, T outermost
inline constexpr char kTensorMagic[8] = {'V', 'T', 'F', 'T', 'E', 'N', 'S', '1'};

/// Write one tensor record to a stream (magic + dims + data).
void write_tensor_record(std::ostream& os, const Tensor4f& t);

/// Read one tensor record from a stream. Throws FormatError on bad magic,
/// zero dims, truncation, or non-finite values.
Tensor4f read_tensor_record(std::istream& is);

/// Save a tensor to `path` as a single record. Refuses non-finite values.
void save_tensor(const std::string& path, const Tensor4f& t);

/// Load a tensor file. Throws FormatError if the file does not contain
/// exactly one well-formed record.
Tensor4f load_tensor(const std::string& path);

/// Loader alias for feature tensors; identical to load_tensor.
Tensor4f load_features(const std::string& path);

/// Save a feature/latent tensor plus a JSON sidecar (same basename, `.json`)
/// recording source_id, the producing config, and creation time.
void save_features(const std::string& path, const Tensor4f& t,
                   const std::string& source_id, const nlohmann::json& config);

/// Sidecar path for a tensor file: extension replaced by ".json".
std::string sidecar_path(const std::string& tensor_path);

}  // namespace vtc
