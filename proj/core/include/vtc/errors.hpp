// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vtc {

/// Base class for all vtc errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value or combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Tensor dimensions incompatible with the requested operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated file (tensor, checkpoint, score list, manifest).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Video container cannot be opened or decoded.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// Operation received an empty sequence or dataset.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

}  // namespace vtc
