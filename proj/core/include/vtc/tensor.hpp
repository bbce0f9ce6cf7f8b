// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <initializer_list>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vtc/errors.hpp"

namespace vtc {

/// Dense 4-D tensor with (T, H, W, C) axis order and row-major layout,
/// channels contiguous. All feature, latent, and parameter tensors in the
/// library use this type; parameter tensors reinterpret the axes (e.g. a
/// spatial conv kernel is stored as (kh, kw, c_in, c_out)).
template <typename T>
class Tensor4 {
public:
    Tensor4() = default;

    Tensor4(std::int64_t t, std::int64_t h, std::int64_t w, std::int64_t c)
        : dims_{t, h, w, c} {
        if (t < 0 || h < 0 || w < 0 || c < 0) {
            throw ShapeError("tensor dimensions must be non-negative");
        }
        data_.assign(static_cast<std::size_t>(t) * h * w * c, T(0));
    }

    explicit Tensor4(const std::array<std::int64_t, 4>& d)
        : Tensor4(d[0], d[1], d[2], d[3]) {}

    Tensor4(std::initializer_list<std::int64_t> d)
        : Tensor4(d.size() == 4 ? *d.begin() : throw ShapeError("tensor needs 4 dims"),
                  *(d.begin() + 1), *(d.begin() + 2), *(d.begin() + 3)) {}

    const std::array<std::int64_t, 4>& dims() const { return dims_; }
    std::int64_t dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
    std::int64_t numel() const {
        return dims_[0] * dims_[1] * dims_[2] * dims_[3];
    }
    bool empty() const { return data_.empty(); }

    T& operator()(std::int64_t t, std::int64_t h, std::int64_t w, std::int64_t c) {
        return data_[static_cast<std::size_t>(((t * dims_[1] + h) * dims_[2] + w) * dims_[3] + c)];
    }
    const T& operator()(std::int64_t t, std::int64_t h, std::int64_t w, std::int64_t c) const {
        return data_[static_cast<std::size_t>(((t * dims_[1] + h) * dims_[2] + w) * dims_[3] + c)];
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    void fill(T v) { data_.assign(data_.size(), v); }

    bool same_dims(const Tensor4& other) const { return dims_ == other.dims_; }

    bool all_finite() const {
        for (const T& v : data_) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }

private:
    std::array<std::int64_t, 4> dims_{0, 0, 0, 0};
    std::vector<T> data_;
};

using Tensor4f = Tensor4<float>;
using Tensor4d = Tensor4<double>;

template <typename To, typename From>
Tensor4<To> tensor_cast(const Tensor4<From>& src) {
    Tensor4<To> out(src.dims());
    for (std::size_t i = 0; i < src.size(); ++i) {
        out.data()[i] = static_cast<To>(src.data()[i]);
    }
    return out;
}

/// Max absolute elementwise difference. Dims must match.
template <typename T>
double max_abs_diff(const Tensor4<T>& a, const Tensor4<T>& b) {
    if (!a.same_dims(b)) throw ShapeError("max_abs_diff: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i])));
    }
    return m;
}

}  // namespace vtc
