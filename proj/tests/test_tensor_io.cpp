// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vtc/errors.hpp"
#include "vtc/tensor.hpp"
#include "vtc/tensor_io.hpp"

using vtc::Tensor4f;

TEST_CASE("tensor: zero-initialized, row-major indexing, dims") {
    Tensor4f t({2, 3, 4, 5});
    CHECK(t.numel() == 120);
    for (std::int64_t i = 0; i < t.numel(); ++i) CHECK(t.data()[i] == 0.0f);
    t(1, 2, 3, 4) = 7.0f;
    // (t,h,w,c) with strides (60, 20, 5, 1): last element of the buffer.
    CHECK(t.data()[119] == 7.0f);
    t(0, 0, 0, 1) = 3.0f;
    CHECK(t.data()[1] == 3.0f);
    CHECK_THROWS_AS(Tensor4f(-1, 2, 2, 2), vtc::ShapeError);
}

TEST_CASE("tensor: max_abs_diff and cast") {
    Tensor4f a({1, 1, 2, 2});
    Tensor4f b({1, 1, 2, 2});
    a(0, 0, 1, 1) = 2.0f;
    b(0, 0, 1, 1) = 2.5f;
    CHECK(vtc::max_abs_diff(a, b) == doctest::Approx(0.5));
    const auto d = vtc::tensor_cast<double>(a);
    CHECK(d(0, 0, 1, 1) == 2.0);
    Tensor4f c({2, 1, 2, 2});
    CHECK_THROWS_AS(vtc::max_abs_diff(a, c), vtc::ShapeError);
}

TEST_CASE("tensor file: save/load round-trips bit-exactly") {
    testutil::TempDir tmp;
    const Tensor4f t = oracle::random_tensor<float>({3, 4, 5, 6}, 42);
    const std::string path = tmp.file("t.bin");
    vtc::save_tensor(path, t);
    const Tensor4f back = vtc::load_tensor(path);
    CHECK(back.dims() == t.dims());
    for (std::int64_t i = 0; i < t.numel(); ++i) CHECK(back.data()[i] == t.data()[i]);

    // Byte-level: re-saving the loaded tensor reproduces the file exactly.
    const std::string path2 = tmp.file("t2.bin");
    vtc::save_tensor(path2, back);
    CHECK(testutil::slurp(path) == testutil::slurp(path2));
    // Header is 8 magic + 16 dim bytes, then 4 bytes per value.
    CHECK(testutil::slurp(path).size() == 24 + 4 * static_cast<std::size_t>(t.numel()));
}

TEST_CASE("tensor file: malformed inputs are rejected") {
    testutil::TempDir tmp;
    const Tensor4f t = oracle::random_tensor<float>({2, 2, 2, 2}, 1);
    const std::string path = tmp.file("t.bin");
    vtc::save_tensor(path, t);

    SUBCASE("bad magic") {
        std::string bytes = testutil::slurp(path);
        bytes[0] = 'X';
        std::ofstream(tmp.file("bad.bin"), std::ios::binary) << bytes;
        CHECK_THROWS_AS(vtc::load_tensor(tmp.file("bad.bin")), vtc::FormatError);
    }
    SUBCASE("truncated payload") {
        std::string bytes = testutil::slurp(path);
        bytes.resize(bytes.size() - 5);
        std::ofstream(tmp.file("bad.bin"), std::ios::binary) << bytes;
        CHECK_THROWS_AS(vtc::load_tensor(tmp.file("bad.bin")), vtc::FormatError);
    }
    SUBCASE("trailing bytes") {
        std::string bytes = testutil::slurp(path) + "junk";
        std::ofstream(tmp.file("bad.bin"), std::ios::binary) << bytes;
        CHECK_THROWS_AS(vtc::load_tensor(tmp.file("bad.bin")), vtc::FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(vtc::load_tensor(tmp.file("nope.bin")), vtc::FormatError);
    }
    SUBCASE("non-finite values refused on save") {
        Tensor4f bad({1, 1, 1, 1});
        bad(0, 0, 0, 0) = std::numeric_limits<float>::infinity();
        CHECK_THROWS_AS(vtc::save_tensor(tmp.file("inf.bin"), bad), vtc::FormatError);
    }
}

TEST_CASE("feature sidecar: written next to the tensor with config echo") {
    testutil::TempDir tmp;
    const Tensor4f t = oracle::random_tensor<float>({2, 2, 2, 4}, 3);
    const std::string path = tmp.file("feat.bin");
    vtc::save_features(path, t, "clip01", {{"patch_px", 16}});
    CHECK(vtc::sidecar_path(path) == tmp.file("feat.json"));
    const std::string side = testutil::slurp(vtc::sidecar_path(path));
    CHECK(side.find("clip01") != std::string::npos);
    CHECK(side.find("patch_px") != std::string::npos);
    // The tensor payload itself is unchanged by the sidecar.
    const Tensor4f back = vtc::load_features(path);
    CHECK(vtc::max_abs_diff(back, t) == 0.0);
}
