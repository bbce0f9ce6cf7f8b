// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include "vtc/tensor_io.hpp"

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "vtc/errors.hpp"

namespace vtc {

namespace {

void put_u32le(std::ostream& os, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>((v >> 8) & 0xff),
                                static_cast<unsigned char>((v >> 16) & 0xff),
                                static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw FormatError("tensor file truncated in header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void write_tensor_record(std::ostream& os, const Tensor4f& t) {
    for (int i = 0; i < 4; ++i) {
        if (t.dim(i) < 1) throw FormatError("tensor record requires all dims >= 1");
        if (t.dim(i) > 0xffffffffLL) throw FormatError("tensor dim exceeds format limit");
    }
    os.write(kTensorMagic, sizeof(kTensorMagic));
    for (int i = 0; i < 4; ++i) put_u32le(os, static_cast<std::uint32_t>(t.dim(i)));
    static_assert(std::endian::native == std::endian::little,
                  "float serialization assumes a little-endian host");
    os.write(reinterpret_cast<const char*>(t.data()),
             static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!os) throw FormatError("failed writing tensor record");
}

Tensor4f read_tensor_record(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kTensorMagic, 8) != 0)
        throw FormatError("bad tensor magic (not a tensor file)");
    std::array<std::int64_t, 4> dims{};
    for (int i = 0; i < 4; ++i) {
        dims[static_cast<std::size_t>(i)] = get_u32le(is);
        if (dims[static_cast<std::size_t>(i)] < 1)
            throw FormatError("tensor record has a zero dimension");
    }
    Tensor4f t(dims);
    is.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!is) throw FormatError("tensor file truncated in data");
    if (!t.all_finite()) throw FormatError("tensor file contains non-finite values");
    return t;
}

void save_tensor(const std::string& path, const Tensor4f& t) {
    if (!t.all_finite()) throw FormatError("refusing to save non-finite tensor: " + path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open for writing: " + path);
    write_tensor_record(os, t);
    os.flush();
    if (!os) throw FormatError("failed writing tensor file: " + path);
}

Tensor4f load_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open tensor file: " + path);
    Tensor4f t = read_tensor_record(is);
    is.peek();
    if (!is.eof()) throw FormatError("trailing bytes after tensor record: " + path);
    return t;
}

Tensor4f load_features(const std::string& path) { return load_tensor(path); }

void save_features(const std::string& path, const Tensor4f& t, const std::string& source_id,
                   const nlohmann::json& config) {
    save_tensor(path, t);
    nlohmann::json side;
    side["source_id"] = source_id;
    side["config"] = config;
    side["dims"] = {t.dim(0), t.dim(1), t.dim(2), t.dim(3)};
    side["created"] = iso8601_utc_now();
    std::ofstream os(sidecar_path(path));
    if (!os) throw FormatError("cannot open sidecar for writing: " + sidecar_path(path));
    os << side.dump(2) << "\n";
}

std::string sidecar_path(const std::string& tensor_path) {
    const std::size_t slash = tensor_path.find_last_of('/');
    const std::size_t dot = tensor_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return tensor_path + ".json";
    return tensor_path.substr(0, dot) + ".json";
}

}  // namespace vtc
