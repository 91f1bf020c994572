#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "colonsynth/core/image.hpp"

namespace colonsynth {

/// Raw tensor exchange file: uint32 H, uint32 W, then H*W float32 values in
/// row-major order, everything little-endian and unpadded (8 + 4*H*W bytes).
inline constexpr std::size_t kTensorHeaderBytes = 8;

namespace detail {
inline void put_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xFFu));
}
inline std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
}  // namespace detail

inline std::vector<unsigned char> encode_tensor(const ImageD& img) {
    if (img.width() > UINT32_MAX || img.height() > UINT32_MAX) throw std::invalid_argument("encode_tensor: too large");
    std::vector<unsigned char> out;
    out.reserve(kTensorHeaderBytes + 4 * img.size());
    detail::put_u32le(out, static_cast<std::uint32_t>(img.height()));
    detail::put_u32le(out, static_cast<std::uint32_t>(img.width()));
    for (std::size_t i = 0; i < img.size(); ++i) {
        detail::put_u32le(out, std::bit_cast<std::uint32_t>(static_cast<float>(img[i])));
    }
    return out;
}

inline ImageD decode_tensor(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < kTensorHeaderBytes) throw std::runtime_error("decode_tensor: truncated header");
    const std::size_t h = detail::get_u32le(bytes.data());
    const std::size_t w = detail::get_u32le(bytes.data() + 4);
    if (bytes.size() != kTensorHeaderBytes + 4 * h * w) {
        throw std::runtime_error("decode_tensor: expected " + std::to_string(kTensorHeaderBytes + 4 * h * w) +
                                 " bytes for " + std::to_string(h) + "x" + std::to_string(w) + ", got " +
                                 std::to_string(bytes.size()));
    }
    ImageD img(w, h);
    for (std::size_t i = 0; i < h * w; ++i) {
        img[i] = std::bit_cast<float>(detail::get_u32le(bytes.data() + kTensorHeaderBytes + 4 * i));
    }
    return img;
}

inline void write_tensor(const std::string& path, const ImageD& img) {
    const auto bytes = encode_tensor(img);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_tensor: cannot open " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write_tensor: write failed for " + path);
}

inline ImageD read_tensor(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_tensor: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    try {
        return decode_tensor(bytes);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " (" + path + ")");
    }
}

}  // namespace colonsynth
