#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "colonsynth/core/image.hpp"
#include "colonsynth/render/shading.hpp"

namespace colonsynth {

/// 16-bit depth code for d cm: round(d / d_max * 65535).
inline std::uint16_t encode_depth16(double depth_cm, double d_max = 25.0) {
    const double x = std::clamp(depth_cm / d_max, 0.0, 1.0);
    return static_cast<std::uint16_t>(std::lround(x * 65535.0));
}

inline double decode_depth16(std::uint16_t code, double d_max = 25.0) { return static_cast<double>(code) / 65535.0 * d_max; }

namespace detail {

inline void write_png(const std::string& path, std::uint32_t width, std::uint32_t height, png_uint_32 format,
                      const void* buffer) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = width;
    image.height = height;
    image.format = format;
    if (!png_image_write_to_file(&image, path.c_str(), 0, buffer, 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw std::runtime_error("write_png: " + path + ": " + msg);
    }
}

template <typename T>
std::vector<T> read_png(const std::string& path, png_uint_32 format, std::size_t channels, std::size_t& width,
                        std::size_t& height) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw std::runtime_error("read_png: " + path + ": " + image.message);
    }
    image.format = format;
    width = image.width;
    height = image.height;
    std::vector<T> buffer(static_cast<std::size_t>(image.width) * image.height * channels);
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw std::runtime_error("read_png: " + path + ": " + msg);
    }
    return buffer;
}

}  // namespace detail

inline void write_png_rgb8(const std::string& path, const Image<Rgb8>& img) {
    detail::write_png(path, static_cast<std::uint32_t>(img.width()), static_cast<std::uint32_t>(img.height()),
                      PNG_FORMAT_RGB, img.data().data());
}

/// Writes raw 16-bit gray codes (no colour conversion is applied to the values).
inline void write_png_gray16(const std::string& path, const Image<std::uint16_t>& img) {
    detail::write_png(path, static_cast<std::uint32_t>(img.width()), static_cast<std::uint32_t>(img.height()),
                      PNG_FORMAT_LINEAR_Y, img.data().data());
}

inline Image<Rgb8> read_png_rgb8(const std::string& path) {
    std::size_t w = 0, h = 0;
    const auto raw = detail::read_png<std::uint8_t>(path, PNG_FORMAT_RGB, 3, w, h);
    std::vector<Rgb8> px(w * h);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
    return Image<Rgb8>(w, h, std::move(px));
}

inline Image<std::uint16_t> read_png_gray16(const std::string& path) {
    std::size_t w = 0, h = 0;
    auto raw = detail::read_png<std::uint16_t>(path, PNG_FORMAT_LINEAR_Y, 1, w, h);
    return Image<std::uint16_t>(w, h, std::move(raw));
}

inline void write_depth_png(const std::string& path, const ImageD& depth_cm, double d_max = 25.0) {
    Image<std::uint16_t> codes(depth_cm.width(), depth_cm.height());
    for (std::size_t i = 0; i < depth_cm.size(); ++i) codes[i] = encode_depth16(depth_cm[i], d_max);
    write_png_gray16(path, codes);
}

inline ImageD read_depth_png(const std::string& path, double d_max = 25.0) {
    const auto codes = read_png_gray16(path);
    ImageD out(codes.width(), codes.height());
    for (std::size_t i = 0; i < codes.size(); ++i) out[i] = decode_depth16(codes[i], d_max);
    return out;
}

}  // namespace colonsynth
