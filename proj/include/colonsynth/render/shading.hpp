#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "colonsynth/core/vec3.hpp"
#include "colonsynth/scene/camera.hpp"

namespace colonsynth {

/// Surface state at one shading point.
struct ShadingSample {
    Vec3 albedo{1, 1, 1};  // per-channel reflectance in [0, 1]
    Vec3 normal;           // unit
    Vec3 light_dir;        // unit, surface -> light
    double distance = 1.0; // surface-light distance, cm
    double specular = 0.0; // k_s
    double shininess = 1.0;
};

/// Lambertian term with inverse-square falloff plus a Blinn lobe:
///   power * (R max(w.n, 0) + k_s max(n.h, 0)^alpha) / r^2.
/// The light sits at the camera, so the half-vector h equals w.
inline Vec3 shade(const ShadingSample& s, const LightSource& light) {
    if (!(s.distance > 0.0)) throw std::invalid_argument("shade: distance must be positive");
    const double falloff = light.power / (s.distance * s.distance);
    const double cos_theta = std::max(dot(s.light_dir, s.normal), 0.0);
    Vec3 out = s.albedo * (cos_theta * falloff);
    if (s.specular > 0.0 && cos_theta > 0.0) {
        const double lobe = s.specular * std::pow(cos_theta, s.shininess) * falloff;
        out += Vec3{lobe, lobe, lobe};
    }
    return out;
}

/// sRGB opto-electronic transfer function on [0, 1].
inline double srgb_encode(double linear) {
    linear = std::clamp(linear, 0.0, 1.0);
    return linear <= 0.0031308 ? 12.92 * linear : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

inline double srgb_decode(double encoded) {
    encoded = std::clamp(encoded, 0.0, 1.0);
    return encoded <= 0.04045 ? encoded / 12.92 : std::pow((encoded + 0.055) / 1.055, 2.4);
}

using Rgb8 = std::array<std::uint8_t, 3>;

inline std::uint8_t quantize8(double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); }

/// clamp(exposure * radiance, 0, 1), then sRGB, then 8 bits. Monotone per channel.
inline Rgb8 tone_map(const Vec3& linear, double exposure) {
    return {quantize8(srgb_encode(exposure * linear.x)), quantize8(srgb_encode(exposure * linear.y)),
            quantize8(srgb_encode(exposure * linear.z))};
}

inline double luminance(const Vec3& c) { return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z; }

}  // namespace colonsynth
