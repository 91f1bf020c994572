#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "colonsynth/core/image.hpp"
#include "colonsynth/core/parallel.hpp"
#include "colonsynth/render/bvh.hpp"
#include "colonsynth/render/shading.hpp"
#include "colonsynth/scene/camera.hpp"
#include "colonsynth/scene/materials.hpp"

namespace colonsynth {

/// Farthest depth represented in a depth map, cm. Misses are stored as this value.
inline constexpr double kMaxDepthCm = 25.0;

using DepthMap = ImageD;
using RgbFrame = Image<Rgb8>;
using LinearImage = Image<Vec3>;

struct RenderSettings {
    bool supersample = false;  // 2x2 rays per pixel for colour only; depth always uses the centre ray
    double max_depth_cm = kMaxDepthCm;
    unsigned threads = 0;      // 0: global cap
};

struct LinearFrame {
    LinearImage radiance;
    DepthMap depth;
};

namespace detail {

struct PixelSample {
    Vec3 radiance;
    double depth;
};

inline PixelSample trace(const Bvh& bvh, const MaterialTable& materials, const CameraPose& pose,
                         const LightSource& light, double u, double v, double focal_px, double max_depth) {
    const Ray ray{pose.position, pose.ray_direction(u, v, focal_px)};
    // The direction has unit component along the optical axis, so t is the planar depth.
    const auto hit = bvh.intersect(ray, max_depth);
    if (!hit) return {{0, 0, 0}, max_depth};
    const TriMesh& mesh = bvh.mesh();
    const auto& tri = mesh.triangles[hit->triangle];
    const Vec3 p = ray.origin + ray.direction * hit->t;
    const double w0 = 1.0 - hit->u - hit->v;
    Vec3 n = normalize(mesh.normals[tri[0]] * w0 + mesh.normals[tri[1]] * hit->u + mesh.normals[tri[2]] * hit->v);
    if (length_squared(n) == 0.0) n = normalize(cross(mesh.vertices[tri[1]] - mesh.vertices[tri[0]],
                                                      mesh.vertices[tri[2]] - mesh.vertices[tri[0]]));
    const Vec3 to_light = light.position - p;
    const double r = length(to_light);
    if (!(r > 0.0)) return {{0, 0, 0}, std::min(hit->t, max_depth)};
    const SurfaceParams surf = materials.at(mesh.materials[tri[0]], p);
    ShadingSample s;
    s.albedo = surf.albedo;
    s.normal = n;
    s.light_dir = to_light / r;
    s.distance = r;
    s.specular = surf.specular;
    s.shininess = surf.shininess;
    const double cone = light.cone_weight(-s.light_dir);
    return {shade(s, light) * cone, std::min(hit->t, max_depth)};
}

}  // namespace detail

/// Casts one primary ray per pixel (plus optional colour supersamples).
/// Depth is the planar z-depth of the nearest hit, clamped to max_depth_cm;
/// misses get max_depth_cm and zero radiance. Pixels are independent, so the
/// result does not depend on the thread count.
inline LinearFrame render_linear(const Bvh& bvh, const MaterialTable& materials, const CameraPose& pose,
                                 const Intrinsics& k, const LightSource& light, const RenderSettings& settings = {}) {
    LinearFrame out{LinearImage(k.width, k.height), DepthMap(k.width, k.height, settings.max_depth_cm)};
    parallel_for(
        k.height,
        [&](std::size_t row) {
            for (std::size_t col = 0; col < k.width; ++col) {
                const double u = k.u(col), v = k.v(row);
                const auto centre = detail::trace(bvh, materials, pose, light, u, v, k.focal_px, settings.max_depth_cm);
                out.depth(col, row) = centre.depth;
                if (!settings.supersample) {
                    out.radiance(col, row) = centre.radiance;
                    continue;
                }
                Vec3 acc{0, 0, 0};
                for (double dv : {-0.25, 0.25}) {
                    for (double du : {-0.25, 0.25}) {
                        acc += detail::trace(bvh, materials, pose, light, u + du, v + dv, k.focal_px,
                                             settings.max_depth_cm).radiance;
                    }
                }
                out.radiance(col, row) = acc * 0.25;
            }
        },
        settings.threads);
    return out;
}

/// Exposure that maps the 90th-percentile luminance of a frame to 0.85.
inline double auto_exposure(const LinearImage& radiance, double percentile = 0.9, double target = 0.85) {
    std::vector<double> lum;
    lum.reserve(radiance.size());
    for (const auto& c : radiance.pixels()) lum.push_back(luminance(c));
    if (lum.empty()) return 1.0;
    const auto idx = static_cast<std::size_t>(std::floor(percentile * static_cast<double>(lum.size() - 1)));
    std::nth_element(lum.begin(), lum.begin() + static_cast<std::ptrdiff_t>(idx), lum.end());
    const double p = lum[idx];
    return p > 0.0 ? target / p : 1.0;
}

inline RgbFrame tone_map(const LinearImage& radiance, double exposure) {
    RgbFrame out(radiance.width(), radiance.height());
    for (std::size_t i = 0; i < radiance.size(); ++i) out[i] = tone_map(radiance[i], exposure);
    return out;
}

struct Frame {
    RgbFrame rgb;
    DepthMap depth;
};

inline Frame render_frame(const Bvh& bvh, const MaterialTable& materials, const CameraPose& pose, const Intrinsics& k,
                          const LightSource& light, double exposure, const RenderSettings& settings = {}) {
    auto lin = render_linear(bvh, materials, pose, k, light, settings);
    return {tone_map(lin.radiance, exposure), std::move(lin.depth)};
}

}  // namespace colonsynth
