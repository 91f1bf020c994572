#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "colonsynth/core/rng.hpp"
#include "colonsynth/core/vec3.hpp"
#include "colonsynth/geometry/centerline.hpp"
#include "colonsynth/render/bvh.hpp"

namespace colonsynth {

inline constexpr double kHorizontalFovDeg = 110.0;
inline constexpr double kFocalLengthCm = 0.1755;

/// Pinhole intrinsics in centered pixel coordinates: pixel (col, row) maps to
/// u = col - W/2, v = row - H/2, with the principal point at (0, 0).
struct Intrinsics {
    std::size_t width = 1280;
    std::size_t height = 1080;
    double focal_px = 0.0;
    double focal_cm = kFocalLengthCm;
    double cx = 0.0;
    double cy = 0.0;
    double horizontal_fov_deg = kHorizontalFovDeg;

    static Intrinsics for_image(std::size_t width, std::size_t height, double fov_deg = kHorizontalFovDeg) {
        if (width == 0 || height == 0) throw std::invalid_argument("Intrinsics: empty image size");
        Intrinsics k;
        k.width = width;
        k.height = height;
        k.horizontal_fov_deg = fov_deg;
        k.focal_px = (static_cast<double>(width) / 2.0) / std::tan(deg_to_rad(fov_deg / 2.0));
        return k;
    }

    /// Same camera at another resolution: the focal length in pixels scales
    /// with the width. The aspect ratio must be preserved to within a pixel.
    Intrinsics rescaled(std::size_t new_width, std::size_t new_height) const {
        if (new_width == 0 || new_height == 0) throw std::invalid_argument("Intrinsics: empty image size");
        const double sx = static_cast<double>(new_width) / static_cast<double>(width);
        const double expected_h = sx * static_cast<double>(height);
        if (std::abs(expected_h - static_cast<double>(new_height)) > 1.0) {
            throw std::invalid_argument("Intrinsics: cannot rescale " + std::to_string(width) + "x" + std::to_string(height) +
                                        " to " + std::to_string(new_width) + "x" + std::to_string(new_height) +
                                        " (aspect ratio differs)");
        }
        Intrinsics k = *this;
        k.width = new_width;
        k.height = new_height;
        k.focal_px = focal_px * sx;
        k.cx = cx * sx;
        k.cy = cy * sx;
        return k;
    }

    double u(std::size_t col) const { return static_cast<double>(col) - static_cast<double>(width) / 2.0; }
    double v(std::size_t row) const { return static_cast<double>(row) - static_cast<double>(height) / 2.0; }
};

/// Camera frame: optical axis forward, `up` orthogonal to it. Image u runs
/// along cross(axis, up) and image v along -up.
struct CameraPose {
    Vec3 position;
    Vec3 optical_axis{0, 0, 1};
    Vec3 up{0, -1, 0};

    Vec3 right() const { return cross(optical_axis, up); }
    Vec3 down() const { return -up; }

    /// Unnormalized world-space ray direction through centered pixel (u, v);
    /// its component along the optical axis is exactly 1.
    Vec3 ray_direction(double u, double v, double focal_px) const {
        return optical_axis + right() * (u / focal_px) + down() * (v / focal_px);
    }

    /// Camera-space coordinates (x right, y down, z forward) of world point p.
    Vec3 to_camera(const Vec3& p) const {
        const Vec3 d = p - position;
        return {dot(d, right()), dot(d, down()), dot(d, optical_axis)};
    }
};

/// Point light co-located with the camera, emitting a cone around the optical axis.
struct LightSource {
    Vec3 position;
    Vec3 axis{0, 0, 1};
    double cone_half_angle_deg = 140.0;
    double falloff_start_deg = 130.0;
    double power = 1.0;

    /// Angular weight in [0, 1]: 1 inside the falloff start, a cosine window to
    /// 0 at the cone edge, 0 outside.
    double cone_weight(const Vec3& to_point_unit) const {
        const double angle = rad_to_deg(std::acos(std::clamp(dot(axis, to_point_unit), -1.0, 1.0)));
        if (angle <= falloff_start_deg) return 1.0;
        if (angle >= cone_half_angle_deg) return 0.0;
        const double x = (angle - falloff_start_deg) / (cone_half_angle_deg - falloff_start_deg);
        return 0.5 * (1.0 + std::cos(kPi * x));
    }

    static LightSource at_camera(const CameraPose& pose, double power = 1.0) {
        LightSource l;
        l.position = pose.position;
        l.axis = pose.optical_axis;
        l.power = power;
        return l;
    }
};

struct CameraPathParams {
    double jitter_radius_cm = 1.0;
    double knot_spacing_cm = 2.0;   // offsets are drawn at knots and eased in between
    double min_clearance_cm = 0.8;
    int max_tries = 20;
    double start_margin_cm = 1.0;   // first pose this far from the caecum end
    double end_margin_cm = 1.0;     // last pose this far from the anus end
};

struct CameraPath {
    std::vector<CameraPose> poses;
    std::vector<double> arclength;      // centerline parameter of each pose, increasing
    std::vector<double> offset_cm;      // displacement from the centerline point
    std::size_t fallbacks = 0;          // offset shrink steps taken for clearance
};

/// Withdrawal path from the caecum (arc length 0) to the anus. Each pose is the
/// centerline point displaced inside a disc orthogonal to the tangent. Disc
/// offsets are drawn at knots and eased with smoothstep, so consecutive frames
/// move continuously. A knot offset leaving less than `min_clearance_cm` to the
/// mesh is redrawn up to `max_tries` times, then set to zero. A pose that still
/// lacks clearance has its offset halved, then quartered, then dropped.
inline CameraPath generate_camera_path(const Centerline& curve, const Bvh& bvh, std::size_t n_frames,
                                       std::uint64_t seed, const CameraPathParams& p = {}) {
    if (n_frames < 2) throw std::invalid_argument("generate_camera_path: need at least 2 frames");
    if (p.jitter_radius_cm < 0.0) throw std::invalid_argument("generate_camera_path: negative jitter radius");
    const double L = curve.length();
    const double s0 = p.start_margin_cm, s1 = L - p.end_margin_cm;
    if (!(s1 > s0)) {
        throw std::invalid_argument("generate_camera_path: centerline of " + std::to_string(L) +
                                    " cm is too short for the path margins");
    }

    // Parallel-transported disc frame at each knot.
    const auto knots = static_cast<std::size_t>(std::ceil((s1 - s0) / p.knot_spacing_cm)) + 1;
    std::vector<double> knot_s(knots);
    std::vector<Vec3> knot_n(knots), knot_b(knots);
    for (std::size_t k = 0; k < knots; ++k) {
        knot_s[k] = s0 + (s1 - s0) * static_cast<double>(k) / static_cast<double>(knots - 1);
        const Vec3 t = curve.tangent(knot_s[k]);
        Vec3 n = k == 0 ? any_orthogonal(t) : knot_n[k - 1] - t * dot(knot_n[k - 1], t);
        knot_n[k] = normalize(n);
        knot_b[k] = cross(t, knot_n[k]);
    }
    Rng rng(derive_seed(seed, 0xCA3E7A));
    std::vector<Vec3> knot_offset(knots);
    for (std::size_t k = 0; k < knots; ++k) {
        const Vec3 c = curve.point(knot_s[k]);
        for (int attempt = 0; attempt < p.max_tries; ++attempt) {
            const double r = p.jitter_radius_cm * std::sqrt(rng.uniform());
            const double phi = rng.uniform(0.0, 2.0 * kPi);
            const Vec3 off = knot_n[k] * (r * std::cos(phi)) + knot_b[k] * (r * std::sin(phi));
            const Vec3 q = c + off;
            if (bvh.closest_point(q).distance >= p.min_clearance_cm) {
                knot_offset[k] = off;
                break;
            }
        }
    }

    CameraPath path;
    path.poses.resize(n_frames);
    path.arclength.resize(n_frames);
    path.offset_cm.resize(n_frames);
    std::vector<Vec3> positions(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        const double s = s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(n_frames - 1);
        const double f = (s - s0) / (s1 - s0) * static_cast<double>(knots - 1);
        const auto k = std::min(static_cast<std::size_t>(f), knots - 2);
        double w = std::clamp(f - static_cast<double>(k), 0.0, 1.0);
        w = w * w * (3.0 - 2.0 * w);
        // A convex combination of two disc offsets, projected onto the local
        // normal plane, stays inside the disc.
        const Vec3 t = curve.tangent(s);
        Vec3 off = knot_offset[k] * (1.0 - w) + knot_offset[k + 1] * w;
        off = off - t * dot(off, t);
        const Vec3 c = curve.point(s);
        // Shrink the offset toward the centerline until the pose has clearance.
        Vec3 q = c + off;
        for (double shrink : {0.5, 0.25, 0.0}) {
            if (bvh.closest_point(q).distance >= p.min_clearance_cm) break;
            q = c + off * shrink;
            ++path.fallbacks;
        }
        positions[i] = q;
        path.arclength[i] = s;
        path.offset_cm[i] = distance(q, c);
    }

    // Optical axis along the chord to the next pose; up vector parallel-transported.
    Vec3 up;
    for (std::size_t i = 0; i < n_frames; ++i) {
        const std::size_t j0 = i + 1 < n_frames ? i : i - 1;
        Vec3 axis = normalize(positions[j0 + 1] - positions[j0]);
        if (length_squared(axis) == 0.0) axis = curve.tangent(path.arclength[i]);
        if (i == 0) {
            up = normalize(any_orthogonal(axis));
        } else {
            up = up - axis * dot(up, axis);
            up = length_squared(up) > 1e-24 ? normalize(up) : any_orthogonal(axis);
        }
        path.poses[i] = {positions[i], axis, up};
    }
    return path;
}

}  // namespace colonsynth
