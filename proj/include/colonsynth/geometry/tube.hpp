#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "colonsynth/geometry/centerline.hpp"
#include "colonsynth/geometry/mesh.hpp"
#include "colonsynth/geometry/profile.hpp"

namespace colonsynth {

struct TubeResolution {
    std::size_t axial_steps = 600;
    std::size_t radial_steps = 96;
};

/// Sweeps the lumen profile along the centerline with rotation-minimizing
/// frames. Triangles are wound so vertex normals face the axis.
inline TriMesh extrude_tube(const Centerline& curve, const LumenProfile& profile, std::size_t axial_steps,
                            std::size_t radial_steps) {
    if (axial_steps < 2) throw std::invalid_argument("extrude_tube: axial_steps must be >= 2");
    if (radial_steps < 3) throw std::invalid_argument("extrude_tube: radial_steps must be >= 3");
    const double L = curve.length();
    if (!(L > 0.0)) throw std::invalid_argument("extrude_tube: zero-length centerline");

    TubeLayout layout;
    layout.axial_steps = axial_steps;
    layout.radial_steps = radial_steps;
    layout.ring_arclength.resize(axial_steps);
    layout.ring_center.resize(axial_steps);
    layout.ring_tangent.resize(axial_steps);
    layout.ring_normal.resize(axial_steps);
    layout.ring_binormal.resize(axial_steps);

    for (std::size_t i = 0; i < axial_steps; ++i) {
        const double s = L * static_cast<double>(i) / static_cast<double>(axial_steps - 1);
        layout.ring_arclength[i] = s;
        layout.ring_center[i] = curve.point(s);
        layout.ring_tangent[i] = curve.tangent(s);  // throws on degenerate derivative
    }

    // Double-reflection rotation-minimizing frames.
    layout.ring_normal[0] = any_orthogonal(layout.ring_tangent[0]);
    for (std::size_t i = 0; i + 1 < axial_steps; ++i) {
        const Vec3 v1 = layout.ring_center[i + 1] - layout.ring_center[i];
        const double c1 = dot(v1, v1);
        const Vec3& t0 = layout.ring_tangent[i];
        const Vec3& t1 = layout.ring_tangent[i + 1];
        Vec3 r = layout.ring_normal[i];
        if (c1 > 0.0) {
            const Vec3 rl = r - v1 * (2.0 / c1 * dot(v1, r));
            const Vec3 tl = t0 - v1 * (2.0 / c1 * dot(v1, t0));
            const Vec3 v2 = t1 - tl;
            const double c2 = dot(v2, v2);
            r = c2 > 0.0 ? rl - v2 * (2.0 / c2 * dot(v2, rl)) : rl;
        }
        // Re-orthogonalize against drift.
        layout.ring_normal[i + 1] = normalize(r - t1 * dot(r, t1));
    }
    for (std::size_t i = 0; i < axial_steps; ++i) {
        layout.ring_binormal[i] = cross(layout.ring_tangent[i], layout.ring_normal[i]);
    }

    TriMesh mesh;
    mesh.vertices.resize(axial_steps * radial_steps);
    for (std::size_t i = 0; i < axial_steps; ++i) {
        const double s = layout.ring_arclength[i];
        for (std::size_t j = 0; j < radial_steps; ++j) {
            const double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(radial_steps);
            const Vec3 spoke = layout.ring_normal[i] * std::cos(theta) + layout.ring_binormal[i] * std::sin(theta);
            mesh.vertices[layout.index(i, j)] = layout.ring_center[i] + spoke * profile.radius(s, theta);
        }
    }
    mesh.triangles.reserve(2 * (axial_steps - 1) * radial_steps);
    for (std::size_t i = 0; i + 1 < axial_steps; ++i) {
        for (std::size_t j = 0; j < radial_steps; ++j) {
            const std::size_t jn = (j + 1) % radial_steps;
            const auto a = static_cast<std::uint32_t>(layout.index(i, j));
            const auto b = static_cast<std::uint32_t>(layout.index(i + 1, j));
            const auto c = static_cast<std::uint32_t>(layout.index(i + 1, jn));
            const auto d = static_cast<std::uint32_t>(layout.index(i, jn));
            mesh.triangles.push_back({a, b, d});
            mesh.triangles.push_back({b, c, d});
        }
    }
    mesh.materials.assign(mesh.vertices.size(), MaterialId::Wall);
    recompute_normals(mesh);
    mesh.tube = std::move(layout);
    return mesh;
}

/// Mean distance of ring i's vertices from its center.
inline double ring_mean_radius(const TriMesh& mesh, std::size_t ring) {
    const TubeLayout& t = mesh.tube.value();
    double acc = 0.0;
    for (std::size_t j = 0; j < t.radial_steps; ++j) acc += distance(mesh.vertices[t.index(ring, j)], t.ring_center[ring]);
    return acc / static_cast<double>(t.radial_steps);
}

/// Fractional ring index for arc length s (rings are uniformly spaced).
inline double ring_coordinate(const TubeLayout& t, double s) {
    const double L = t.ring_arclength.back();
    return std::clamp(s / L, 0.0, 1.0) * static_cast<double>(t.axial_steps - 1);
}

/// Bilinear interpolation of a per-vertex attribute over the tube grid.
template <typename Get>
Vec3 tube_interpolate(const TubeLayout& t, double s, double theta, Get&& get) {
    const double fi = ring_coordinate(t, s);
    const auto i0 = std::min(static_cast<std::size_t>(fi), t.axial_steps - 2);
    const double u = fi - static_cast<double>(i0);
    double fj = std::fmod(theta, 2.0 * kPi);
    if (fj < 0.0) fj += 2.0 * kPi;
    fj *= static_cast<double>(t.radial_steps) / (2.0 * kPi);
    const auto j0 = static_cast<std::size_t>(fj) % t.radial_steps;
    const std::size_t j1 = (j0 + 1) % t.radial_steps;
    const double v = fj - std::floor(fj);
    const Vec3 a = get(t.index(i0, j0)), b = get(t.index(i0 + 1, j0));
    const Vec3 c = get(t.index(i0, j1)), d = get(t.index(i0 + 1, j1));
    return (a * (1.0 - u) + b * u) * (1.0 - v) + (c * (1.0 - u) + d * u) * v;
}

}  // namespace colonsynth
