#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "colonsynth/core/rng.hpp"
#include "colonsynth/geometry/centerline.hpp"
#include "colonsynth/geometry/mesh.hpp"
#include "colonsynth/geometry/tube.hpp"
#include "colonsynth/scene/noise.hpp"

namespace colonsynth {

/// Canonical base polyp sizes, in mm.
inline constexpr std::array<double, 6> kCanonicalPolypDiametersMm = {5, 10, 15, 20, 25, 30};

struct PolypSpec {
    double base_diameter_mm = 10.0;
    double axial_cm = 0.0;     // anchor arc length along the centerline
    double angle_rad = 0.0;    // anchor angle in the ring frame
    std::uint64_t deformation_seed = 0;
    double max_radial_perturbation = 0.0;  // fraction of the radius, <= 0.1 for deformed polyps

    double radius_cm() const { return base_diameter_mm / 20.0; }
};

struct PolypResolution {
    std::size_t latitude_bands = 32;
    std::size_t longitude_steps = 64;
};

/// Deformed UV sphere centered at the origin with its pole on +z. Each vertex
/// radius is r * (1 + m * n(dir)) with n a seeded fractal Perlin field in [-1, 1].
inline TriMesh make_polyp(const PolypSpec& spec, const PolypResolution& res = {}) {
    if (!(spec.base_diameter_mm > 0.0)) throw std::invalid_argument("make_polyp: base diameter must be positive");
    if (spec.max_radial_perturbation < 0.0 || spec.max_radial_perturbation >= 1.0) {
        throw std::invalid_argument("make_polyp: perturbation fraction out of [0,1)");
    }
    if (res.latitude_bands < 2 || res.longitude_steps < 3) throw std::invalid_argument("make_polyp: resolution too low");
    const double r = spec.radius_cm();
    const PerlinNoise noise(spec.deformation_seed);
    Rng rng(derive_seed(spec.deformation_seed, 0x9017));
    const Vec3 offset{rng.uniform(0, 64), rng.uniform(0, 64), rng.uniform(0, 64)};
    constexpr double kShapeFrequency = 1.7;  // lobes per unit direction

    auto radius_at = [&](const Vec3& dir) {
        if (spec.max_radial_perturbation == 0.0) return r;
        return r * (1.0 + spec.max_radial_perturbation * noise.fbm(dir * kShapeFrequency + offset, 2));
    };

    TriMesh m;
    const std::size_t lat = res.latitude_bands, lon = res.longitude_steps;
    m.vertices.push_back(Vec3{0, 0, 1} * radius_at({0, 0, 1}));
    for (std::size_t i = 1; i < lat; ++i) {
        const double phi = kPi * static_cast<double>(i) / static_cast<double>(lat);
        for (std::size_t j = 0; j < lon; ++j) {
            const double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(lon);
            const Vec3 dir{std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)};
            m.vertices.push_back(dir * radius_at(dir));
        }
    }
    m.vertices.push_back(Vec3{0, 0, -1} * radius_at({0, 0, -1}));

    const auto north = 0u;
    const auto south = static_cast<std::uint32_t>(m.vertices.size() - 1);
    auto ring = [&](std::size_t i, std::size_t j) { return static_cast<std::uint32_t>(1 + (i - 1) * lon + (j % lon)); };
    // Outward winding.
    for (std::size_t j = 0; j < lon; ++j) m.triangles.push_back({north, ring(1, j), ring(1, j + 1)});
    for (std::size_t i = 1; i + 1 < lat; ++i) {
        for (std::size_t j = 0; j < lon; ++j) {
            m.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
            m.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    }
    for (std::size_t j = 0; j < lon; ++j) m.triangles.push_back({south, ring(lat - 1, j + 1), ring(lat - 1, j)});
    m.materials.assign(m.vertices.size(), MaterialId::Polyp);
    recompute_normals(m);
    return m;
}

struct PolypDrawParams {
    int min_count = 8;
    int max_count = 12;
    double min_diameter_mm = 5.0;
    double max_diameter_mm = 30.0;
    double end_margin = 6.0;  // cm kept free at both tube ends
    bool deformed = true;
    double perturbation = 0.1;
};

/// Draws polyp count, sizes and anchors for one colon model.
inline std::vector<PolypSpec> draw_polyps(double centerline_length, std::uint64_t seed, const PolypDrawParams& p = {}) {
    if (centerline_length <= 2.0 * p.end_margin) throw std::invalid_argument("draw_polyps: centerline too short");
    Rng rng(derive_seed(seed, 0x9011));
    const auto count = rng.uniform_int(p.min_count, p.max_count);
    std::vector<PolypSpec> specs;
    for (std::int64_t i = 0; i < count; ++i) {
        PolypSpec s;
        s.base_diameter_mm = rng.uniform(p.min_diameter_mm, p.max_diameter_mm);
        s.axial_cm = rng.uniform(p.end_margin, centerline_length - p.end_margin);
        s.angle_rad = rng.uniform(0.0, 2.0 * kPi);
        s.deformation_seed = rng.next_u64();
        s.max_radial_perturbation = p.deformed ? p.perturbation : 0.0;
        specs.push_back(s);
    }
    return specs;
}

struct AttachOptions {
    double skirt_fraction = 0.3;        // skirt width relative to the polyp radius
    double skirt_lift_fraction = 0.15;  // wall lift under the polyp rim, relative to the radius
    double min_lumen_clearance = 1.2;   // cm left between the polyp apex and the centerline
    double end_margin = 6.0;            // cm kept free at both tube ends
    int max_retries = 10;
};

/// Where a polyp ended up after attachment (anchors may be redrawn).
struct AttachedPolyp {
    PolypSpec spec;
    Vec3 anchor;        // wall point, cm
    Vec3 inward;        // unit, toward the lumen
    int redraws = 0;
};

namespace detail {

inline Vec3 wall_point(const TriMesh& mesh, double s, double angle) {
    return tube_interpolate(*mesh.tube, s, angle, [&](std::size_t i) { return mesh.vertices[i]; });
}

inline Vec3 wall_normal(const TriMesh& mesh, double s, double angle) {
    return normalize(tube_interpolate(*mesh.tube, s, angle, [&](std::size_t i) { return mesh.normals[i]; }));
}

}  // namespace detail

/// Embeds each polyp sphere with its center on the wall so half of it
/// protrudes into the lumen, and lifts nearby wall vertices with a cosine
/// skirt. Anchors closer than one diameter to an earlier polyp, or leaving
/// less than `min_lumen_clearance`, are redrawn up to `max_retries` times.
inline TriMesh attach_polyps(const TriMesh& mesh, const std::vector<PolypSpec>& specs, const Centerline& curve,
                             const AttachOptions& opts = {}, std::vector<AttachedPolyp>* placed_out = nullptr,
                             const PolypResolution& res = {}) {
    if (specs.empty()) {
        if (placed_out) placed_out->clear();
        return mesh;
    }
    if (!mesh.tube) throw std::invalid_argument("attach_polyps: mesh has no tube layout");
    const TubeLayout& t = *mesh.tube;
    const double L = curve.length();

    TriMesh out = mesh;
    std::vector<AttachedPolyp> placed;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        PolypSpec spec = specs[k];
        const double r = spec.radius_cm();
        if (spec.axial_cm < 0.0 || spec.axial_cm > L) {
            throw std::invalid_argument("attach_polyps: anchor outside centerline");
        }
        Rng redraw(derive_seed(spec.deformation_seed, 0xA7AC));
        int attempt = 0;
        Vec3 anchor, inward;
        for (;; ++attempt) {
            anchor = detail::wall_point(mesh, spec.axial_cm, spec.angle_rad);
            inward = detail::wall_normal(mesh, spec.axial_cm, spec.angle_rad);
            const double lumen_left = distance(anchor, curve.point(spec.axial_cm)) - r;
            bool ok = lumen_left >= opts.min_lumen_clearance;
            for (const auto& p : placed) {
                if (distance(p.anchor, anchor) < std::max(2.0 * r, 2.0 * p.spec.radius_cm())) ok = false;
            }
            if (ok) break;
            if (attempt >= opts.max_retries) {
                throw std::runtime_error("attach_polyps: could not place polyp " + std::to_string(k) + " after " +
                                         std::to_string(opts.max_retries) + " retries");
            }
            spec.axial_cm = redraw.uniform(std::min(opts.end_margin, 0.5 * L), std::max(L - opts.end_margin, 0.5 * L));
            spec.angle_rad = redraw.uniform(0.0, 2.0 * kPi);
        }

        // Wall skirt around the rim.
        const double rim = r * (1.0 + opts.skirt_fraction);
        const double lift = opts.skirt_lift_fraction * r;
        const double fi = ring_coordinate(t, spec.axial_cm);
        const double ring_step = t.ring_arclength.back() / static_cast<double>(t.axial_steps - 1);
        const auto span = static_cast<std::size_t>(std::ceil((rim + 1.0) / ring_step)) + 1;
        const auto center_ring = static_cast<std::size_t>(std::lround(fi));
        const std::size_t lo = center_ring > span ? center_ring - span : 0;
        const std::size_t hi = std::min(t.axial_steps - 1, center_ring + span);
        for (std::size_t i = lo; i <= hi; ++i) {
            for (std::size_t j = 0; j < t.radial_steps; ++j) {
                const std::size_t idx = t.index(i, j);
                const double rho = distance(mesh.vertices[idx], anchor);
                if (rho >= rim) continue;
                const double x = std::clamp((rho - r) / (rim - r), 0.0, 1.0);
                out.vertices[idx] += mesh.normals[idx] * (lift * 0.5 * (1.0 + std::cos(kPi * x)));
            }
        }

        TriMesh polyp = make_polyp(spec, res);
        const Vec3 ex = any_orthogonal(inward);
        const Vec3 ey = cross(inward, ex);
        for (auto& v : polyp.vertices) v = anchor + ex * v.x + ey * v.y + inward * v.z;
        append(out, polyp);
        placed.push_back({spec, anchor, inward, attempt});
    }
    recompute_normals(out);
    if (placed_out) *placed_out = std::move(placed);
    return out;
}

}  // namespace colonsynth
