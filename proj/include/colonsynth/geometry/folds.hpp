#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "colonsynth/core/rng.hpp"
#include "colonsynth/geometry/mesh.hpp"
#include "colonsynth/geometry/tube.hpp"

namespace colonsynth {

/// Haustral folds: circumferential constrictions at given arc lengths.
struct FoldSpec {
    std::vector<double> axial_positions;  // cm, increasing
    std::vector<double> diameters;        // cm
    double falloff_width = 0.8;           // cm; Gaussian sigma is half of this

    std::size_t count() const { return axial_positions.size(); }
};

struct FoldDrawParams {
    int min_count = 30;
    int max_count = 60;
    double min_spacing = 3.0;
    double max_spacing = 6.0;
    double min_diameter = 2.8;
    double max_diameter = 7.5;
    double end_margin = 4.0;           // keep folds off the open tube ends
    double max_constriction = 0.92;    // fold diameter cap relative to the local lumen diameter
    double falloff_width = 0.8;
};

/// Draws fold count, positions and diameters. Spacings are uniform in
/// [min_spacing, max_spacing] and compressed toward min_spacing when the
/// requested count would not fit the usable length. `local_diameter(s)` caps
/// each draw so every fold constricts.
inline FoldSpec draw_folds(double centerline_length, std::uint64_t seed,
                           const std::function<double(double)>& local_diameter, const FoldDrawParams& p = {}) {
    Rng rng(derive_seed(seed, 0xF01D));
    const double usable = centerline_length - 2.0 * p.end_margin;
    if (usable <= 0.0) throw std::invalid_argument("draw_folds: centerline too short for folds");

    auto count = static_cast<std::size_t>(rng.uniform_int(p.min_count, p.max_count));
    const auto max_fit = static_cast<std::size_t>(std::floor(usable / p.min_spacing)) + 1;
    count = std::min(count, max_fit);

    FoldSpec spec;
    spec.falloff_width = p.falloff_width;
    if (count == 0) return spec;

    std::vector<double> gaps(count - 1);
    double total = 0.0;
    for (auto& g : gaps) {
        g = rng.uniform(p.min_spacing, p.max_spacing);
        total += g;
    }
    const double floor_total = p.min_spacing * static_cast<double>(gaps.size());
    if (total > usable) {
        const double k = (usable - floor_total) / (total - floor_total);
        total = 0.0;
        for (auto& g : gaps) {
            g = p.min_spacing + (g - p.min_spacing) * k;
            total += g;
        }
    }
    double s = p.end_margin + rng.uniform() * std::max(0.0, usable - total);
    for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) s += gaps[i - 1];
        spec.axial_positions.push_back(s);
        const double cap = std::min(p.max_diameter, p.max_constriction * local_diameter(s));
        spec.diameters.push_back(rng.uniform(p.min_diameter, std::max(p.min_diameter, cap)));
    }
    return spec;
}

namespace detail {
inline double fold_falloff(double dx, double width) {
    const double x = dx / width;
    return std::exp(-2.0 * x * x);
}
}  // namespace detail

/// Shrinks tube rings toward the centerline around each fold, then applies one
/// Laplacian pass to the ring scale field. Each fold's amplitude is solved so
/// that the smoothed ring nearest the fold hits the fold diameter exactly.
/// Folds that would not constrict are skipped and reported in `warnings`.
inline TriMesh apply_folds(const TriMesh& mesh, const FoldSpec& folds, const Centerline& curve,
                           std::vector<std::string>* warnings = nullptr) {
    if (folds.count() == 0) return mesh;
    if (!mesh.tube) throw std::invalid_argument("apply_folds: mesh has no tube layout");
    if (folds.diameters.size() != folds.axial_positions.size()) {
        throw std::invalid_argument("apply_folds: positions/diameters size mismatch");
    }
    if (!(folds.falloff_width > 0.0)) throw std::invalid_argument("apply_folds: falloff width must be positive");
    const TubeLayout& t = *mesh.tube;
    const std::size_t rings = t.axial_steps;
    const double L = curve.length();

    std::vector<double> base_radius(rings);
    for (std::size_t i = 0; i < rings; ++i) base_radius[i] = ring_mean_radius(mesh, i);

    const double reach = 4.0 * folds.falloff_width;
    const double ring_step = L / static_cast<double>(rings - 1);
    std::vector<double> scale(rings, 1.0);
    for (std::size_t k = 0; k < folds.count(); ++k) {
        const double sk = folds.axial_positions[k];
        if (sk < 0.0 || sk > L) throw std::invalid_argument("apply_folds: fold position outside centerline");
        const auto c = static_cast<std::size_t>(std::lround(ring_coordinate(t, sk)));
        const double local_d = 2.0 * base_radius[c];
        const double q = folds.diameters[k] / local_d;
        if (q >= 1.0) {
            if (warnings) {
                warnings->push_back("fold " + std::to_string(k) + " at s=" + std::to_string(sk) + " cm skipped: diameter " +
                                    std::to_string(folds.diameters[k]) + " >= local lumen " + std::to_string(local_d));
            }
            continue;
        }
        auto g = [&](std::size_t i) { return detail::fold_falloff(t.ring_arclength[i] - sk, folds.falloff_width); };
        const std::size_t cm = c == 0 ? 0 : c - 1;
        const std::size_t cp = std::min(c + 1, rings - 1);
        const double g_smoothed = 0.5 * g(c) + 0.25 * (g(cm) + g(cp));
        const double amplitude = (1.0 - q) / g_smoothed;
        const auto span = static_cast<std::size_t>(std::ceil(reach / ring_step)) + 1;
        const std::size_t lo = c > span ? c - span : 0;
        const std::size_t hi = std::min(rings - 1, c + span);
        for (std::size_t i = lo; i <= hi; ++i) scale[i] *= std::max(0.0, 1.0 - amplitude * g(i));
    }

    std::vector<double> smoothed(rings);
    for (std::size_t i = 0; i < rings; ++i) {
        const double left = scale[i == 0 ? 0 : i - 1];
        const double right = scale[std::min(i + 1, rings - 1)];
        smoothed[i] = 0.5 * scale[i] + 0.25 * (left + right);
    }

    TriMesh out = mesh;
    for (std::size_t i = 0; i < rings; ++i) {
        if (smoothed[i] == 1.0) continue;
        for (std::size_t j = 0; j < t.radial_steps; ++j) {
            Vec3& v = out.vertices[t.index(i, j)];
            v = t.ring_center[i] + (v - t.ring_center[i]) * smoothed[i];
        }
    }
    recompute_normals(out);
    return out;
}

}  // namespace colonsynth
