#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "colonsynth/core/rng.hpp"
#include "colonsynth/core/vec3.hpp"
#include "colonsynth/dataset/level.hpp"
#include "colonsynth/geometry/mesh.hpp"
#include "colonsynth/scene/noise.hpp"

namespace colonsynth {

/// Frames sharing one Level-5 texture draw.
inline constexpr std::size_t kTextureFramePeriod = 3;

inline constexpr Vec3 kMucosaAlbedo{0.78, 0.56, 0.54};  // matte pink-gray
inline constexpr Vec3 kPolypAlbedo{0.80, 0.50, 0.48};

struct SurfaceParams {
    Vec3 albedo;
    double specular = 0.0;  // k_s
    double shininess = 1.0; // alpha
};

/// Per-frame shading parameters for wall and polyp surfaces.
class MaterialTable {
public:
    int level = 1;
    Vec3 wall_albedo = kMucosaAlbedo;
    Vec3 polyp_albedo = kPolypAlbedo;
    double specular = 0.0;
    double shininess = 60.0;
    bool polyp_voronoi = false;
    bool wall_texture = false;
    std::uint64_t texture_seed = 0;
    std::uint64_t voronoi_seed = 0;

    SurfaceParams at(MaterialId id, const Vec3& p) const {
        SurfaceParams s;
        s.specular = specular;
        s.shininess = shininess;
        if (id == MaterialId::Polyp) {
            s.albedo = polyp_albedo;
            if (polyp_voronoi) {
                // Thin darker seams along Voronoi cell borders, like a pit pattern.
                const auto cell = voronoi(p * 6.0, voronoi_seed);
                const double border = std::clamp((cell.f2 - cell.f1) / 0.12, 0.0, 1.0);
                s.albedo = s.albedo * (0.72 + 0.28 * border);
            }
            if (wall_texture) s.albedo = hadamard(s.albedo, tint(p, 1.5));
            return s;
        }
        s.albedo = wall_albedo;
        if (wall_texture) s.albedo = texture(p);
        return s;
    }

private:
    Vec3 tint(const Vec3& p, double freq) const {
        const double n = value_noise(p * freq, texture_seed);
        return Vec3{1.0, 0.9 + 0.1 * n, 0.9 + 0.1 * n};
    }

    // Band-limited value-noise colour field over a mucosa palette, with thin
    // dark-red vessel streaks where a Perlin field crosses zero.
    Vec3 texture(const Vec3& p) const {
        const double f = palette_.frequency;
        const double blend = 0.5 * value_noise(p * f, texture_seed) + 0.3 * value_noise(p * (2.3 * f), texture_seed ^ 1) +
                             0.2 * value_noise(p * (5.1 * f), texture_seed ^ 2);
        Vec3 c = lerp(palette_.base, palette_.stain, std::clamp((blend - 0.35) * 1.6, 0.0, 1.0));
        const double line = std::abs(vessels_.fbm(p * palette_.vessel_frequency, 2));
        const double vessel = std::clamp(1.0 - line / 0.035, 0.0, 1.0);
        c = lerp(c, Vec3{0.45, 0.10, 0.12}, 0.6 * vessel);
        return Vec3{std::clamp(c.x, 0.0, 1.0), std::clamp(c.y, 0.0, 1.0), std::clamp(c.z, 0.0, 1.0)};
    }

public:
    /// Draws the texture palette for `texture_seed`; call after setting it.
    void prepare_texture() {
        Rng rng(texture_seed);
        palette_.base = {rng.uniform(0.70, 0.90), rng.uniform(0.42, 0.62), rng.uniform(0.40, 0.58)};
        palette_.stain = {rng.uniform(0.55, 0.80), rng.uniform(0.25, 0.40), rng.uniform(0.20, 0.35)};
        palette_.frequency = rng.uniform(0.25, 0.6);
        palette_.vessel_frequency = rng.uniform(0.8, 1.6);
        vessels_ = PerlinNoise(texture_seed ^ 0x7E55E1);
    }

private:
    struct Palette {
        Vec3 base;
        Vec3 stain;
        double frequency = 0.4;
        double vessel_frequency = 1.0;
    };
    Palette palette_;
    PerlinNoise vessels_;
};

/// Texture seed shared by frames [3k, 3k+3).
inline std::uint64_t texture_seed_for_frame(std::uint64_t seed, std::size_t frame_index) {
    return derive_seed(seed, 0x7E47 + frame_index / kTextureFramePeriod);
}

/// Levels 1-3: uniform matte albedo. Level 4 adds a specular lobe
/// (k_s = 0.35, alpha = 60) and Voronoi polyp texture. Level 5 adds a
/// procedural wall texture whose seed is redrawn every 3 frames.
inline MaterialTable assign_materials(const LevelConfig& level, std::size_t frame_index, std::uint64_t seed) {
    if (level.level < 1 || level.level > kLevelCount) throw std::invalid_argument("assign_materials: invalid level");
    MaterialTable m;
    m.level = level.level;
    m.specular = level.specular ? 0.35 : 0.0;
    m.shininess = 60.0;
    m.polyp_voronoi = level.surface_irregularities;
    m.voronoi_seed = derive_seed(seed, 0x7090);
    m.wall_texture = level.texture;
    if (level.texture) {
        m.texture_seed = texture_seed_for_frame(seed, frame_index);
        m.prepare_texture();
    }
    return m;
}

inline MaterialTable assign_materials(int level, std::size_t frame_index, std::uint64_t seed) {
    return assign_materials(level_config(level), frame_index, seed);
}

}  // namespace colonsynth
